#include "cat0/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace cat0;

namespace {

SpacePtr exact_plane() { return ModelSpace::euclidean(); }
SpacePtr float_plane() { return ModelSpace::euclidean(NumericMode::float_with_tolerance); }

RSequence x_axis(const SpacePtr& e)
{
    return make_rsequence(e->geodesic_through(e->point(0, 0), e->point(1, 0)), Num(0));
}

}  // namespace

TEST(Oracle, UnitQueryExamples)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    EXPECT_EQ(s.unit_query(e.point(0, 0), e.point(1, 0)), Answer::le);
    EXPECT_EQ(s.unit_query(e.point(0, 0), e.point(Num::ratio(1, 2), Num(0))), Answer::le);
    EXPECT_EQ(s.unit_query(e.point(0, 0), e.point(Num::ratio(3, 2), Num(0))), Answer::gt);
    EXPECT_EQ(s.query_count(), 3u);
    EXPECT_TRUE(s.audit());
}

TEST(Oracle, FloatBandRefusesAmbiguousQueries)
{
    OracleSession s(float_plane());
    auto& e = s.space();
    EXPECT_THROW(s.unit_query(e.point(0, 0), e.point(1.0 + 1e-11, 0.0)), BoundaryAmbiguity);
    EXPECT_EQ(s.unit_query(e.point(0, 0), e.point(1.0 + 1e-6, 0.0)), Answer::gt);
    EXPECT_EQ(s.band(), 1e-9);
}

TEST(Oracle, RelationExamples)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    Point o = e.point(0, 0), p3 = e.point(3, 0);
    EXPECT_EQ(s.relation_member(o, p3, {Relation::closed, 3}), Membership::yes);
    // The certified chain passes through (1,0) and (2,0).
    const auto& chain = s.witness_log().back();
    ASSERT_EQ(chain.size(), 4u);
    EXPECT_TRUE(e.same_point(chain[1], e.point(1, 0)));
    EXPECT_TRUE(e.same_point(chain[2], e.point(2, 0)));
    EXPECT_EQ(s.relation_member(o, p3, {Relation::boundary, 3}), Membership::yes);
    EXPECT_EQ(s.relation_member(o, p3, {Relation::interior, 3}), Membership::no);
    Point p25 = e.point(Num::ratio(5, 2), Num(0));
    EXPECT_EQ(s.relation_member(o, p25, {Relation::interior, 3}), Membership::yes);
    EXPECT_EQ(s.relation_member(o, p25, {Relation::boundary, 3}), Membership::no);
    EXPECT_EQ(s.relation_member(o, e.point(4, 0), {Relation::closed, 3}), Membership::no);
    EXPECT_TRUE(s.audit());
}

TEST(Oracle, BoundaryProbingInFloatMode)
{
    OracleSession s(float_plane());
    auto& e = s.space();
    EXPECT_EQ(s.relation_member(e.point(0, 0), e.point(3.0, 0.0), {Relation::boundary, 3}), Membership::yes);
    EXPECT_EQ(s.relation_member(e.point(0, 0), e.point(3.0 - 1e-3, 0.0), {Relation::boundary, 3}), Membership::no);
}

TEST(Oracle, MidpointExamples)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    Point m = s.midpoint_from_tube(e.point(0, 0), e.point(2, 0));
    EXPECT_TRUE(e.same_point(m, e.point(1, 0)));
    EXPECT_THROW(s.midpoint_from_tube(e.point(0, 0), e.point(1, 0)), GeometryError);

    OracleSession hs(ModelSpace::hyperbolic());
    auto& h = hs.space();
    Point p = h.polar(0.3, 0.2);
    Geodesic g = h.geodesic_to_ideal(p, h.boundary_angle(2.0));
    Point q = eval(g, 2.0);
    Point hm = hs.midpoint_from_tube(p, q);
    EXPECT_NEAR(h.distance(p, hm).value(), 1.0, 1e-8);
    EXPECT_LT(h.distance(hm, eval(h.geodesic_through(p, q), 1.0)).value(), 1e-8);
}

TEST(Oracle, IntegerSphereExamples)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    EXPECT_EQ(s.integer_sphere_member(e.point(0, 0), 2, e.point(0, 2)), Membership::yes);
    EXPECT_EQ(s.integer_sphere_member(e.point(0, 0), 2, e.point(1, 0)), Membership::no);

    OracleSession ts(ModelSpace::tree(tripod_tree(1)));
    auto& t = ts.space();
    // Center vertex to a point 2 units out along a ray: path length 3.
    Point far = t.tree_point(3, Num(2));
    ASSERT_EQ(t.distance(t.vertex_point(0), far).as_rational(), Rational(3));
    EXPECT_EQ(ts.integer_sphere_member(t.vertex_point(0), 3, far), Membership::yes);
    EXPECT_EQ(ts.integer_sphere_member(t.vertex_point(0), 2, far), Membership::no);
}

TEST(Oracle, HoroballExamples)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    RSequence seq = x_axis(s.space_ptr());
    EXPECT_EQ(s.horoball_member(seq, 0, e.point(5, 0), 10), HoroVerdict::inside);
    EXPECT_EQ(s.horoball_member(seq, 0, e.point(-1, 0), 10), HoroVerdict::outside);
    EXPECT_EQ(s.horoball_member(seq, 0, e.point(0, 3), 10), HoroVerdict::on_horosphere);
}

TEST(Oracle, QueryLogExport)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    s.unit_query(e.point(0, 0), e.point(1, 1));
    std::ostringstream os;
    s.export_csv(os);
    EXPECT_EQ(os.str(), "x,y,answer,tag\n0;0,1;1,gt,V\n");
}

TEST(Oracle, LogLimitKeepsCounting)
{
    OracleConfig cfg;
    cfg.log_limit = 2;
    OracleSession s(exact_plane(), cfg);
    auto& e = s.space();
    for (int i = 0; i < 5; ++i) s.unit_query(e.point(0, 0), e.point(i, 0));
    EXPECT_EQ(s.query_count(), 5u);
    EXPECT_EQ(s.query_log().size(), 2u);
}

// ---------------------------------------------------------------------------
// Properties

TEST(OracleProperties, SoundnessAndPartition)
{
    std::vector<SpacePtr> spaces{exact_plane(), float_plane(), ModelSpace::hyperbolic(),
                                 ModelSpace::tree(tripod_tree(1)), ModelSpace::tree_cross_line(line_tree(2, 1))};
    for (const auto& sp : spaces) {
        OracleSession s(sp);
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<int> lvl(1, 4);
        for (int i = 0; i < 300; ++i) {
            Point x = sp->random_point(rng, 2.5), y = sp->random_point(rng, 2.5);
            int n = lvl(rng);
            double d = sp->distance(x, y).value();
            auto closed = s.relation_member(x, y, {Relation::closed, n});
            auto bd = s.relation_member(x, y, {Relation::boundary, n});
            auto in = s.relation_member(x, y, {Relation::interior, n});
            if (std::abs(d - n) > 1e-8 * n) {
                if (closed != Membership::indeterminate) EXPECT_EQ(closed == Membership::yes, d <= n);
                if (in != Membership::indeterminate) EXPECT_EQ(in == Membership::yes, d < n);
                if (bd != Membership::indeterminate) EXPECT_EQ(bd, Membership::no);
            }
            if (closed == Membership::yes && bd != Membership::indeterminate && in != Membership::indeterminate)
                EXPECT_NE(bd == Membership::yes, in == Membership::yes);
            if (closed == Membership::yes)
                EXPECT_EQ(s.relation_member(x, y, {Relation::closed, n + 1}), Membership::yes);
        }
        EXPECT_TRUE(s.audit()) << to_string(sp->kind());
    }
}

TEST(OracleProperties, MidpointHalvesDistance)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        // Rational points at distance exactly 2 via Pythagorean directions.
        Point x = e.random_point(rng, 2);
        auto dirs = e.sphere_sample(x, Num(2), 12);
        Point y = dirs[i % dirs.size()];
        Point m = s.midpoint_from_tube(x, y);
        EXPECT_EQ(e.distance(x, m).as_rational(), Rational(1));
    }
}

TEST(OracleProperties, HoroballMonotoneInNmax)
{
    OracleSession s(exact_plane());
    auto& e = s.space();
    RSequence seq = x_axis(s.space_ptr());
    IdealPoint xi = e.direction(Num(1), Num(0));
    auto rank = [](HoroVerdict v) { return v == HoroVerdict::indeterminate ? 0 : 1; };
    for (Point y : {e.point(Num::ratio(1, 4), Num(2)), e.point(Num::ratio(-1, 4), Num(1)), e.point(Num(0), Num(2)),
                    e.point(Num(2), Num(-3))}) {
        HoroVerdict prev = HoroVerdict::indeterminate;
        for (int n : {1, 2, 4, 8, 16, 32}) {
            HoroVerdict v = s.horoball_member(seq, 0, y, n);
            if (rank(prev) == 1) EXPECT_EQ(v, prev);
            prev = v;
        }
        double beta = e.busemann(xi, e.point(0, 0), y).value();
        HoroVerdict expect = beta < 0 ? HoroVerdict::inside : (beta > 0 ? HoroVerdict::outside : HoroVerdict::on_horosphere);
        EXPECT_EQ(prev, expect) << describe(y);
    }
}
