#include "cat0/rankone.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace cat0;

namespace {

Geodesic diameter(const ModelSpace& h, double phi = 0.0)
{
    return h.geodesic_through(h.origin(), h.polar(1.0, phi));
}

}  // namespace

TEST(Shadow, MemberExamples)
{
    auto e = ModelSpace::euclidean();
    Point y = e->point(-1, 0), x0 = e->point(0, 0);
    EXPECT_TRUE(shadow_member(*e, y, x0, e->point(2, 0)));
    EXPECT_FALSE(shadow_member(*e, y, x0, e->point(0, 1)));
    EXPECT_FALSE(shadow_member(*e, y, x0, x0));
    EXPECT_TRUE(shadow_member(*e, y, x0, e->direction(Num(1), Num(0))));
    EXPECT_FALSE(shadow_member(*e, y, x0, e->direction(Num(0), Num(1))));
    EXPECT_THROW(shadow_member(*e, x0, x0, y), GeometryError);

    // Tripod: center vertex 0, legs 0..2 of length 1 then rays 3..5.
    auto t = ModelSpace::tree(tripod_tree(1));
    Point ty = t->tree_point(3, Num(1));
    Point center = t->vertex_point(0);
    ASSERT_EQ(t->degree(0), 3);
    EXPECT_TRUE(shadow_member(*t, ty, center, t->tree_point(4, Num(2))));
    EXPECT_TRUE(shadow_member(*t, ty, center, t->tree_point(5, Num(2))));
    EXPECT_FALSE(shadow_member(*t, ty, center, t->tree_point(3, Num(5))));
    EXPECT_TRUE(shadow_member(*t, ty, center, t->end(4)));
    EXPECT_FALSE(shadow_member(*t, ty, center, t->end(3)));
}

TEST(Shadow, SphericalSamples)
{
    auto e = ModelSpace::euclidean();
    auto s = spherical_shadow_sample(*e, e->point(-1, 0), e->point(0, 0), 2.0, 8);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_TRUE(e->same_point(s[0], e->point(2, 0)));

    auto h = ModelSpace::hyperbolic();
    Point y = h->polar(0.7, 2.0), x0 = h->polar(0.4, -1.0);
    auto hs = spherical_shadow_sample(*h, y, x0, 1.5, 8);
    ASSERT_EQ(hs.size(), 1u);
    EXPECT_NEAR(h->distance(hs[0], x0).value(), 1.5, 1e-12);
    EXPECT_NEAR(h->distance(hs[0], y).value(), h->distance(y, x0).value() + 1.5, 1e-12);

    // Seen from ray 3, the center of the tripod has two outgoing branches.
    auto t = ModelSpace::tree(tripod_tree(1));
    auto ts = spherical_shadow_sample(*t, t->tree_point(3, Num(1)), t->vertex_point(0), 0.5, 8);
    ASSERT_EQ(ts.size(), 2u);
    for (const Point& p : ts) EXPECT_TRUE(shadow_member(*t, t->tree_point(3, Num(1)), t->vertex_point(0), p));
}

TEST(Shadow, ContinuityProbe)
{
    auto e = ModelSpace::euclidean(NumericMode::float_with_tolerance);
    Point y = e->point(0.0, 0.0), x0 = e->point(2.0, 0.0);
    auto rows = shadow_continuity_probe(*e, y, x0, 3.0, {1e-1, 1e-2, 1e-3});
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].epsilon, rows[i - 1].epsilon);
    // Similar triangles: the shadow sits at radius R + rho and turns by the same angle.
    EXPECT_NEAR(rows[2].epsilon / rows[2].similar, 1.0, 0.1);
    EXPECT_NEAR(rows[2].similar, 2.5e-3, 1e-12);
    EXPECT_NEAR(rows[2].rho_ratio, 1.5e-3, 1e-12);

    auto h = ModelSpace::hyperbolic();
    auto hr = shadow_continuity_probe(*h, h->origin(), h->polar(1.0, 0.3), 1.0, {1e-1, 1e-2, 1e-3, 1e-4});
    for (std::size_t i = 1; i < hr.size(); ++i) EXPECT_LT(hr[i].epsilon, hr[i - 1].epsilon);
    const double c = hr.back().epsilon / hr.back().delta;
    for (const auto& row : hr) EXPECT_LE(row.epsilon, 1.01 * c * row.delta);
}

TEST(Scissors, FindExamples)
{
    auto h = ModelSpace::hyperbolic();
    Geodesic a = diameter(*h);
    Point x0 = h->origin();
    Scissors s = find_scissors(*h, a, x0, {});
    double off = h->distance(s.x, x0).value();
    EXPECT_GT(off, 0.0);
    EXPECT_LE(off, 0.1);
    EXPECT_NO_THROW(make_scissors(*h, s.a, s.b, s.c, s.d, s.x));

    ScissorsRequest zero;
    zero.offset_bound = 0;
    EXPECT_THROW(find_scissors(*h, a, x0, zero), GeometryError);

    // Shrinking neighborhoods pull b(+inf) onto a(+inf).
    double prev = 10;
    for (double radius : {0.4, 0.1, 0.025}) {
        ScissorsRequest r;
        r.boundary_radius = radius;
        Scissors sr = find_scissors(*h, a, x0, r);
        double gap = std::abs(std::remainder(h->ideal_end(sr.b, 1).theta - h->ideal_end(a, 1).theta,
                                             2 * std::numbers::pi));
        EXPECT_LE(gap, radius);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    auto e = ModelSpace::euclidean();
    EXPECT_THROW(find_scissors(*e, e->geodesic_through(e->point(0, 0), e->point(1, 0)), e->point(0, 0), {}),
                 GeometryError);
}

TEST(Scissors, TranslateExamples)
{
    auto h = ModelSpace::hyperbolic();
    Geodesic a = diameter(*h, 0.4);
    // Closed scissors: every transfer is the identity.
    Scissors closed = make_scissors(*h, a, a, a, a, h->origin(), false);
    Point m = eval(a, 1.3);
    EXPECT_LT(h->distance(scissors_translate(*h, closed, m), m).value(), 1e-12);
    EXPECT_NEAR(displacement_formula(*h, closed), 0.0, 1e-12);

    auto e = ModelSpace::euclidean();
    Geodesic ea = e->geodesic_through(e->point(0, 0), e->point(1, 0));
    Geodesic eb = e->geodesic_through(e->point(0, 1), e->point(1, 1));
    Geodesic ed = e->geodesic_through(e->point(0, 3), e->point(1, 3));
    Scissors es = make_scissors(*e, ea, eb, eb, ed, e->point(5, 1), false);
    Point em = e->point(Num::ratio(7, 3), Num(0));
    EXPECT_TRUE(e->same_point(scissors_translate(*e, es, em), em));
    EXPECT_EQ(displacement_formula(*e, es), 0.0);
    EXPECT_THROW(scissors_translate(*e, es, e->point(0, 1)), GeometryError);

    Scissors s = hyperbolic_scissors(*h, a, 0.3, 0.2);
    const double delta = displacement_formula(*h, s);
    EXPECT_GT(delta, 0.0);
    for (double t : {-2.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(displacement_composed(*h, s, t), delta, 1e-8);
    Point back = scissors_translate_inverse(*h, s, scissors_translate(*h, s, m));
    EXPECT_LT(h->distance(back, m).value(), 1e-9);
}

TEST(Scissors, OracleExamples)
{
    auto h = ModelSpace::hyperbolic();
    Geodesic a = diameter(*h, -0.8);
    Point x0 = h->origin();
    Scissors s = find_scissors_with_displacement(*h, a, x0, Rational(1, 4));
    EXPECT_NEAR(displacement_formula(*h, s), 0.25, 1e-10);
    OracleSession session(h);
    EXPECT_EQ(displacement_oracle(session, s, x0, 4), 0.25);
    double est = displacement_oracle(session, s, x0, 100);
    EXPECT_GT(est, 0.24);
    EXPECT_LE(est, 0.25);
    EXPECT_THROW(displacement_oracle(session, s, x0, 0), std::invalid_argument);

    Scissors g = hyperbolic_scissors(*h, a, 0.12, 0.07);
    const double df = displacement_formula(*h, g);
    for (int n : {10, 100, 1000}) EXPECT_LE(std::abs(displacement_oracle(session, g, x0, n) - df), 1.0 / n);
}

TEST(Scissors, DisplacementTargets)
{
    auto h = ModelSpace::hyperbolic();
    Geodesic a = diameter(*h, 1.1);
    Point x0 = eval(a, 0.5);
    ScissorsFamily fam = sweep_scissors(*h, a, x0);
    EXPECT_GT(fam.big_delta, 0.25);
    double prev = 1e9;
    for (int q : {4, 8, 16, 32, 64}) {
        Scissors s = find_scissors_with_displacement(fam, Rational(1, q));
        EXPECT_NEAR(displacement_formula(*h, s), 1.0 / q, 1e-10);
        double off = h->distance(s.x, h->project(s.x, a).foot).value();
        EXPECT_LT(off, prev);
        prev = off;
    }
    EXPECT_THROW(find_scissors_with_displacement(fam, Rational(static_cast<long long>(std::ceil(fam.big_delta)) + 1)),
                 GeometryError);
}

TEST(Scissors, CsvExport)
{
    auto h = ModelSpace::hyperbolic();
    Scissors s = hyperbolic_scissors(*h, diameter(*h), 0.3, 0.3);
    std::ostringstream out;
    export_scissors_csv(*h, s, out, 2.0, 8);
    std::string text = out.str();
    EXPECT_EQ(text.rfind("line,t,u,v\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4 * 9 + 1);
}

TEST(RankOne, ReconstructExamples)
{
    auto h = ModelSpace::hyperbolic();
    OracleSession session(h);
    Geodesic a = h->geodesic_through(h->polar(0.3, 0.2), h->polar(0.9, 2.0));
    auto r = reconstruct_rankone(session, a, -1.2, 2.5, 1e-4);
    EXPECT_NEAR(r.estimate, 3.7, 1e-4);
    EXPECT_LE(r.lo, 3.7);
    EXPECT_GE(r.hi, 3.7);
    EXPECT_EQ(r.integer_part, 3);
    EXPECT_GT(r.queries, 0u);
    auto z = reconstruct_rankone(session, a, 0.4, 0.4, 1e-4);
    EXPECT_EQ(z.estimate, 0.0);
    auto back = reconstruct_rankone(session, a, 2.5, -1.2, 1e-4);
    EXPECT_NEAR(back.estimate, 3.7, 1e-4);

    OracleSession es(ModelSpace::euclidean());
    EXPECT_THROW(reconstruct_rankone(es, Geodesic{}, 0, 1, 1e-3), GeometryError);
}

// ---------------------------------------------------------------------------
// Properties

TEST(ScissorsProperties, PositiveAndTripleAgreement)
{
    auto h = ModelSpace::hyperbolic();
    OracleSession session(h);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> eps(0.05, 0.25), phi(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 6; ++i) {
        Geodesic a = diameter(*h, phi(rng));
        Scissors s = hyperbolic_scissors(*h, a, eps(rng), eps(rng), i % 2 ? 1 : -1);
        auto rec = displacement_record(session, s, eval(a, 0.3), 200);
        EXPECT_GT(rec.formula, 0.0);  // a and d are disjoint here
        EXPECT_NEAR(rec.formula, rec.composed, 1e-8);
        EXPECT_GT(rec.oracle, rec.formula - 1.0 / 200);
        EXPECT_LE(rec.oracle, rec.formula + 1e-8);
    }
}

TEST(ScissorsProperties, TranslationIsAShift)
{
    auto h = ModelSpace::hyperbolic();
    Geodesic a = h->geodesic_through(h->polar(0.5, 1.0), h->polar(0.8, -0.4));
    Scissors s = hyperbolic_scissors(*h, a, 0.25, 0.4);
    std::vector<double> ts{-3.0, -1.0, 0.0, 0.5, 2.0, 4.0};
    double shift = displacement_composed(*h, s, ts[0]);
    for (double t : ts) EXPECT_NEAR(displacement_composed(*h, s, t), shift, 1e-9);
    for (double t : ts)
        for (double u : ts) {
            Point m = eval(a, t), n = eval(a, u);
            EXPECT_NEAR(h->distance(scissors_translate(*h, s, m), scissors_translate(*h, s, n)).value(),
                        h->distance(m, n).value(), 1e-9);
        }
}

TEST(ScissorsProperties, ContinuityProbeMonotone)
{
    auto h = ModelSpace::hyperbolic();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> eps(0.1, 0.5);
    for (int i = 0; i < 4; ++i) {
        Scissors s = hyperbolic_scissors(*h, diameter(*h, 0.7 * i), eps(rng), eps(rng));
        double prev = 1e9;
        for (double step : {1e-2, 1e-3, 1e-4}) {
            double d = displacement_continuity_probe(*h, s, step);
            EXPECT_LT(d, prev);
            prev = d;
        }
    }
}
