#include "cat0/flatstrip.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace cat0;

namespace {

Geodesic x_axis(const ModelSpace& e) { return e.geodesic_through(e.point(0, 0), e.point(1, 0)); }

Geodesic vertical(const ModelSpace& p, int edge, const Num& offset)
{
    return p.geodesic_through(p.product_point(edge, offset, Num(0)), p.product_point(edge, offset, Num(1)));
}

}  // namespace

TEST(FlatStrip, TapeWidthValues)
{
    EXPECT_NEAR(tape_width(1).value(), 2.598076, 1e-6);
    EXPECT_NEAR(tape_width(2).value(), 1.984313, 1e-6);
    EXPECT_NEAR(tape_width(100).value(), 0.299625, 1e-6);
    EXPECT_TRUE(tape_width(1).exact());
    EXPECT_EQ(tape_width(1) * tape_width(1), Num(Rational(27, 4)));
    for (int p = 1; p < 200; ++p) EXPECT_GT(tape_width(p), tape_width(p + 1));
}

TEST(FlatStrip, MinTapeOrder)
{
    EXPECT_EQ(min_tape_order(Num(3)), 0);
    EXPECT_EQ(min_tape_order(Num(1)), 8);
    EXPECT_GT(tape_width(8), Num(1));
    EXPECT_LE(tape_width(9), Num(1));
    EXPECT_EQ(min_tape_order(Num(Rational(2598076, 1000000))), 1);
    EXPECT_EQ(min_tape_order(tape_width(1)), 0);
    for (int w100 = 10; w100 <= 400; w100 += 7) {
        Num w(Rational(w100, 100));
        int P = min_tape_order(w);
        for (int p = P + 1; p < P + 30; ++p) EXPECT_LE(tape_width(p), w);
        if (P > 0) EXPECT_GT(tape_width(P), w);
    }
}

TEST(FlatStrip, SectionsEuclidean)
{
    auto e = ModelSpace::euclidean();
    Geodesic c = x_axis(*e);
    auto l = parallel_set_sections(*e, c, {e->point(0, 1), e->point(0, 2), e->point(0, 1), e->point(2, 1)});
    // Sections are the vertical lines; (0,1) and (0,2) lie on different parallels of one section.
    EXPECT_TRUE(same_section(l[0], l[2]));
    EXPECT_TRUE(same_section(l[0], l[1]));
    EXPECT_NE(l[0].offset, l[1].offset);
    EXPECT_FALSE(same_section(l[0], l[3]));

    EXPECT_TRUE(section_below(*e, c, e->point(0, 0), e->point(1, 3)));
    EXPECT_FALSE(section_below(*e, c, e->point(1, 3), e->point(0, 0)));
    EXPECT_FALSE(section_below(*e, c, e->point(1, 0), e->point(1, 3)));
    EXPECT_FALSE(section_below(*e, c, e->point(1, 3), e->point(1, 0)));

    OracleSession s(e);
    EXPECT_EQ(section_below_oracle(s, c, e->point(0, 0), e->point(1, 3), 10), Membership::yes);
    EXPECT_EQ(section_below_oracle(s, c, e->point(1, 3), e->point(0, 0), 10), Membership::no);
}

TEST(FlatStrip, SectionsProductAndHyperbolic)
{
    auto p = ModelSpace::tree_cross_line(line_tree(2, 1));
    Geodesic c = vertical(*p, 1, Num::ratio(1, 4));
    auto l = parallel_set_sections(*p, c, {p->product_point(1, Num::ratio(3, 4), Num(2)),
                                           p->product_point(1, Num::ratio(1, 4), Num(2))});
    EXPECT_TRUE(same_section(l[0], l[1]));
    EXPECT_EQ(l[0].offset, Num::ratio(1, 2));

    auto h = ModelSpace::hyperbolic();
    Geodesic g = h->geodesic_through(h->origin(), h->polar(1.0, 0.0));
    EXPECT_THROW(parallel_set_sections(*h, g, {h->polar(0.5, 1.5)}), GeometryError);
    EXPECT_NO_THROW(parallel_set_sections(*h, g, {h->polar(0.5, 0.0)}));
}

TEST(FlatStrip, BuildTapeEuclidean)
{
    OracleSession s(ModelSpace::euclidean());
    auto& e = s.space();
    Geodesic c = x_axis(e);
    FlatStrip strip = make_flat_strip(s.space_ptr(), c, Num(3));
    Tape t = build_tape(s, strip, make_rsequence(c, Num(0)), 1);
    EXPECT_EQ(t.relations().size(), 2u);
    for (int z = -2; z <= 2; ++z) EXPECT_TRUE(e.same_point(t.at(0, 1, z), e.point(z, 0)));
    EXPECT_TRUE(s.audit());
    EXPECT_THROW(build_tape(s, make_flat_strip(s.space_ptr(), c, Num(1)), make_rsequence(c, Num(0)), 8),
                 GeometryError);
}

TEST(FlatStrip, BuildTapeProduct)
{
    OracleSession s(ModelSpace::tree_cross_line(line_tree(2, 1)));
    auto& p = s.space();
    Geodesic c = vertical(p, 1, Num::ratio(1, 2));
    FlatStrip strip = make_flat_strip(s.space_ptr(), c, Num(1), p.product_point(2, Num(0), Num(0)));
    Tape t9 = build_tape(s, strip, make_rsequence(c, Num(0)), 9);
    EXPECT_EQ(t9.relations().size(), 18u);
    EXPECT_THROW(build_tape(s, strip, make_rsequence(c, Num(0)), 8), GeometryError);
}

TEST(FlatStrip, TapePolygonIsometric)
{
    // The p = 2 tape crossing a tree vertex: chart distances are Euclidean.
    auto sp = ModelSpace::tree_cross_line(line_tree(2, 1));
    Geodesic c = vertical(*sp, 1, Num::ratio(1, 2));
    FlatStrip strip = make_flat_strip(sp, c, Num(0), sp->product_point(2, Num(0), Num(0)));
    Tape t = layout_tape(strip, Num(0), 2);
    std::vector<std::pair<Num, Num>> uv;
    std::vector<Point> pts;
    for (int i = 0; i < 4; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int z = -1; z <= 3; ++z) {
                uv.emplace_back(t.offset(i), t.phase(i, j) + Num(z));
                pts.push_back(t.at(i, j, z));
            }
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            double du = (uv[a].first - uv[b].first).value(), dv = (uv[a].second - uv[b].second).value();
            EXPECT_NEAR(sp->distance(pts[a], pts[b]).value(), std::hypot(du, dv), 1e-9);
        }
}

TEST(FlatStrip, RationalIndexExamples)
{
    RationalIndex a = rational_index(Rational(2, 3), 3);
    EXPECT_EQ(a.j, 2);
    EXPECT_EQ(a.z, -1);
    EXPECT_EQ(rational_index_as_printed(Rational(2, 3), 3).j, 3);
    RationalIndex b = rational_index(Rational(1, 2), 4);
    EXPECT_EQ(b.j, 3);
    EXPECT_EQ(b.z, -3);
    EXPECT_EQ(rational_index_as_printed(Rational(1, 2), 4).z, -3);
    RationalIndex c = rational_index(Rational(5), 7);
    EXPECT_EQ(c.j, 1);
    EXPECT_EQ(c.z, 5);
    EXPECT_THROW(rational_index(Rational(1, 3), 4), GeometryError);

    auto e = ModelSpace::euclidean();
    Geodesic g = x_axis(*e);
    Tape t = layout_tape(make_flat_strip(e, g, Num(0)), Num(0), 3);
    RationalPoint rp = rational_point(t, Rational(2, 3));
    EXPECT_TRUE(e->same_point(rp.point, e->point(Num::ratio(2, 3), Num(0))));
    EXPECT_TRUE(e->same_point(rational_point(t, Rational(2)).point, t.at(0, 1, 2)));
}

TEST(FlatStrip, RationalIndexMatchesEnumeration)
{
    auto e = ModelSpace::euclidean();
    Geodesic g = x_axis(*e);
    for (int p = 1; p <= 12; ++p) {
        Tape t = layout_tape(make_flat_strip(e, g, Num(0)), Num(0), p);
        // The enumeration is a bijection between j in 1..p and the residues of q modulo 1/p.
        std::set<Rational> seen;
        for (long long j = 1; j <= p; ++j) {
            Rational v = t.phase(0, j).as_rational();
            v -= Rational(static_cast<long long>(std::floor(v.convert_to<double>())));
            seen.insert(v);
        }
        EXPECT_EQ(seen.size(), static_cast<std::size_t>(p));
        for (int n = 1; n <= 6; ++n) {
            if (p % n) continue;
            for (int m = -2 * n; m <= 4 * n; ++m) {
                Rational q(m, n);
                auto brute = rational_index_search(q, p);
                ASSERT_TRUE(brute);
                RationalIndex ix = rational_index(q, p);
                EXPECT_EQ(ix.j, brute->j) << q << " p=" << p;
                EXPECT_EQ(ix.z, brute->z) << q << " p=" << p;
                EXPECT_TRUE(e->same_point(t.at(0, ix.j, ix.z), e->point(Num(q), Num(0))));
            }
        }
    }
}

TEST(FlatStrip, WidthAndSubdivisionLaws)
{
    auto e = ModelSpace::euclidean();
    Geodesic g = e->geodesic_through(e->point(1, 2), e->point(Num::ratio(8, 5), Num::ratio(14, 5)));
    for (int p = 1; p <= 8; ++p) {
        Tape t = layout_tape(make_flat_strip(e, g, Num(0)), Num::ratio(1, 3), p);
        Geodesic outer = t.sequence(3, 1).carrier;
        for (int z = -2; z <= 2; ++z) {
            Point x = t.at(0, 1, z);
            double sep = e->distance(x, eval(outer, e->project(x, outer).t)).value();
            EXPECT_NEAR(sep, tape_width(p).value(), 1e-9);
        }
        // Base tape points on [x_{0,1,0}, x_{0,1,2p-1}] split it into p(2p-1) equal parts.
        std::vector<double> d;
        for (long long j = 1; j <= p; ++j)
            for (long long z = -2 * p; z <= 2 * p; ++z) {
                double v = e->distance(t.at(0, 1, 0), t.at(0, j, z)).value();
                Num ph = t.phase(0, j) + Num(z) - t.t0;
                if (ph.sign() >= 0 && ph <= Num(2 * p - 1)) d.push_back(v);
            }
        std::sort(d.begin(), d.end());
        ASSERT_EQ(d.size(), static_cast<std::size_t>(p * (2 * p - 1) + 1));
        for (std::size_t k = 1; k < d.size(); ++k) EXPECT_NEAR(d[k] - d[k - 1], 1.0 / p, 1e-9);
    }
}

TEST(FlatStrip, TapeCsv)
{
    auto e = ModelSpace::euclidean();
    Tape t = layout_tape(make_flat_strip(e, x_axis(*e), Num(0)), Num(0), 3);
    std::ostringstream os;
    t.export_csv(os, 2);
    std::string s = os.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 4 * 3 * 5);
    EXPECT_EQ(s.substr(0, s.find('\n')), "i,j,z,c0,c1,c2");
}

TEST(FlatStrip, ReconstructExamples)
{
    OracleSession s(ModelSpace::euclidean());
    auto& e = s.space();
    Geodesic c = x_axis(e);
    auto r = reconstruct_flat(s, c, Num(0), Num(Rational(29, 4)), 1e-9);
    ASSERT_TRUE(r.exact);
    EXPECT_EQ(*r.exact, Rational(29, 4));
    EXPECT_EQ(r.tape_order, 12);
    EXPECT_GT(r.queries, 0u);
    auto z = reconstruct_flat(s, c, Num(2), Num(2), 1e-9);
    EXPECT_EQ(*z.exact, Rational(0));

    OracleSession fs(ModelSpace::euclidean(NumericMode::float_with_tolerance));
    auto& f = fs.space();
    auto ir = reconstruct_flat(fs, x_axis(f), Num(0.0), Num(std::sqrt(2.0)), 1e-6);
    EXPECT_NEAR(ir.estimate, std::sqrt(2.0), 1e-6);
    EXPECT_LE(ir.hi - ir.lo, 1e-6);
    EXPECT_LE(ir.lo, std::sqrt(2.0));
    EXPECT_GE(ir.hi, std::sqrt(2.0));

    OracleSession hs(ModelSpace::hyperbolic());
    auto& h = hs.space();
    FlatConfig small;
    small.rank = RankConfig{4, 4, 8};
    EXPECT_THROW(reconstruct_flat(hs, h.geodesic_through(h.origin(), h.polar(1, 0)), Num(0.0), Num(1.5), 1e-6, small),
                 GeometryError);
}

TEST(FlatStripProperties, ReconstructionMatchesModel)
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> num(-40, 40), den(1, 6);
    std::uniform_real_distribution<double> real(-5.0, 5.0);
    auto ex = ModelSpace::euclidean();
    auto pr = ModelSpace::tree_cross_line(line_tree(2, 1));
    auto fe = ModelSpace::euclidean(NumericMode::float_with_tolerance);
    auto fp = ModelSpace::tree_cross_line(line_tree(2, 1), NumericMode::float_with_tolerance);
    for (int i = 0; i < 8; ++i) {
        // Exact rationals on a slanted euclidean line and on a sloped product line.
        {
            OracleSession s(ex);
            Geodesic c = ex->geodesic_through(ex->point(1, 1), ex->point(Num::ratio(9, 5), Num::ratio(8, 5)));
            Num a(Rational(num(rng), den(rng))), b(Rational(num(rng), den(rng)));
            auto r = reconstruct_flat(s, c, a, b, 1e-9);
            EXPECT_EQ(Num(*r.exact), ex->distance(eval(c, a), eval(c, b)));
        }
        {
            OracleSession s(pr);
            Geodesic c = vertical(*pr, 2, Num::ratio(1, 3));
            Num a(Rational(num(rng), den(rng))), b(Rational(num(rng), den(rng)));
            auto r = reconstruct_flat(s, c, a, b, 1e-9);
            EXPECT_EQ(Num(*r.exact), pr->distance(eval(c, a), eval(c, b)));
        }
        for (const auto& sp : {fe, fp}) {
            OracleSession s(sp);
            Geodesic c = sp->kind() == SpaceKind::euclidean_plane
                             ? sp->geodesic_through(sp->point(0.3, -1.0), sp->point(1.1, -0.4))
                             : sp->geodesic_through(sp->product_point(0, Num(0.5), Num(0.0)),
                                                    sp->product_point(3, Num(0.5), Num(1.0)));
            double a = real(rng), b = real(rng);
            auto r = reconstruct_flat(s, c, Num(a), Num(b), 1e-6);
            EXPECT_NEAR(r.estimate, sp->distance(eval(c, a), eval(c, b)).value(), 1e-6);
        }
    }
}
