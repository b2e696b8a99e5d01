#include "cat0/sequences.hpp"

#include <algorithm>

namespace cat0 {

std::string to_string(ParallelVerdict::Kind k)
{
    switch (k) {
    case ParallelVerdict::Kind::equivalent: return "equivalent";
    case ParallelVerdict::Kind::not_equivalent: return "not_equivalent";
    case ParallelVerdict::Kind::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(Rank r)
{
    switch (r) {
    case Rank::rank_one: return "rank_one";
    case Rank::higher_rank: return "higher_rank";
    case Rank::inconclusive: return "inconclusive";
    }
    return "?";
}

Membership verify_rsequence(OracleSession& session, const std::vector<Point>& window, const WitnessSource& witnesses)
{
    if (window.size() < 3 || window.size() % 2 == 0) throw std::invalid_argument("window must hold 2m+1 points, m >= 1");
    bool undecided = false;
    for (std::size_t i = 0; i < window.size(); ++i) {
        for (std::size_t j = i + 1; j < window.size(); ++j) {
            std::vector<Point> chain(window.begin() + i, window.begin() + j + 1);
            Membership m = session.certify_chain(chain, Relation::boundary, witnesses);
            if (m == Membership::no) return m;
            if (m == Membership::indeterminate) undecided = true;
        }
    }
    return undecided ? Membership::indeterminate : Membership::yes;
}

int certified_level(OracleSession& session, const Point& x, const Point& y, int cap)
{
    auto in = [&](int k) {
        return session.relation_member(x, y, RelationKind{Relation::closed, k}) == Membership::yes;
    };
    // Levels are monotone in k: gallop, then bisect between a failure and a success.
    int lo = 0, hi = 1;
    while (!in(hi)) {
        lo = hi;
        if (hi >= cap) return cap + 1;
        hi = std::min(2 * hi, cap);
    }
    while (hi - lo > 1) {
        int mid = lo + (hi - lo) / 2;
        if (in(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

ParallelVerdict parallel_equivalent(OracleSession& session, const RSequence& s1, const RSequence& s2, int k_max,
                                    int window)
{
    if (k_max < 1 || window < 1) throw std::invalid_argument("k_max and window must be positive");
    ParallelVerdict v;
    v.window = window;
    auto level = [&](long long z, int cap) { return certified_level(session, s1.at(z), s2.at(z), cap); };

    int worst = 0;
    for (long long z = -window; z <= window && worst <= k_max; ++z) worst = std::max(worst, level(z, k_max));

    if (worst <= k_max) {
        // Doubling certificate: the bound has to persist at twice the window.
        if (level(-2LL * window, worst) <= worst && level(2LL * window, worst) <= worst) {
            v.kind = ParallelVerdict::Kind::equivalent;
            v.k = worst;
            return v;
        }
    }
    // Growth test on uncapped endpoint levels.
    const int cap = 4 * (k_max + 2 * window);
    for (long long side : {-1LL, 1LL}) {
        int inner = level(side * window, cap);
        int outer = level(side * 2 * window, cap);
        if (outer <= cap && outer > inner) {
            v.kind = ParallelVerdict::Kind::not_equivalent;
            return v;
        }
    }
    v.kind = ParallelVerdict::Kind::inconclusive;
    return v;
}

std::vector<RSequence> parallel_candidates(const ModelSpace& space, const RSequence& s, int density)
{
    std::vector<RSequence> out;
    const Geodesic& c = s.carrier;
    switch (space.kind()) {
    case SpaceKind::euclidean_plane:
        // Unit normal shifts of the carrier.
        for (int sigma : {1, -1}) {
            Geodesic g = c;
            g.px = c.px - Num(sigma) * c.ey;
            g.py = c.py + Num(sigma) * c.ex;
            out.push_back(make_rsequence(g, s.t0));
        }
        break;
    case SpaceKind::tree_cross_line:
        if (c.alpha.sign() == 0) {
            // Vertical line: neighbouring vertical lines at tree distance 1.
            for (const Point& q : space.tree_sphere(c.foot, Num(1), nullptr, std::max(density, 1))) {
                Geodesic g = c;
                g.foot = space.tree_part(q);
                out.push_back(make_rsequence(g, s.t0));
            }
        } else {
            // Shift inside the flat spanned by the tree line: normal (-beta, alpha).
            for (int sigma : {1, -1}) {
                Geodesic g = c;
                Num shift = Num(sigma) * c.beta;
                for (auto& leg : g.legs) {
                    leg.t_ref = leg.t_ref + shift;
                    leg.lo = leg.lo + shift;
                    leg.hi = leg.hi + shift;
                }
                g.h0 = c.h0 + Num(sigma) * c.alpha;
                out.push_back(make_rsequence(g, s.t0));
            }
        }
        break;
    case SpaceKind::hyperbolic_plane:
    case SpaceKind::metric_tree: {
        // Lines through unit-sphere points aimed at far sequence points on either side.
        const long long reach = 8;
        Point x0 = s.at(0);
        for (const Point& q : space.sphere_sample(x0, space.num(Rational(1)), density)) {
            for (long long side : {reach, -reach}) {
                Point target = s.at(side);
                if (space.same_point(q, target)) continue;
                Geodesic g = space.geodesic_through(q, target);
                if (side < 0) g = reversed(g);
                if (g.domain != Domain::complete) continue;
                out.push_back(make_rsequence(g, Num(0)));
            }
        }
        break;
    }
    }
    return out;
}

RankResult rank_classify(OracleSession& session, const RSequence& s, const RankConfig& config)
{
    const ModelSpace& space = session.space();
    RankResult result;
    Point x0 = s.at(0), xp = s.at(1), xm = s.at(-1);
    for (const RSequence& y : parallel_candidates(space, s, config.density)) {
        ++result.candidates_tried;
        Point y0 = y.at(0);
        if (space.distance(y0, xp).value() < 1e-6 || space.distance(y0, xm).value() < 1e-6) continue;
        if (session.classify(x0, y0, "rank") != Side::on) continue;
        auto v = parallel_equivalent(session, s, y, config.k_max, config.window);
        if (v.kind == ParallelVerdict::Kind::equivalent) {
            result.rank = Rank::higher_rank;
            result.witness = y;
            return result;
        }
    }
    result.rank = space.bounds_flat_strip(s.carrier) ? Rank::inconclusive : Rank::rank_one;
    return result;
}

}  // namespace cat0
