#include "cat0/flatstrip.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cat0 {

// ---------------------------------------------------------------------------
// Strips

Geodesic FlatStrip::line_at(const Num& u) const
{
    Geodesic g = c;
    switch (c.kind) {
    case SpaceKind::euclidean_plane:
        g.px = c.px - Num(sigma) * u * c.ey;
        g.py = c.py + Num(sigma) * u * c.ex;
        return g;
    case SpaceKind::tree_cross_line:
        if (c.alpha.sign() == 0) {
            g.foot = space->tree_part(eval(across, u));
            return g;
        } else {
            // Flat coordinates: tree arclength alpha v - sigma beta u, height h0 + beta v + sigma alpha u.
            Num shift = Num(sigma) * u * c.beta;
            for (auto& leg : g.legs) {
                leg.t_ref = leg.t_ref + shift;
                if (!leg.lo_inf) leg.lo = leg.lo + shift;
                if (!leg.hi_inf) leg.hi = leg.hi + shift;
            }
            g.h0 = c.h0 + Num(sigma) * u * c.alpha;
            return g;
        }
    default: throw GeometryError("geodesic bounds no flat strip");
    }
}

FlatStrip make_flat_strip(SpacePtr space, const Geodesic& c, const Num& width, const std::optional<Point>& toward)
{
    if (c.domain != Domain::complete) throw GeometryError("strip boundary must be a complete geodesic");
    if (width.sign() < 0) throw GeometryError("strip width must be positive");
    if (!space->bounds_flat_strip(c) || space->kind() == SpaceKind::hyperbolic_plane ||
        space->kind() == SpaceKind::metric_tree)
        throw GeometryError("geodesic bounds no flat strip");
    FlatStrip s;
    s.space = space;
    s.c = c;
    s.width = width;
    s.unbounded = width.sign() == 0;

    if (space->kind() == SpaceKind::tree_cross_line && c.alpha.sign() == 0) {
        Point foot = space->tree_part(c.foot);
        Point q;
        bool have = false;
        if (toward) {
            q = space->tree_part(*toward);
            have = !space->same_point(space->product_point(q.edge, q.offset, Num(0)),
                                      space->product_point(foot.edge, foot.offset, Num(0)));
        }
        if (!have) {
            auto ring = space->tree_sphere(foot, Num(1), nullptr, 1);
            if (ring.empty()) throw GeometryError("no tree direction at the strip foot");
            q = ring.front();
        }
        Num h = c.h0;
        s.across = space->geodesic_through(space->product_point(foot.edge, foot.offset, h),
                                           space->product_point(q.edge, q.offset, h));
        return s;
    }
    if (toward) {
        Num t = space->project(*toward, c).t;
        Num u = space->distance(*toward, eval(c, t));
        double best = 0.0;
        for (int sg : {1, -1}) {
            FlatStrip probe = s;
            probe.sigma = sg;
            double d = space->distance(*toward, probe.chart(u, t)).value();
            if (sg == 1 || d < best) {
                best = d;
                s.sigma = sg;
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Sections

bool same_section(const SectionLabel& a, const SectionLabel& b)
{
    if (a.beta_plus.exact() && b.beta_plus.exact()) return a.beta_plus == b.beta_plus;
    return std::abs(a.beta_plus.value() - b.beta_plus.value()) <= 1e-9;
}

std::vector<SectionLabel> parallel_set_sections(const ModelSpace& space, const Geodesic& c,
                                                const std::vector<Point>& probes)
{
    IdealPoint plus = space.ideal_end(c, 1), minus = space.ideal_end(c, -1);
    Point base = eval(c, space.exact() ? Num(0) : Num(0.0));
    std::vector<SectionLabel> out;
    for (const Point& y : probes) {
        SectionLabel l;
        l.beta_minus = space.busemann(minus, base, y);
        l.beta_plus = space.busemann(plus, base, y);
        // Points of the parallel set see both ends at angle pi, which is a
        // zero Busemann sum; elsewhere the sum is positive.
        Num sum = l.beta_minus + l.beta_plus;
        bool on = sum.exact() ? sum.sign() == 0 : std::abs(sum.value()) <= 1e-9;
        if (!on) throw GeometryError("probe " + describe(y) + " is not in the parallel set");
        l.offset = space.distance(y, eval(c, space.project(y, c).t));
        out.push_back(l);
    }
    return out;
}

bool section_below(const ModelSpace& space, const Geodesic& c, const Point& x, const Point& y)
{
    auto l = parallel_set_sections(space, c, {x, y});
    if (same_section(l[0], l[1])) return false;
    return l[0].beta_plus > l[1].beta_plus;
}

Membership section_below_oracle(OracleSession& session, const Geodesic& c, const Point& x, const Point& y,
                                int n_max)
{
    const ModelSpace& space = session.space();
    parallel_set_sections(space, c, {x, y});
    Geodesic through = space.geodesic_between_ideals(space.ideal_end(c, 1), space.ideal_end(c, -1), x);
    RSequence s = make_rsequence(through, space.exact() ? Num(0) : Num(0.0));
    switch (session.horoball_member(s, 0, y, n_max)) {
    case HoroVerdict::inside: return Membership::yes;
    case HoroVerdict::outside:
    case HoroVerdict::on_horosphere: return Membership::no;
    case HoroVerdict::indeterminate: return Membership::indeterminate;
    }
    return Membership::indeterminate;
}

// ---------------------------------------------------------------------------
// Tapes

Num tape_width(int p)
{
    if (p < 1) throw std::invalid_argument("tape order must be positive");
    return Num(3) * sqrt(Num(Rational(4 * p - 1))) / Num(2 * p);
}

int min_tape_order(const Num& w)
{
    if (w.sign() <= 0) throw std::invalid_argument("strip width must be positive");
    // s(p) <= w  <=>  4 w^2 p^2 - 36 p + 9 >= 0, and s decreases for p >= 1.
    double wv = w.value();
    double disc = 1296.0 - 144.0 * wv * wv;
    long long first = 1;
    if (disc > 0) first = std::max<long long>(1, static_cast<long long>(std::ceil((36.0 + std::sqrt(disc)) / (8.0 * wv * wv))));
    while (first > 1 && tape_width(static_cast<int>(first - 1)) <= w) --first;
    while (tape_width(static_cast<int>(first)) > w) ++first;
    return static_cast<int>(first - 1);
}

Num Tape::phase(int i, long long j) const
{
    return t0 + step * Num(j - 1) + step * Num(i) / Num(2);
}

Point Tape::at(int i, long long j, long long z) const
{
    return strip.chart(offset(i), phase(i, j) + Num(z));
}

RSequence Tape::sequence(int i, long long j) const
{
    return make_rsequence(strip.line_at(offset(i)), phase(i, j));
}

std::vector<std::vector<TapeIndex>> Tape::relations() const
{
    auto wrap = [this](int i, long long j, long long z) {
        // x_{i, j + p, z} = x_{i, j, z + 2p - 1}
        while (j > p) { j -= p; z += 2 * p - 1; }
        while (j < 1) { j += p; z -= 2 * p - 1; }
        return TapeIndex{i, j, z};
    };
    std::vector<std::vector<TapeIndex>> out;
    for (long long j = 1; j <= p; ++j)
        out.push_back({wrap(0, j, 0), wrap(1, j, 0), wrap(2, j, 0), wrap(3, j, 0)});
    for (long long j = 1; j <= p; ++j)
        out.push_back({wrap(0, j + 1, 0), wrap(1, j, 0), wrap(2, j - 1, 0), wrap(3, j - 2, 0)});
    return out;
}

void Tape::export_csv(std::ostream& out, int window) const
{
    out << "i,j,z,c0,c1,c2\n";
    char buf[40];
    for (int i = 0; i < 4; ++i)
        for (long long j = 1; j <= p; ++j)
            for (long long z = -window; z <= window; ++z) {
                auto cc = chart_coordinates(at(i, j, z));
                cc.resize(3, 0.0);
                out << i << "," << j << "," << z;
                for (double v : cc) {
                    std::snprintf(buf, sizeof buf, "%.17g", v);
                    out << "," << buf;
                }
                out << "\n";
            }
}

Tape layout_tape(const FlatStrip& strip, const Num& t0, int p)
{
    if (p < 1) throw std::invalid_argument("tape order must be positive");
    Num s = tape_width(p);
    if (!strip.unbounded && s > strip.width)
        throw GeometryError("strip too narrow for a " + std::to_string(p) + "-tape");
    const bool exact = strip.space->exact();
    Tape t;
    t.p = p;
    t.strip = strip;
    t.t0 = t0;
    t.step = exact ? Num(Rational(2 * p - 1, p)) : Num(static_cast<double>(2 * p - 1) / p);
    t.row = exact ? s / Num(3) : Num(s.value() / 3.0);
    return t;
}

Membership certify_tape(OracleSession& session, const Tape& tape)
{
    bool undecided = false;
    for (const auto& quad : tape.relations()) {
        std::vector<Point> chain;
        for (const auto& ix : quad) chain.push_back(tape.at(ix));
        Membership m = session.certify_chain(chain, Relation::boundary);
        if (m == Membership::no) return m;
        if (m == Membership::indeterminate) undecided = true;
    }
    for (int i = 0; i < 4; ++i)
        for (long long j = 1; j <= tape.p; ++j) {
            Membership m = verify_rsequence(session, tape.sequence(i, j).window(0, 1));
            if (m == Membership::no) return m;
            if (m == Membership::indeterminate) undecided = true;
        }
    return undecided ? Membership::indeterminate : Membership::yes;
}

Tape build_tape(OracleSession& session, const FlatStrip& strip, const RSequence& base, int p)
{
    Tape t = layout_tape(strip, base.t0, p);
    Membership m = certify_tape(session, t);
    if (m != Membership::yes) throw GeometryError("tape relations not certified: " + to_string(m));
    return t;
}

namespace {

struct Split {
    long long n, k, qp, mp;
};

Split split_rational(const Rational& q, int p)
{
    long long n = boost::multiprecision::denominator(q).convert_to<long long>();
    if (p < 1 || p % n != 0) throw GeometryError("tape order must be a multiple of the denominator");
    Rational r = q - Rational(1, n);
    Integer fl = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
    if (fl * boost::multiprecision::denominator(r) > boost::multiprecision::numerator(r)) fl -= 1;
    long long qp = fl.convert_to<long long>();
    Rational frac = (r - Rational(qp)) * Rational(n);
    long long mp = boost::multiprecision::numerator(frac).convert_to<long long>();
    return {n, p / n, qp, mp};
}

}  // namespace

RationalIndex rational_index(const Rational& q, int p)
{
    Split s = split_rational(q, p);
    return {p + 1 - s.k * (s.mp + 1), s.qp + 1 - 2LL * p + 2 * s.k * (s.mp + 1)};
}

RationalIndex rational_index_as_printed(const Rational& q, int p)
{
    Split s = split_rational(q, p);
    return {s.n + 1 - s.k * s.mp, s.qp + 1 - 2LL * p + 2 * s.k * (s.mp + 1)};
}

std::optional<RationalIndex> rational_index_search(const Rational& q, int p)
{
    for (long long j = 1; j <= p; ++j) {
        Rational z = q - Rational((j - 1) * (2LL * p - 1), p);
        if (boost::multiprecision::denominator(z) == 1)
            return RationalIndex{j, boost::multiprecision::numerator(z).convert_to<long long>()};
    }
    return std::nullopt;
}

RationalPoint rational_point(const Tape& tape, const Rational& q)
{
    RationalIndex ix = rational_index(q, tape.p);
    Point pt = tape.at(0, ix.j, ix.z);
    const ModelSpace& space = *tape.strip.space;
    double d = space.distance(tape.at(0, 1, 0), pt).value();
    if (std::abs(d - std::abs(q.convert_to<double>())) > 1e-9)
        throw GeometryError("rational tape point failed the distance check");
    return {pt, ix};
}

// ---------------------------------------------------------------------------
// Reconstruction

namespace {

/// Continued-fraction convergents of x, stopping once exact or on overflow.
std::vector<std::pair<long long, long long>> convergents(double x, int limit)
{
    std::vector<std::pair<long long, long long>> out;
    long double h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // h_{-1}, h_{-2}, ...
    long double r = x;
    for (int i = 0; i < limit; ++i) {
        long double a = std::floor(r);
        long double h = a * h0 + h1, k = a * k0 + k1;
        if (std::abs(h) > 9e15L || k > 9e15L) break;
        out.emplace_back(static_cast<long long>(h), static_cast<long long>(k));
        long double frac = r - a;
        if (frac < 1e-18L) break;
        r = 1.0L / frac;
        h1 = h0; h0 = h;
        k1 = k0; k0 = k;
    }
    return out;
}

}  // namespace

FlatReconstruction reconstruct_flat(OracleSession& session, const Geodesic& c, const Num& t1, const Num& t2,
                                    double tol, const FlatConfig& config)
{
    if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
    const ModelSpace& space = session.space();
    const std::uint64_t q0 = session.query_count();
    RankResult rank = rank_classify(session, make_rsequence(c, t1), config.rank);
    if (rank.rank != Rank::higher_rank) throw GeometryError("geodesic does not host a higher-rank r-sequence");

    FlatReconstruction out;
    Num lo_t = min(t1, t2), hi_t = max(t1, t2);
    Point target = eval(c, hi_t);
    Num d = hi_t - lo_t;
    if (d.sign() == 0) {
        out.exact = Rational(0);
        out.queries = session.query_count() - q0;
        return out;
    }

    if (space.exact() && d.rational()) {
        // Rational path: the target is a vertex of a certified tape.
        Rational q = d.as_rational();
        long long n = boost::multiprecision::denominator(q).convert_to<long long>();
        FlatStrip strip = make_flat_strip(session.space_ptr(), c, Num(1), rank.witness->at(0));
        long long need = min_tape_order(Num(1)) + 1;
        long long k = (need + n - 1) / n;
        int p = static_cast<int>(k * n);
        Tape tape = build_tape(session, strip, make_rsequence(c, lo_t), p);
        RationalPoint rp = rational_point(tape, q);
        if (!space.same_point(rp.point, target)) throw GeometryError("tape point does not match the target");
        out.exact = q;
        out.estimate = out.lo = out.hi = q.convert_to<double>();
        out.tape_order = p;
        out.queries = session.query_count() - q0;
        return out;
    }

    // Bracketing: a < D < b certified by c(t) in Int B(c(a + 1), 1) and Int B(c(b - 1), 1).
    const double dv = d.value();
    auto on_c = [&](double s) { return eval(c, Num(lo_t.value() + s)); };
    auto interior = [&](double s) {
        return session.relation_member(target, on_c(s), RelationKind{Relation::interior, 1}) == Membership::yes;
    };
    double lo = -1.0, hi = -1.0;
    bool have_lo = false, have_hi = false;
    auto conv = convergents(dv, config.budget);
    for (const auto& [h, k] : conv) {
        ++out.iterations;
        double r = static_cast<double>(h) / static_cast<double>(k);
        if (r < dv) {
            if ((!have_lo || r > lo) && interior(r + 1.0)) { lo = r; have_lo = true; }
        } else if (r > dv) {
            if ((!have_hi || r < hi) && interior(r - 1.0)) { hi = r; have_hi = true; }
        } else {
            // The convergent hits the value: both unit spheres pass through the target.
            if (session.classify(target, on_c(r + 1.0), "bracket") == Side::on &&
                session.classify(target, on_c(r - 1.0), "bracket") == Side::on) {
                lo = hi = r;
                have_lo = have_hi = true;
            }
        }
        if (have_lo && have_hi && hi - lo <= tol) break;
    }
    if (!(have_lo && have_hi && hi - lo <= tol)) throw GeometryError("tolerance not reached within the budget");
    out.lo = lo;
    out.hi = hi;
    out.estimate = 0.5 * (lo + hi);
    out.queries = session.query_count() - q0;
    return out;
}

}  // namespace cat0
