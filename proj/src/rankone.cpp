#include "cat0/rankone.hpp"

#include "cat0/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

namespace cat0 {

namespace {

using Vec3 = std::array<double, 3>;

constexpr double kOnLine = 1e-9;
/// Rungs up to 2^-8: beyond that the accumulated shift error of 2^j steps exceeds the oracle band.
constexpr int kCertifiedRungs = 8;

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void require_hyperbolic(const ModelSpace& space, const char* what)
{
    if (space.kind() != SpaceKind::hyperbolic_plane) throw GeometryError(std::string(what) + " needs the hyperbolic plane");
}

/// |a - b| within the comparison band of the space.
bool near_equal(const Num& a, const Num& b)
{
    if (a.exact() && b.exact()) {
        Num d = a - b;
        if (d.exact()) return d.sign() == 0;
    }
    return std::abs(a.value() - b.value()) <= kOnLine;
}

double off_line(const ModelSpace& space, const Point& p, const Geodesic& c)
{
    return space.distance(p, space.project(p, c).foot).value();
}

/// Parameter where b meets the plane of c; nullopt when they do not cross.
std::optional<double> crossing_parameter(const Geodesic& b, const Geodesic& c)
{
    // <J w, v> = w . v, so the Lorentz normal of the plane of c pairs with v by a Euclidean dot.
    Vec3 n = cross(c.P, c.U);
    double p = dot(b.P, n), u = dot(b.U, n);
    if (std::abs(u) <= std::abs(p)) return std::nullopt;
    return std::atanh(-p / u);
}

struct Ends {
    double plus = 0.0, minus = 0.0;
};

Ends ends_of(const ModelSpace& space, const Geodesic& a)
{
    return {space.ideal_end(a, 1).theta, space.ideal_end(a, -1).theta};
}

struct Frame {
    IdealPoint xi, eta;
    Geodesic b, c, d;
};

Frame frame(const ModelSpace& space, const Geodesic& a, const Ends& e, double eps_xi, double eps_eta, int side)
{
    Frame f;
    f.xi = space.boundary_angle(e.plus + side * eps_xi);
    f.eta = space.boundary_angle(e.minus - side * eps_eta);
    Point o = space.origin();
    f.b = space.geodesic_between_ideals(f.xi, space.ideal_end(a, -1), o);
    f.c = space.geodesic_between_ideals(space.ideal_end(a, 1), f.eta, o);
    f.d = space.geodesic_between_ideals(f.xi, f.eta, o);
    return f;
}

/// Center of the scissors with the given offsets; nullopt when b and c miss.
std::optional<Point> center(const ModelSpace& space, const Geodesic& a, const Ends& e, double eps_xi, double eps_eta,
                            int side)
{
    Point o = space.origin();
    Geodesic b = space.geodesic_between_ideals(space.boundary_angle(e.plus + side * eps_xi), space.ideal_end(a, -1), o);
    Geodesic c = space.geodesic_between_ideals(space.ideal_end(a, 1), space.boundary_angle(e.minus - side * eps_eta), o);
    auto t = crossing_parameter(b, c);
    if (!t) return std::nullopt;
    return eval(b, *t);
}

double arc_between(double from, double to)
{
    double d = std::fmod(to - from, 2 * std::numbers::pi);
    return d < 0 ? d + 2 * std::numbers::pi : d;
}

double arc_of(const ModelSpace& space, const Geodesic& a, int side)
{
    Ends e = ends_of(space, a);
    return side > 0 ? arc_between(e.plus, e.minus) : arc_between(e.minus, e.plus);
}

/// Offsets sigma e^lambda and sigma e^-lambda stay below the radius and leave room on the arc.
constexpr double kArcUse = 0.98;

double sigma_cap(double arc, double radius) { return std::min(radius, kArcUse * arc / 2); }

struct Member {
    Scissors s;
    double delta = 0.0;
};

/// Scissors at scale sigma whose center projects onto a at parameter t0.
std::optional<Member> centered_member(const ModelSpace& space, const Geodesic& a, double t0, double radius,
                                      double sigma, int side)
{
    const double arc = arc_of(space, a, side);
    if (!(sigma > 0) || sigma >= sigma_cap(arc, radius)) return std::nullopt;
    Ends e = ends_of(space, a);
    const double reach = std::min(std::log(radius / sigma), std::acosh(kArcUse * arc / (2 * sigma)));
    auto f = [&](double lambda) -> std::optional<double> {
        auto x = center(space, a, e, sigma * std::exp(lambda), sigma * std::exp(-lambda), side);
        if (!x) return std::nullopt;
        return space.project(*x, a).t.value() - t0;
    };
    double lo = -reach, hi = reach;
    auto flo = f(lo), fhi = f(hi);
    if (!flo || !fhi || (*flo > 0) == (*fhi > 0)) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        auto fm = f(mid);
        if (!fm) return std::nullopt;
        if ((*fm > 0) == (*flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double lambda = 0.5 * (lo + hi);
    Member m;
    try {
        m.s = hyperbolic_scissors(space, a, sigma * std::exp(lambda), sigma * std::exp(-lambda), side);
    } catch (const GeometryError&) {
        return std::nullopt;
    }
    m.delta = displacement_formula(space, m.s);
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shadows

bool shadow_member(const ModelSpace& space, const Point& y, const Point& x0, const Point& z)
{
    if (space.same_point(y, x0)) throw GeometryError("shadow apex coincides with its source");
    if (space.same_point(z, x0)) return false;
    return near_equal(space.distance(y, x0) + space.distance(x0, z), space.distance(y, z));
}

bool shadow_member(const ModelSpace& space, const Point& y, const Point& x0, const IdealPoint& z)
{
    if (space.same_point(y, x0)) throw GeometryError("shadow apex coincides with its source");
    // x0 lies on the ray [y z) iff the Busemann function of z drops by |y x0| from y to x0.
    return near_equal(space.busemann(z, y, x0), -space.distance(y, x0));
}

std::vector<Point> spherical_shadow_sample(const ModelSpace& space, const Point& y, const Point& x0, double rho,
                                           int count)
{
    if (!(rho > 0)) throw std::invalid_argument("shadow radius must be positive");
    if (space.same_point(y, x0)) throw GeometryError("shadow apex coincides with its source");
    Num r = space.num(rho);
    switch (space.kind()) {
    case SpaceKind::euclidean_plane:
    case SpaceKind::hyperbolic_plane: {
        Geodesic g = space.geodesic_through(y, x0);
        Num ty = space.project(y, g).t, tx = space.project(x0, g).t;
        Num step = tx > ty ? r : -r;
        return {eval(g, tx + step)};
    }
    case SpaceKind::metric_tree: {
        Point away = y;
        return space.tree_sphere(x0, r, &away, static_cast<std::size_t>(std::max(count, 1)));
    }
    case SpaceKind::tree_cross_line: {
        // Extend the straight line from y through x0: tree and height parts grow in proportion.
        Num total = space.distance(y, x0);
        Point ty = space.tree_part(y), tx = space.tree_part(x0);
        Num dt = space.tree_distance(ty, tx);
        Num height = x0.y + (x0.y - y.y) * r / total;
        std::vector<Point> out;
        if (dt.sign() == 0) {
            out.push_back(space.product_point(x0.edge, x0.offset, height));
            return out;
        }
        for (const Point& w : space.tree_sphere(tx, dt * r / total, &ty, static_cast<std::size_t>(std::max(count, 1))))
            out.push_back(space.product_point(w.edge, w.offset, height));
        return out;
    }
    }
    return {};
}

std::vector<ShadowProbeRow> shadow_continuity_probe(const ModelSpace& space, const Point& y, const Point& x0,
                                                    double rho, const std::vector<double>& deltas, int samples)
{
    if (space.kind() != SpaceKind::euclidean_plane && space.kind() != SpaceKind::hyperbolic_plane)
        throw GeometryError("shadow probes run in the euclidean and hyperbolic planes");
    if (samples < 1) throw std::invalid_argument("probe needs at least one sample");
    const double R = space.distance(y, x0).value();
    const Point base = spherical_shadow_sample(space, y, x0, rho, 1).front();

    // x1 on S(y, R) at turning angle phi from x0.
    std::function<Point(double)> turn;
    std::function<double(double)> angle_for;
    if (space.kind() == SpaceKind::euclidean_plane) {
        double yx = y.x.value(), yy = y.y.value();
        double ux = (x0.x.value() - yx) / R, uy = (x0.y.value() - yy) / R;
        turn = [=, &space](double phi) {
            double c = std::cos(phi), s = std::sin(phi);
            return space.point(yx + R * (c * ux - s * uy), yy + R * (s * ux + c * uy));
        };
        angle_for = [=](double delta) { return 2 * std::asin(std::min(1.0, delta / (2 * R))); };
    } else {
        Vec3 yh = y.h, xh = x0.h;
        double ch = std::cosh(R), sh = std::sinh(R);
        Vec3 u{(xh[0] - ch * yh[0]) / sh, (xh[1] - ch * yh[1]) / sh, (xh[2] - ch * yh[2]) / sh};
        Vec3 n = cross(yh, u);
        Vec3 w{-n[0], n[1], n[2]};
        double wn = std::sqrt(lorentz(w, w));
        for (double& v : w) v /= wn;
        turn = [=, &space](double phi) {
            double c = std::cos(phi), s = std::sin(phi);
            return space.hyperbolic_point(ch * yh[0] + sh * (c * u[0] + s * w[0]), ch * yh[1] + sh * (c * u[1] + s * w[1]),
                                          ch * yh[2] + sh * (c * u[2] + s * w[2]));
        };
        angle_for = [=](double delta) { return 2 * std::asin(std::min(1.0, std::sinh(delta / 2) / sh)); };
    }

    std::vector<ShadowProbeRow> rows;
    for (double delta : deltas) {
        if (!(delta > 0)) throw std::invalid_argument("probe radii must be positive");
        ShadowProbeRow row;
        row.delta = delta;
        row.similar = (R + rho) * delta / R;
        row.rho_ratio = rho * delta / R;
        const double phi = angle_for(delta);
        for (int k = 0; k < samples; ++k) {
            double f = samples == 1 ? 1.0 : -1.0 + 2.0 * k / (samples - 1);
            Point x1 = turn(f * phi);
            Point s1 = spherical_shadow_sample(space, y, x1, rho, 1).front();
            row.epsilon = std::max(row.epsilon, space.distance(s1, base).value());
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Scissors

Scissors make_scissors(const ModelSpace& space, const Geodesic& a, const Geodesic& b, const Geodesic& c,
                       const Geodesic& d, const Point& x, bool transversal)
{
    auto need = [&](const Geodesic& g, int gs, const Geodesic& h, int hs, const char* what) {
        if (!space.same_ideal(space.ideal_end(g, gs), space.ideal_end(h, hs)))
            throw GeometryError(std::string("scissors: ") + what);
    };
    need(a, -1, b, -1, "a(-inf) != b(-inf)");
    need(a, 1, c, 1, "a(+inf) != c(+inf)");
    need(c, -1, d, -1, "c(-inf) != d(-inf)");
    need(b, 1, d, 1, "b(+inf) != d(+inf)");
    if (off_line(space, x, b) > kOnLine || off_line(space, x, c) > kOnLine)
        throw GeometryError("scissors: center off b or c");
    if (transversal) {
        Num tb = space.project(x, b).t, tc = space.project(x, c).t;
        double ang = space.angle(x, space.direction_toward(x, eval(b, tb + Num(1.0))),
                                 space.direction_toward(x, eval(c, tc + Num(1.0))));
        if (ang <= 1e-6 || ang >= std::numbers::pi - 1e-6) throw GeometryError("scissors: b and c are not transversal");
    }
    Scissors s;
    s.a = a;
    s.b = b;
    s.c = c;
    s.d = d;
    s.x = x;
    s.forward = make_chain(space, {a, c, d, b, a}, {1, -1, 1, -1});
    s.backward = make_chain(space, {a, b, d, c, a}, {-1, 1, -1, 1});
    return s;
}

Scissors hyperbolic_scissors(const ModelSpace& space, const Geodesic& a, double eps_xi, double eps_eta, int side)
{
    require_hyperbolic(space, "hyperbolic_scissors");
    if (side != 1 && side != -1) throw std::invalid_argument("side must be +1 or -1");
    if (!(eps_xi > 0) || !(eps_eta > 0)) throw GeometryError("scissors offsets must be positive");
    Ends e = ends_of(space, a);
    double arc = side > 0 ? arc_between(e.plus, e.minus) : arc_between(e.minus, e.plus);
    if (eps_xi + eps_eta >= arc) throw GeometryError("scissors offsets overlap");
    Frame f = frame(space, a, e, eps_xi, eps_eta, side);
    auto t = crossing_parameter(f.b, f.c);
    if (!t) throw GeometryError("scissors: b and c do not meet");
    Scissors s = make_scissors(space, a, f.b, f.c, f.d, eval(f.b, *t));
    s.eps_xi = eps_xi;
    s.eps_eta = eps_eta;
    s.side = side;
    return s;
}

Scissors find_scissors(const ModelSpace& space, const Geodesic& a, const Point& x0, const ScissorsRequest& req)
{
    require_hyperbolic(space, "find_scissors");
    if (!(req.offset_bound > 0)) throw GeometryError("offset bound must be positive: the center has to differ from x0");
    if (off_line(space, x0, a) > kOnLine) throw GeometryError("x0 is not on a");
    const double radius = req.boundary_radius > 0 ? req.boundary_radius : arc_of(space, a, req.side) / 4;
    const double t0 = space.project(x0, a).t.value();
    double sigma = sigma_cap(arc_of(space, a, req.side), radius);
    for (int k = 0; k < req.budget; ++k) {
        sigma /= 2;
        auto m = centered_member(space, a, t0, radius, sigma, req.side);
        if (!m) continue;
        double off = space.distance(m->s.x, x0).value();
        if (off > 0 && off <= req.offset_bound) return m->s;
    }
    throw GeometryError("scissors search budget exhausted");
}

Point scissors_translate(const ModelSpace& space, const Scissors& s, const Point& m)
{
    if (off_line(space, m, s.a) > kOnLine) throw GeometryError("point is not on the lowest base");
    return chain_transfer(space, s.forward, m);
}

Point scissors_translate_inverse(const ModelSpace& space, const Scissors& s, const Point& m)
{
    if (off_line(space, m, s.a) > kOnLine) throw GeometryError("point is not on the lowest base");
    return chain_transfer(space, s.backward, m);
}

double displacement_formula(const ModelSpace& space, const Scissors& s)
{
    const Point p = eval(s.a, 0.0), q = eval(s.d, 0.0);
    Num sum = space.busemann(space.ideal_end(s.a, -1), p, s.x) + space.busemann(space.ideal_end(s.a, 1), p, s.x) +
              space.busemann(space.ideal_end(s.d, -1), q, s.x) + space.busemann(space.ideal_end(s.d, 1), q, s.x);
    return sum.value();
}

double displacement_composed(const ModelSpace& space, const Scissors& s, double t)
{
    Point m = eval(s.a, t);
    return space.project(scissors_translate(space, s, m), s.a).t.value() - space.project(m, s.a).t.value();
}

double displacement_oracle(OracleSession& session, const Scissors& s, const Point& x0, int n)
{
    if (n < 1) throw std::invalid_argument("n must be positive");
    const ModelSpace& space = session.space();
    // d(x0, T^n x0) = d(T^-k x0, T^(n-k) x0): splitting the orbit keeps both ends near x0.
    Point x = x0, y = x0;
    for (int i = 0; i < n / 2; ++i) x = scissors_translate_inverse(space, s, x);
    for (int i = 0; i < n - n / 2; ++i) y = scissors_translate(space, s, y);
    if (space.same_point(x, y)) return 0.0;

    auto member = [&](Relation r, int level) {
        Membership m = session.relation_member(x, y, RelationKind{r, level});
        if (m == Membership::indeterminate) throw GeometryError("oracle indeterminate while certifying the floor");
        return m == Membership::yes;
    };
    // Smallest k with (x0, T^n x0) in closed kV, i.e. the ceiling of the distance.
    const int k = certified_level(session, x, y, 1 << 24);
    if (k > (1 << 24)) throw GeometryError("displacement beyond the level cap");
    long long floor_d = 0;
    if (member(Relation::boundary, k)) {
        floor_d = k;  // ties resolve toward the closed relation
    } else {
        if (k > 1 && member(Relation::closed, k - 1)) throw GeometryError("inconsistent level certificate");
        floor_d = k - 1;
    }
    return static_cast<double>(floor_d) / n;
}

DisplacementRecord displacement_record(OracleSession& session, const Scissors& s, const Point& x0, int n)
{
    DisplacementRecord r;
    r.formula = displacement_formula(session.space(), s);
    r.composed = displacement_composed(session.space(), s, session.space().project(x0, s.a).t.value());
    r.oracle = displacement_oracle(session, s, x0, n);
    r.n_used = n;
    return r;
}

ScissorsFamily sweep_scissors(const ModelSpace& space, const Geodesic& a, const Point& x0, const ScissorsRequest& req)
{
    require_hyperbolic(space, "sweep_scissors");
    if (off_line(space, x0, a) > kOnLine) throw GeometryError("x0 is not on a");
    ScissorsFamily fam;
    fam.space = &space;
    fam.a = a;
    fam.x0 = x0;
    fam.request = req;
    const double arc = arc_of(space, a, req.side);
    if (fam.request.boundary_radius <= 0) fam.request.boundary_radius = arc;
    const double t0 = space.project(x0, a).t.value();
    const double top = sigma_cap(arc, fam.request.boundary_radius);
    for (int k = 0; k < 32; ++k) {
        double sigma = top * std::pow(2.0, -(k + 1) / 2.0);
        auto m = centered_member(space, a, t0, fam.request.boundary_radius, sigma, req.side);
        if (!m) continue;
        fam.sigma.push_back(sigma);
        fam.delta.push_back(m->delta);
        fam.big_delta = std::max(fam.big_delta, m->delta / 2);
    }
    if (fam.sigma.empty()) throw GeometryError("scissors sweep found no member");
    return fam;
}

Scissors family_member(const ScissorsFamily& fam, double sigma)
{
    auto m = centered_member(*fam.space, fam.a, fam.space->project(fam.x0, fam.a).t.value(),
                             fam.request.boundary_radius, sigma, fam.request.side);
    if (!m) throw GeometryError("no centered scissors at this scale");
    return m->s;
}

Scissors find_scissors_with_displacement(const ScissorsFamily& fam, const Rational& target)
{
    const double goal = target.convert_to<double>();
    if (!(goal > 0)) throw GeometryError("target displacement must be positive");
    if (goal >= fam.big_delta) throw GeometryError("target displacement above the discovered bound");
    const ModelSpace& space = *fam.space;
    const double t0 = space.project(fam.x0, fam.a).t.value();
    const double radius = fam.request.boundary_radius;
    auto at = [&](double sigma) { return centered_member(space, fam.a, t0, radius, sigma, fam.request.side); };

    // Bracket: a scale with delta >= goal followed by a smaller one with delta < goal.
    double hi_sigma = -1, lo_sigma = -1;
    for (std::size_t i = 0; i < fam.sigma.size(); ++i) {
        if (fam.delta[i] >= goal) {
            hi_sigma = fam.sigma[i];
        } else if (hi_sigma > 0) {
            lo_sigma = fam.sigma[i];
            break;
        }
    }
    if (hi_sigma < 0) throw GeometryError("no swept scissors reaches the target displacement");
    if (lo_sigma < 0) {
        double sigma = fam.sigma.back();
        for (int k = 0; k < 200 && lo_sigma < 0; ++k) {
            sigma /= 2;
            auto m = at(sigma);
            if (!m) continue;
            if (m->delta < goal) lo_sigma = sigma;
            else hi_sigma = sigma;
        }
        if (lo_sigma < 0) throw GeometryError("root-finding budget exhausted");
    }
    double a = std::log(lo_sigma), b = std::log(hi_sigma);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (a + b);
        auto m = at(std::exp(mid));
        if (!m) throw GeometryError("scissors family broke during root-finding");
        if (m->delta == goal || b - a < 1e-15) return m->s;
        if (m->delta < goal) a = mid;
        else b = mid;
    }
    auto m = at(std::exp(0.5 * (a + b)));
    if (m && std::abs(m->delta - goal) <= 1e-10) return m->s;
    throw GeometryError("root-finding budget exhausted");
}

Scissors find_scissors_with_displacement(const ModelSpace& space, const Geodesic& a, const Point& x0,
                                         const Rational& target)
{
    return find_scissors_with_displacement(sweep_scissors(space, a, x0), target);
}

double displacement_continuity_probe(const ModelSpace& space, const Scissors& s, double h)
{
    require_hyperbolic(space, "displacement_continuity_probe");
    if (!(h > 0)) throw std::invalid_argument("perturbation size must be positive");
    const double base = displacement_formula(space, s);
    double worst = 0.0;
    // Moving xi and eta moves the center with them: x is b cap c.
    for (int i : {-1, 1})
        for (int j : {-1, 1}) {
            Scissors p = hyperbolic_scissors(space, s.a, s.eps_xi + i * h, s.eps_eta + j * h, s.side);
            worst = std::max(worst, std::abs(displacement_formula(space, p) - base));
        }
    return worst;
}

void export_scissors_csv(const ModelSpace& space, const Scissors& s, std::ostream& out, double half_length,
                         int samples)
{
    out << "line,t,u,v\n";
    const std::pair<const char*, const Geodesic*> lines[] = {{"a", &s.a}, {"b", &s.b}, {"c", &s.c}, {"d", &s.d}};
    for (const auto& [name, g] : lines) {
        double tx = space.project(s.x, *g).t.value();
        for (int k = 0; k <= samples; ++k) {
            double t = tx - half_length + 2 * half_length * k / samples;
            auto uv = chart_coordinates(eval(*g, t));
            out << name << "," << t << "," << uv[0] << "," << uv[1] << "\n";
        }
    }
    auto uv = chart_coordinates(s.x);
    out << "x,0," << uv[0] << "," << uv[1] << "\n";
}

// ---------------------------------------------------------------------------
// Reconstruction

RankOneReconstruction reconstruct_rankone(OracleSession& session, const Geodesic& a, double t1, double t2,
                                          double tol)
{
    const ModelSpace& space = session.space();
    require_hyperbolic(space, "reconstruct_rankone");
    if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
    const std::uint64_t q0 = session.query_count();
    RankOneReconstruction r;
    if (t1 == t2) return r;

    const double start = std::min(t1, t2);
    const Point y0 = eval(a, start), z = eval(a, std::max(t1, t2));

    // Unit spacing of the anchor u0 = a(start - 1) is certified as an r-sequence window.
    const Point u0 = eval(a, start - 1);
    if (verify_rsequence(session, {u0, y0, eval(a, start + 1)}) != Membership::yes)
        throw GeometryError("oracle refused the unit anchor");

    // Integer part: ceiling level of (y0, z), then the boundary test for an exact integer.
    const int k = certified_level(session, y0, z, 4096);
    if (k > 4096) throw GeometryError("distance beyond the level budget");
    Membership on = session.relation_member(y0, z, RelationKind{Relation::boundary, k});
    if (on == Membership::indeterminate) throw GeometryError("oracle indeterminate on the integer part");
    if (on == Membership::yes) {
        r.estimate = r.lo = r.hi = k;
        r.integer_part = k;
        r.queries = session.query_count() - q0;
        return r;
    }
    r.integer_part = k - 1;

    // Dyadic ladder of scissors translations with displacement 2^-j. The shift does not depend on
    // where the center sits, so the family is centered where a passes closest to the origin.
    const Point foot = space.project(space.origin(), a).foot;
    ScissorsFamily fam = sweep_scissors(space, a, foot);
    int j0 = 0;
    while (std::ldexp(1.0, -j0) >= fam.big_delta) ++j0;
    int K = j0;
    while (std::ldexp(1.0, -K) > tol / 2) ++K;
    std::vector<Scissors> ladder;
    for (int j = j0; j <= K; ++j) {
        Scissors s = find_scissors_with_displacement(fam, Rational(1, Integer(1) << j));
        // Short rungs are accepted once 2^j translations are certified to move exactly one unit.
        const int n = 1 << j;
        if (j <= kCertifiedRungs && displacement_oracle(session, s, foot, n) * n != 1.0)
            throw GeometryError("scissors rung failed its unit certificate");
        ladder.push_back(std::move(s));
    }
    r.ladder = static_cast<int>(ladder.size());

    // u tracks a(start - 1 + L); the test d(u', z) <= 1 decides D <= L + step.
    auto advance = [&](Point u, int j, long long times) {
        const Scissors& s = ladder[std::max(j, j0) - j0];
        long long reps = j < j0 ? times << (j0 - j) : times;
        for (long long i = 0; i < reps; ++i) u = scissors_translate(space, s, u);
        r.translations += reps;
        return u;
    };
    Point u = advance(u0, j0, r.integer_part << j0);
    double lo = static_cast<double>(r.integer_part), hi = lo + 1;
    for (int j = 1; j <= K; ++j) {
        Point w = advance(u, j, 1);
        double mid = lo + std::ldexp(1.0, -j);
        if (session.classify(w, z, "rankone") == Side::gt) {
            lo = mid;
            u = w;
        } else {
            hi = mid;
        }
    }
    r.lo = lo;
    r.hi = hi;
    r.estimate = 0.5 * (lo + hi);
    r.queries = session.query_count() - q0;
    return r;
}

}  // namespace cat0
