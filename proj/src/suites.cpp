#include "cat0/suites.hpp"

#include "cat0/horo.hpp"
#include "cat0/rankone.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace cat0 {

namespace {

constexpr double kTol = 1e-9;

struct Host {
    std::string label;
    SpacePtr space;
};

std::vector<Host> hosts()
{
    return {{"euclidean", ModelSpace::euclidean(NumericMode::float_with_tolerance)},
            {"hyperbolic", ModelSpace::hyperbolic()},
            {"tree", ModelSpace::tree(tripod_tree(1))},
            {"tree_cross_line", ModelSpace::tree_cross_line(line_tree(2, 1), NumericMode::float_with_tolerance)}};
}

std::vector<int> rays_of(const ModelSpace& space)
{
    std::vector<int> out;
    const auto& edges = space.tree_description().edges;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].ray) out.push_back(static_cast<int>(i));
    return out;
}

/// Two distinct ideal points xi, eta joined by a geodesic, plus a third end eta2 != xi.
struct EndTriple {
    IdealPoint xi, eta, eta2;
};

EndTriple random_ends(const ModelSpace& space, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    EndTriple e;
    switch (space.kind()) {
    case SpaceKind::euclidean_plane: {
        double phi = angle(rng);
        e.xi = space.direction(space.num(std::cos(phi)), space.num(std::sin(phi)));
        e.eta = e.eta2 = space.direction(space.num(-std::cos(phi)), space.num(-std::sin(phi)));
        break;
    }
    case SpaceKind::hyperbolic_plane: {
        double phi = angle(rng);
        std::uniform_real_distribution<double> gap(0.3, 2 * std::numbers::pi - 0.3);
        e.xi = space.boundary_angle(phi);
        e.eta = space.boundary_angle(phi + gap(rng));
        e.eta2 = space.boundary_angle(phi + gap(rng));
        break;
    }
    case SpaceKind::metric_tree:
    case SpaceKind::tree_cross_line: {
        auto rays = rays_of(space);
        std::shuffle(rays.begin(), rays.end(), rng);
        if (space.kind() == SpaceKind::metric_tree) {
            e.xi = space.end(rays[0]);
            e.eta = space.end(rays[1]);
            e.eta2 = space.end(rays[rays.size() > 2 ? 2 : 1]);
        } else {
            int slope = std::uniform_int_distribution<int>(-1, 1)(rng);
            e.xi = space.product_end(rays[0], slope);
            e.eta = e.eta2 = space.product_end(rays[1], -slope);
        }
        break;
    }
    }
    return e;
}

class Recorder {
public:
    Recorder(std::string name, double tolerance)
    {
        v_.name = std::move(name);
        v_.tolerance = tolerance;
    }
    /// Records a violation amount (<= 0 passes).
    void check(double violation, const std::function<std::string()>& describe_case)
    {
        ++v_.checks;
        if (!(violation <= v_.tolerance)) {
            ++v_.failures;
            v_.passed = false;
            if (v_.detail.empty()) v_.detail = describe_case();
        }
        if (std::isfinite(violation)) v_.worst = std::max(v_.worst, violation);
        else v_.worst = violation;
    }
    /// Turns an exception in one case into a recorded failure.
    void guard(const std::string& where, const std::function<void()>& body)
    {
        try {
            body();
        } catch (const std::exception& ex) {
            check(std::numeric_limits<double>::infinity(), [&] { return where + ": " + ex.what(); });
        }
    }
    SuiteVerdict done() const { return v_; }

private:
    SuiteVerdict v_;
};

SuiteVerdict comparison_suite(std::uint64_t seed, int cases)
{
    Recorder r("cat0_comparison", kTol);
    std::mt19937_64 rng(seed);
    for (const auto& h : hosts()) {
        for (int i = 0; i < cases; ++i) {
            r.guard(h.label, [&] {
                std::array<Point, 3> tri{h.space->random_point(rng, 3.0), h.space->random_point(rng, 3.0),
                                         h.space->random_point(rng, 3.0)};
                double v = h.space->comparison_check(tri, 8);
                r.check(v, [&] { return h.label + " " + describe(tri[0]) + " " + describe(tri[1]) + " " + describe(tri[2]); });
            });
        }
    }
    return r.done();
}

SuiteVerdict convexity_suite(std::uint64_t seed, int cases)
{
    Recorder r("convexity", kTol);
    std::mt19937_64 rng(seed + 1);
    for (const auto& h : hosts()) {
        const ModelSpace& sp = *h.space;
        for (int i = 0; i < cases; ++i) {
            r.guard(h.label, [&] {
                Point a = sp.random_point(rng, 2.0), b = sp.random_point(rng, 2.0);
                Point c = sp.random_point(rng, 2.0), d = sp.random_point(rng, 2.0);
                if (sp.distance(a, b).value() < 0.05 || sp.distance(c, d).value() < 0.05) return;
                Geodesic g1 = sp.geodesic_through(a, b), g2 = sp.geodesic_through(c, d);
                auto f = [&](double t) { return sp.distance(eval(g1, t), eval(g2, t)).value(); };
                const double step = 0.25;
                for (double t = -2.0 + step; t <= 2.0 - step + 1e-12; t += step) {
                    double second = f(t - step) + f(t + step) - 2 * f(t);
                    r.check(-second, [&] { return h.label + " t=" + std::to_string(t); });
                }
            });
        }
    }
    return r.done();
}

SuiteVerdict busemann_suite(std::uint64_t seed, int cases)
{
    Recorder r("busemann_lipschitz", kTol);
    std::mt19937_64 rng(seed + 2);
    for (const auto& h : hosts()) {
        const ModelSpace& sp = *h.space;
        for (int i = 0; i < cases; ++i) {
            r.guard(h.label, [&] {
                IdealPoint xi = random_ends(sp, rng).xi;
                Point base = sp.random_point(rng, 2.0), x = sp.random_point(rng, 3.0), y = sp.random_point(rng, 3.0);
                double gap = std::abs((sp.busemann(xi, base, x) - sp.busemann(xi, base, y)).value());
                r.check(gap - sp.distance(x, y).value(), [&] { return h.label + " " + describe(x) + " " + describe(y); });
            });
        }
    }
    return r.done();
}

SuiteVerdict transfer_suite(std::uint64_t seed, int cases)
{
    Recorder r("transfer_invertibility", kTol);
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> param(-2.0, 2.0);
    for (const auto& h : hosts()) {
        const ModelSpace& sp = *h.space;
        for (int i = 0; i < cases; ++i) {
            r.guard(h.label, [&] {
                EndTriple e = random_ends(sp, rng);
                Geodesic c1 = sp.geodesic_between_ideals(e.xi, e.eta, sp.random_point(rng, 1.5));
                Geodesic c2 = sp.geodesic_between_ideals(e.xi, e.eta2, sp.random_point(rng, 1.5));
                Point m = eval(c1, param(rng)), n = eval(c1, param(rng));
                Point tm = transfer(sp, c1, c2, e.xi, m), tn = transfer(sp, c1, c2, e.xi, n);
                Point back = transfer(sp, c2, c1, e.xi, tm);
                r.check(sp.distance(back, m).value(), [&] { return h.label + " round trip " + describe(m); });
                r.check(std::abs(sp.distance(tm, tn).value() - sp.distance(m, n).value()),
                        [&] { return h.label + " isometry " + describe(m) + " " + describe(n); });
            });
        }
    }
    return r.done();
}

SuiteVerdict displacement_suite(std::uint64_t seed, int cases)
{
    Recorder r("displacement_nonnegative", 1e-8);
    std::mt19937_64 rng(seed + 4);
    std::uniform_real_distribution<double> eps(0.02, 0.7), phi(0.0, 2 * std::numbers::pi);
    auto h = ModelSpace::hyperbolic();
    for (int i = 0; i < cases; ++i) {
        r.guard("hyperbolic", [&] {
            Geodesic a = h->geodesic_through(h->random_point(rng, 1.0), h->polar(2.0, phi(rng)));
            Scissors s = hyperbolic_scissors(*h, a, eps(rng), eps(rng), i % 2 ? -1 : 1);
            double f = displacement_formula(*h, s);
            r.check(-f, [&] { return "negative displacement " + std::to_string(f); });
            r.check(std::abs(f - displacement_composed(*h, s, 0.0)), [&] { return "formula vs composed"; });
        });
    }
    return r.done();
}

SuiteVerdict horoball_suite(std::uint64_t seed, int cases)
{
    Recorder r("horoball_convergence", 1e-3);
    std::mt19937_64 rng(seed + 5);
    for (const auto& h : hosts()) {
        const ModelSpace& sp = *h.space;
        // d(y, s(k)) - k decreases to the Busemann value; hyperbolic errors fall like e^{-2k}.
        const int K = sp.kind() == SpaceKind::hyperbolic_plane ? 16 : 1 << 14;
        for (int i = 0; i < cases; ++i) {
            r.guard(h.label, [&] {
                IdealPoint xi = random_ends(sp, rng).xi;
                Point o = sp.random_point(rng, 1.5), y = sp.random_point(rng, 2.0);
                Geodesic ray = sp.geodesic_to_ideal(o, xi);
                double prev = std::numeric_limits<double>::infinity();
                double last = 0.0;
                for (int k = 1; k <= K; k *= 2) {
                    last = sp.distance(y, eval(ray, static_cast<double>(k))).value() - k;
                    // Monotonicity is held to the tight tolerance, the limit to the suite tolerance.
                    r.check(last - prev > kTol ? 1.0 : 0.0, [&] { return h.label + " not monotone at k=" + std::to_string(k); });
                    prev = last;
                }
                double beta = sp.busemann(xi, o, y).value();
                r.check(std::abs(last - beta), [&] { return h.label + " limit " + std::to_string(last) + " vs " + std::to_string(beta); });
            });
        }
    }
    return r.done();
}

}  // namespace

std::vector<SuiteVerdict> run_property_suites(std::uint64_t seed, int cases)
{
    if (cases < 1) throw std::invalid_argument("suite size must be positive");
    return {comparison_suite(seed, cases), convexity_suite(seed, cases), busemann_suite(seed, cases),
            transfer_suite(seed, cases),   displacement_suite(seed, cases), horoball_suite(seed, cases)};
}

}  // namespace cat0
