#pragma once

#include "cat0/horo.hpp"
#include "cat0/oracle.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace cat0 {

// ---------------------------------------------------------------------------
// Shadows

/// z in Shadow_y(x0): some geodesic [y z] passes through x0, with z != x0.
bool shadow_member(const ModelSpace& space, const Point& y, const Point& x0, const Point& z);
/// Ideal z: the ray from y through x0 ends at z.
bool shadow_member(const ModelSpace& space, const Point& y, const Point& x0, const IdealPoint& z);

/// Points of S(y, |y x0| + rho) inside the shadow, i.e. at distance rho beyond x0.
std::vector<Point> spherical_shadow_sample(const ModelSpace& space, const Point& y, const Point& x0, double rho,
                                           int count);

struct ShadowProbeRow {
    double delta = 0.0;
    double epsilon = 0.0;     // largest shadow displacement found
    double similar = 0.0;     // (|y x0| + rho) delta / |y x0|
    double rho_ratio = 0.0;   // rho delta / |y x0|
};

/// Moves x0 along S(y, |y x0|) by each delta and measures the spherical shadow displacement.
std::vector<ShadowProbeRow> shadow_continuity_probe(const ModelSpace& space, const Point& y, const Point& x0,
                                                    double rho, const std::vector<double>& deltas, int samples = 16);

// ---------------------------------------------------------------------------
// Scissors

/// <a, b, c, d; x>: a(-inf) = b(-inf), a(+inf) = c(+inf), c(-inf) = d(-inf), b(+inf) = d(+inf), b and c meet at x.
struct Scissors {
    Geodesic a, b, c, d;
    Point x;
    /// Search parameters of hyperbolic scissors: boundary offsets of b(+inf) and c(-inf).
    double eps_xi = 0.0, eps_eta = 0.0;
    int side = 1;
    AsymptoticChain forward;   // a -> c -> d -> b -> a
    AsymptoticChain backward;  // a -> b -> d -> c -> a
};

/// Validates the scissors invariants; transversality is waived when `transversal` is false.
Scissors make_scissors(const ModelSpace& space, const Geodesic& a, const Geodesic& b, const Geodesic& c,
                       const Geodesic& d, const Point& x, bool transversal = true);

/// Hyperbolic scissors over a with b(+inf) at a(+inf) + side * eps_xi and c(-inf) at a(-inf) - side * eps_eta.
Scissors hyperbolic_scissors(const ModelSpace& space, const Geodesic& a, double eps_xi, double eps_eta, int side = 1);

struct ScissorsRequest {
    /// Largest boundary-angle offset of b(+inf) and c(-inf). Non-positive selects a quarter of the
    /// arc in find_scissors and the whole arc in sweep_scissors.
    double boundary_radius = -1.0;
    double offset_bound = 0.1;
    int budget = 48;
    int side = 1;
};

Scissors find_scissors(const ModelSpace& space, const Geodesic& a, const Point& x0, const ScissorsRequest& req = {});

/// T = R_ba R_db R_cd R_ac applied to m on a.
Point scissors_translate(const ModelSpace& space, const Scissors& s, const Point& m);
Point scissors_translate_inverse(const ModelSpace& space, const Scissors& s, const Point& m);

/// beta_{a-}(x) + beta_{a+}(x) + beta_{d-}(x) + beta_{d+}(x), normalized at a(0) and d(0).
double displacement_formula(const ModelSpace& space, const Scissors& s);
/// Signed parameter shift of T along a, measured at a(t).
double displacement_composed(const ModelSpace& space, const Scissors& s, double t = 0.0);
/// floor(d(x0, T^n x0)) / n with the integer part certified by nV relations.
double displacement_oracle(OracleSession& session, const Scissors& s, const Point& x0, int n);

struct DisplacementRecord {
    double formula = 0.0, composed = 0.0, oracle = 0.0;
    int n_used = 0;
};

DisplacementRecord displacement_record(OracleSession& session, const Scissors& s, const Point& x0, int n);

/// Scissors family over a with centers projecting to x0; delta discovered by a 32-step sweep.
struct ScissorsFamily {
    const ModelSpace* space = nullptr;
    Geodesic a;
    Point x0;
    ScissorsRequest request;
    std::vector<double> sigma, delta;  // sweep samples, sigma decreasing
    double big_delta = 0.0;            // half the largest swept delta
};

ScissorsFamily sweep_scissors(const ModelSpace& space, const Geodesic& a, const Point& x0,
                              const ScissorsRequest& req = {});
/// Member of the family at scale sigma.
Scissors family_member(const ScissorsFamily& fam, double sigma);

Scissors find_scissors_with_displacement(const ScissorsFamily& fam, const Rational& target);
Scissors find_scissors_with_displacement(const ModelSpace& space, const Geodesic& a, const Point& x0,
                                         const Rational& target);

/// |delta(perturbed) - delta| under boundary and center perturbations of size h.
double displacement_continuity_probe(const ModelSpace& space, const Scissors& s, double h);

void export_scissors_csv(const ModelSpace& space, const Scissors& s, std::ostream& out, double half_length = 4.0,
                         int samples = 64);

// ---------------------------------------------------------------------------
// Reconstruction

struct RankOneReconstruction {
    double estimate = 0.0;
    double lo = 0.0, hi = 0.0;
    long long integer_part = 0;
    int ladder = 0;               // number of scissors used
    long long translations = 0;   // applications of T
    std::uint64_t queries = 0;
};

RankOneReconstruction reconstruct_rankone(OracleSession& session, const Geodesic& a, double t1, double t2,
                                          double tol);

}  // namespace cat0
