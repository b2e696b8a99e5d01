#pragma once

#include "cat0/num.hpp"

#include <array>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cat0 {

enum class SpaceKind { euclidean_plane, hyperbolic_plane, metric_tree, tree_cross_line };
enum class NumericMode { exact_rational, float_with_tolerance };

std::string to_string(SpaceKind k);
SpaceKind parse_space_kind(const std::string& s);

struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite vertex/edge list plus infinite rays. Edges and rays share one id space,
/// numbered in order of appearance.
struct TreeEdge {
    int tail = -1;
    int head = -1;  // -1 for a ray
    Rational length = 0;  // unused for rays
    bool ray = false;
};

struct TreeDescription {
    std::vector<std::string> vertices;
    std::vector<TreeEdge> edges;

    int vertex_index(const std::string& name) const;

    /// Plain-text format, one item per line, '#' starts a comment:
    ///   vertex NAME
    ///   edge NAME NAME LENGTH      (LENGTH written as p/q, integer or decimal)
    ///   ray NAME
    static TreeDescription parse(std::istream& in);
    static TreeDescription parse_string(const std::string& text);
    std::string to_text() const;
};

struct Point {
    SpaceKind kind = SpaceKind::euclidean_plane;
    Num x, y;                     // euclidean coordinates; y is the height in tree_cross_line
    std::array<double, 3> h{};    // hyperboloid coordinates
    int edge = -1;                // tree edge id
    Num offset;                   // distance from the edge tail
};

/// euclidean: unit direction; hyperbolic: boundary angle; tree: end (ray id);
/// tree_cross_line: ray id (or -1) combined with a vertical slope in {-1,0,1}.
struct IdealPoint {
    SpaceKind kind = SpaceKind::euclidean_plane;
    Num ux, uy;
    double theta = 0.0;
    int ray = -1;
    int slope = 0;
};

enum class Domain { complete, ray, segment };

/// Unit-speed piece of a tree path on one edge: offset(t) = s_ref + dir * (t - t_ref)
/// for t in [lo, hi]; lo_inf / hi_inf mark unbounded ends.
struct TreeLeg {
    int edge = -1;
    int dir = 1;
    Num t_ref, s_ref;
    Num lo, hi;
    bool lo_inf = false, hi_inf = false;
};

struct Geodesic {
    SpaceKind kind = SpaceKind::euclidean_plane;
    Domain domain = Domain::complete;
    Num lo, hi;  // parameter bounds; ignored where infinite
    bool lo_inf = true, hi_inf = true;

    Num px, py, ex, ey;                   // euclidean anchor and direction
    std::array<double, 3> P{}, U{};       // hyperbolic anchor and unit tangent
    std::vector<TreeLeg> legs;            // tree path (unit speed)
    Num alpha, beta, h0;                  // product: c(t) = (tree(alpha t), h0 + beta t)
    Point foot;                           // product with alpha == 0: fixed tree point
};

struct DirectionAtPoint {
    Point base;
    Geodesic germ;  // germ(0) == base, germ leaves base for t > 0
};

struct Projection {
    Num t;
    Point foot;
};

class ModelSpace {
public:
    static std::shared_ptr<const ModelSpace> euclidean(NumericMode mode = NumericMode::exact_rational);
    static std::shared_ptr<const ModelSpace> hyperbolic();
    static std::shared_ptr<const ModelSpace> tree(TreeDescription tree,
                                                  NumericMode mode = NumericMode::exact_rational);
    static std::shared_ptr<const ModelSpace> tree_cross_line(TreeDescription tree,
                                                             NumericMode mode = NumericMode::exact_rational);

    SpaceKind kind() const { return kind_; }
    NumericMode mode() const { return mode_; }
    bool exact() const { return mode_ == NumericMode::exact_rational; }
    const TreeDescription& tree_description() const { return tree_; }

    /// Scalar in this space's arithmetic: exact rationals in exact mode.
    Num num(const Rational& r) const;
    Num num(double v) const;

    // Point constructors.
    Point point(const Num& x, const Num& y) const;
    Point point(double x, double y) const { return point(num(x), num(y)); }
    Point hyperbolic_point(double x0, double x1, double x2) const;
    /// Point at distance r from the hyperboloid origin (1,0,0) in direction phi.
    Point polar(double r, double phi) const;
    Point origin() const;
    Point tree_point(int edge, const Num& offset) const;
    Point vertex_point(int vertex) const;
    Point product_point(int edge, const Num& offset, const Num& height) const;
    Point tree_part(const Point& p) const;

    // Ideal points.
    IdealPoint direction(const Num& ux, const Num& uy) const;
    IdealPoint boundary_angle(double theta) const;
    IdealPoint end(int ray) const;
    IdealPoint product_end(int ray, int slope) const;

    void validate(const Point& p) const;
    bool same_ideal(const IdealPoint& a, const IdealPoint& b) const;
    bool same_point(const Point& p, const Point& q) const;

    Num distance(const Point& p, const Point& q) const;
    /// Sign of d(p,q) - r, exact whenever both sides are exactly representable.
    /// The second member reports whether the comparison was exact.
    std::pair<int, bool> compare_distance(const Point& p, const Point& q, const Num& r) const;

    Geodesic geodesic_through(const Point& p, const Point& q) const;
    Geodesic segment(const Point& p, const Point& q) const;
    Geodesic geodesic_to_ideal(const Point& p, const IdealPoint& xi) const;
    Geodesic geodesic_between_ideals(const IdealPoint& xi, const IdealPoint& eta, const Point& anchor) const;
    /// Point on [p,q] at fraction lambda of the way; exact in exact mode.
    Point interpolate(const Point& p, const Point& q, const Rational& lambda) const;

    Num busemann(const IdealPoint& xi, const Point& basepoint, const Point& x) const;
    Projection project(const Point& x, const Geodesic& c) const;
    double angle(const Point& x, const DirectionAtPoint& u, const DirectionAtPoint& v) const;
    bool has_unique_inverse_direction(const Point& x, const DirectionAtPoint& u) const;
    double comparison_check(const std::array<Point, 3>& triple, int sample_count) const;
    /// +infinity encodes an infinite Tits distance.
    double tits_distance(const IdealPoint& xi, const IdealPoint& eta) const;

    /// Ideal endpoint c(+inf) (side = +1) or c(-inf) (side = -1).
    IdealPoint ideal_end(const Geodesic& c, int side) const;
    /// Germ at x of the ray from x toward y.
    DirectionAtPoint direction_toward(const Point& x, const Point& y) const;
    /// Ground truth: does c bound a flat strip of positive width.
    bool bounds_flat_strip(const Geodesic& c) const;

    // Tree helpers.
    int vertex_of(const Point& p) const;  // -1 when p lies inside an edge
    int degree(int vertex) const;
    Num tree_distance(const Point& p, const Point& q) const;
    /// Points at tree distance r from p, restricted to branches not containing
    /// `away_from` when given. Truncated to `limit` points.
    std::vector<Point> tree_sphere(const Point& p, const Num& r, const Point* away_from,
                                   std::size_t limit) const;

    /// Points of the sphere S(y, r); exhaustive for trees up to `count`,
    /// evenly spread otherwise.
    std::vector<Point> sphere_sample(const Point& y, const Num& r, int count) const;
    /// Random point within `radius` of the reference point (origin / vertex 0).
    Point random_point(std::mt19937_64& rng, double radius) const;

private:
    ModelSpace() = default;
    void init_tree();

    struct Incidence {
        int edge;
        int other;   // -1 for a ray
        bool at_tail;
    };
    struct TreeStep {
        int edge;
        Num from, to;  // offsets
        bool to_inf = false;  // outward along a ray
        int dir() const { return to_inf ? 1 : (to - from).sign(); }
    };
    struct Exit {
        int vertex;
        Num cost;
        std::optional<TreeStep> step;
    };
    std::vector<Exit> exits(const Point& p) const;

    std::vector<TreeStep> tree_path_steps(const Point& p, const Point& q) const;
    Point tree_walk(const Point& p, const Point& q, const Num& s) const;
    std::vector<TreeStep> extend_from_vertex(int vertex, int arrived_by) const;
    std::vector<TreeStep> continue_step(int edge, const Num& offset, int dir) const;
    std::vector<TreeLeg> legs_from(const std::vector<TreeStep>& back, const std::vector<TreeStep>& fwd) const;
    std::vector<int> vertex_path_edges(int a, int b) const;
    Geodesic tree_geodesic_through(const Point& p, const Point& q) const;
    Geodesic tree_line_between(int ray_plus, int ray_minus, const Point& anchor) const;
    Geodesic tree_ray_to_end(const Point& p, int ray) const;
    Num tree_busemann(int ray, const Point& basepoint, const Point& x) const;
    Projection tree_project(const Point& x, const Geodesic& c) const;

    SpaceKind kind_ = SpaceKind::euclidean_plane;
    NumericMode mode_ = NumericMode::exact_rational;
    TreeDescription tree_;
    std::vector<std::vector<Incidence>> adj_;
    std::vector<std::vector<Num>> vdist_;
    std::vector<std::vector<int>> parent_edge_;  // parent_edge_[root][v]
};

using SpacePtr = std::shared_ptr<const ModelSpace>;

Point eval(const Geodesic& c, const Num& t);
Point eval(const Geodesic& c, double t);
/// c'(t) = c(t + shift).
Geodesic reparametrize(const Geodesic& c, const Num& shift);
/// c'(t) = c(-t).
Geodesic reversed(const Geodesic& c);
bool in_domain(const Geodesic& c, const Num& t);

/// Plot chart: euclidean (x, y); hyperbolic Poincare disk (x, y);
/// tree (edge, offset); product (edge, offset, height).
std::vector<double> chart_coordinates(const Point& p);
std::string describe(const Point& p);

// Lorentz helpers for the hyperboloid model.
double lorentz(const std::array<double, 3>& p, const std::array<double, 3>& q);
std::array<double, 3> null_vector(double theta);

/// Path of `finite_edges` edges with a ray at each end.
TreeDescription line_tree(int finite_edges, const Rational& edge_length);
/// Center vertex with three legs, each ending in a ray.
TreeDescription tripod_tree(const Rational& leg_length);

}  // namespace cat0
