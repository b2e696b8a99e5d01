#include "cat0/model_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <numbers>
#include <sstream>

namespace cat0 {

namespace {

constexpr double kPi = std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 add(const Vec3& a, const Vec3& b, double s = 1.0)
{
    return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
}
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

/// Lifts (x1, x2) to the upper sheet of the hyperboloid.
Vec3 lift(double x1, double x2) { return {std::sqrt(1.0 + x1 * x1 + x2 * x2), x1, x2}; }
Vec3 renormalize(const Vec3& p) { return lift(p[1], p[2]); }

double hyper_distance(const Vec3& p, const Vec3& q)
{
    // The point is defined by (x1, x2); x0 is recomputed in extended precision so
    // that the Lorentz difference does not cancel catastrophically away from the origin.
    using L = long double;
    auto x0 = [](const Vec3& v) { return std::sqrt(1.0L + L(v[1]) * v[1] + L(v[2]) * v[2]); };
    L d0 = x0(p) - x0(q), d1 = L(p[1]) - q[1], d2 = L(p[2]) - q[2];
    L n2 = -d0 * d0 + d1 * d1 + d2 * d2;
    if (n2 <= 0) return 0.0;
    // 2 asinh(|p - q|_L / 2) keeps precision for nearby points.
    return static_cast<double>(2.0L * std::asinh(std::sqrt(n2) / 2.0L));
}

double wrap_angle(double t)
{
    t = std::fmod(t, 2 * kPi);
    if (t < 0) t += 2 * kPi;
    return t;
}

/// Rational point on the unit circle near angle phi (exact in Q).
std::pair<Num, Num> rational_unit(double phi)
{
    phi = std::remainder(phi, 2 * kPi);
    if (std::abs(std::abs(phi) - kPi) < 1e-9) return {Num(-1), Num(0)};
    double t = std::tan(phi / 2);
    Rational tr(static_cast<long long>(std::llround(t * 4096.0)), 4096);
    Rational den = 1 + tr * tr;
    return {Num((1 - tr * tr) / den), Num(2 * tr / den)};
}

Num sq(const Num& v) { return v * v; }

}  // namespace

double lorentz(const std::array<double, 3>& p, const std::array<double, 3>& q)
{
    return -p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
}

std::array<double, 3> null_vector(double theta) { return {1.0, std::cos(theta), std::sin(theta)}; }

std::string to_string(SpaceKind k)
{
    switch (k) {
    case SpaceKind::euclidean_plane: return "euclidean_plane";
    case SpaceKind::hyperbolic_plane: return "hyperbolic_plane";
    case SpaceKind::metric_tree: return "metric_tree";
    case SpaceKind::tree_cross_line: return "tree_cross_line";
    }
    return "?";
}

SpaceKind parse_space_kind(const std::string& s)
{
    if (s == "euclidean" || s == "euclidean_plane") return SpaceKind::euclidean_plane;
    if (s == "hyperbolic" || s == "hyperbolic_plane") return SpaceKind::hyperbolic_plane;
    if (s == "tree" || s == "metric_tree") return SpaceKind::metric_tree;
    if (s == "tree_cross_line" || s == "product") return SpaceKind::tree_cross_line;
    throw std::invalid_argument("unknown space kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Tree descriptions

int TreeDescription::vertex_index(const std::string& name) const
{
    auto it = std::find(vertices.begin(), vertices.end(), name);
    if (it == vertices.end()) throw std::invalid_argument("unknown vertex '" + name + "'");
    return static_cast<int>(it - vertices.begin());
}

TreeDescription TreeDescription::parse(std::istream& in)
{
    TreeDescription t;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        auto fail = [&](const std::string& what) {
            throw std::invalid_argument("tree line " + std::to_string(lineno) + ": " + what);
        };
        if (word == "vertex") {
            std::string name;
            if (!(ls >> name)) fail("vertex needs a name");
            if (std::find(t.vertices.begin(), t.vertices.end(), name) != t.vertices.end())
                fail("duplicate vertex " + name);
            t.vertices.push_back(name);
        } else if (word == "edge") {
            std::string a, b, len;
            if (!(ls >> a >> b >> len)) fail("edge needs two vertices and a length");
            TreeEdge e;
            e.tail = t.vertex_index(a);
            e.head = t.vertex_index(b);
            e.length = parse_rational(len);
            if (e.length <= 0) fail("edge length must be positive");
            if (e.tail == e.head) fail("loop edge");
            t.edges.push_back(e);
        } else if (word == "ray") {
            std::string a;
            if (!(ls >> a)) fail("ray needs a vertex");
            TreeEdge e;
            e.tail = t.vertex_index(a);
            e.ray = true;
            t.edges.push_back(e);
        } else {
            fail("unknown keyword '" + word + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing text '" + extra + "'");
    }
    return t;
}

TreeDescription TreeDescription::parse_string(const std::string& text)
{
    std::istringstream in(text);
    return parse(in);
}

std::string TreeDescription::to_text() const
{
    std::ostringstream os;
    for (const auto& v : vertices) os << "vertex " << v << "\n";
    for (const auto& e : edges) {
        if (e.ray)
            os << "ray " << vertices[e.tail] << "\n";
        else
            os << "edge " << vertices[e.tail] << " " << vertices[e.head] << " " << to_string(e.length) << "\n";
    }
    return os.str();
}

TreeDescription line_tree(int finite_edges, const Rational& edge_length)
{
    TreeDescription t;
    for (int i = 0; i <= finite_edges; ++i) t.vertices.push_back("v" + std::to_string(i));
    t.edges.push_back(TreeEdge{0, -1, 0, true});
    for (int i = 0; i < finite_edges; ++i) t.edges.push_back(TreeEdge{i, i + 1, edge_length, false});
    t.edges.push_back(TreeEdge{finite_edges, -1, 0, true});
    return t;
}

TreeDescription tripod_tree(const Rational& leg_length)
{
    TreeDescription t;
    t.vertices = {"o", "a", "b", "c"};
    for (int i = 1; i <= 3; ++i) t.edges.push_back(TreeEdge{0, i, leg_length, false});
    for (int i = 1; i <= 3; ++i) t.edges.push_back(TreeEdge{i, -1, 0, true});
    return t;
}

// ---------------------------------------------------------------------------
// Construction

std::shared_ptr<const ModelSpace> ModelSpace::euclidean(NumericMode mode)
{
    std::shared_ptr<ModelSpace> s(new ModelSpace());
    s->kind_ = SpaceKind::euclidean_plane;
    s->mode_ = mode;
    return s;
}

std::shared_ptr<const ModelSpace> ModelSpace::hyperbolic()
{
    std::shared_ptr<ModelSpace> s(new ModelSpace());
    s->kind_ = SpaceKind::hyperbolic_plane;
    s->mode_ = NumericMode::float_with_tolerance;
    return s;
}

std::shared_ptr<const ModelSpace> ModelSpace::tree(TreeDescription tree, NumericMode mode)
{
    std::shared_ptr<ModelSpace> s(new ModelSpace());
    s->kind_ = SpaceKind::metric_tree;
    s->mode_ = mode;
    s->tree_ = std::move(tree);
    s->init_tree();
    return s;
}

std::shared_ptr<const ModelSpace> ModelSpace::tree_cross_line(TreeDescription tree, NumericMode mode)
{
    std::shared_ptr<ModelSpace> s(new ModelSpace());
    s->kind_ = SpaceKind::tree_cross_line;
    s->mode_ = mode;
    s->tree_ = std::move(tree);
    s->init_tree();
    return s;
}

void ModelSpace::init_tree()
{
    const int nv = static_cast<int>(tree_.vertices.size());
    if (nv == 0) throw GeometryError("tree has no vertices");
    adj_.assign(nv, {});
    int rays = 0, finite = 0;
    for (int e = 0; e < static_cast<int>(tree_.edges.size()); ++e) {
        const auto& ed = tree_.edges[e];
        if (ed.tail < 0 || ed.tail >= nv) throw GeometryError("edge with bad tail");
        if (ed.ray) {
            ++rays;
            adj_[ed.tail].push_back({e, -1, true});
        } else {
            if (ed.head < 0 || ed.head >= nv) throw GeometryError("edge with bad head");
            ++finite;
            adj_[ed.tail].push_back({e, ed.head, true});
            adj_[ed.head].push_back({e, ed.tail, false});
        }
    }
    if (rays < 2) throw GeometryError("a tree needs at least two rays");
    if (finite != nv - 1) throw GeometryError("finite edges do not form a tree");
    for (int v = 0; v < nv; ++v)
        if (adj_[v].size() < 2)
            throw GeometryError("vertex " + tree_.vertices[v] + " has degree < 2 (geodesics would not extend)");

    vdist_.assign(nv, std::vector<Num>(nv, Num(0)));
    parent_edge_.assign(nv, std::vector<int>(nv, -2));
    for (int root = 0; root < nv; ++root) {
        std::deque<int> queue{root};
        parent_edge_[root][root] = -1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (const auto& inc : adj_[v]) {
                if (inc.other < 0 || parent_edge_[root][inc.other] != -2) continue;
                parent_edge_[root][inc.other] = inc.edge;
                vdist_[root][inc.other] = vdist_[root][v] + Num(tree_.edges[inc.edge].length);
                queue.push_back(inc.other);
            }
        }
        for (int v = 0; v < nv; ++v)
            if (parent_edge_[root][v] == -2) throw GeometryError("tree is disconnected");
    }
    if (!exact())
        for (auto& row : vdist_)
            for (auto& d : row) d = d.inexact_copy();
}

// ---------------------------------------------------------------------------
// Scalars and points

Num ModelSpace::num(const Rational& r) const
{
    if (exact()) return Num(r);
    return Num(r.convert_to<double>());
}

Num ModelSpace::num(double v) const
{
    if (exact()) return Num::exact_double(v);
    return Num(v);
}

Point ModelSpace::point(const Num& x, const Num& y) const
{
    if (kind_ != SpaceKind::euclidean_plane) throw GeometryError("point(x, y) needs a euclidean space");
    Point p;
    p.kind = kind_;
    p.x = exact() ? x : x.inexact_copy();
    p.y = exact() ? y : y.inexact_copy();
    return p;
}

Point ModelSpace::hyperbolic_point(double x0, double x1, double x2) const
{
    if (kind_ != SpaceKind::hyperbolic_plane) throw GeometryError("hyperboloid point in a non-hyperbolic space");
    Vec3 v{x0, x1, x2};
    double n = lorentz(v, v);
    if (x0 <= 0 || std::abs(n + 1.0) > 1e-12 * std::max(1.0, x0 * x0))
        throw GeometryError("point is not on the upper hyperboloid sheet");
    Point p;
    p.kind = kind_;
    p.h = renormalize(v);
    return p;
}

Point ModelSpace::polar(double r, double phi) const
{
    if (kind_ != SpaceKind::hyperbolic_plane) throw GeometryError("polar() needs the hyperbolic plane");
    Point p;
    p.kind = kind_;
    p.h = lift(std::sinh(r) * std::cos(phi), std::sinh(r) * std::sin(phi));
    return p;
}

Point ModelSpace::origin() const
{
    switch (kind_) {
    case SpaceKind::euclidean_plane: return point(Num(0), Num(0));
    case SpaceKind::hyperbolic_plane: return polar(0, 0);
    case SpaceKind::metric_tree: return vertex_point(0);
    case SpaceKind::tree_cross_line: {
        Point p = vertex_point(0);
        p.y = exact() ? Num(0) : Num(0.0);
        return p;
    }
    }
    return {};
}

Point ModelSpace::tree_point(int edge, const Num& offset) const
{
    if (kind_ != SpaceKind::metric_tree && kind_ != SpaceKind::tree_cross_line)
        throw GeometryError("tree point in a non-tree space");
    if (edge < 0 || edge >= static_cast<int>(tree_.edges.size())) throw GeometryError("bad edge id");
    Point p;
    p.kind = SpaceKind::metric_tree;
    p.edge = edge;
    p.offset = exact() ? offset : offset.inexact_copy();
    const auto& e = tree_.edges[edge];
    if (p.offset.sign() < 0 || (!e.ray && p.offset > Num(e.length)))
        throw GeometryError("tree offset outside the edge");
    if (kind_ == SpaceKind::tree_cross_line) {
        p.kind = kind_;
        p.y = exact() ? Num(0) : Num(0.0);
    }
    return p;
}

Point ModelSpace::vertex_point(int vertex) const
{
    if (vertex < 0 || vertex >= static_cast<int>(adj_.size())) throw GeometryError("bad vertex id");
    const Incidence* best = nullptr;
    for (const auto& inc : adj_[vertex])
        if (!best || inc.edge < best->edge) best = &inc;
    Num off = best->at_tail ? Num(0) : Num(tree_.edges[best->edge].length);
    return tree_point(best->edge, off);
}

Point ModelSpace::product_point(int edge, const Num& offset, const Num& height) const
{
    if (kind_ != SpaceKind::tree_cross_line) throw GeometryError("product point needs tree_cross_line");
    Point p = tree_point(edge, offset);
    p.y = exact() ? height : height.inexact_copy();
    return p;
}

Point ModelSpace::tree_part(const Point& p) const
{
    Point t = p;
    t.kind = SpaceKind::metric_tree;
    t.y = Num(0);
    return t;
}

IdealPoint ModelSpace::direction(const Num& ux, const Num& uy) const
{
    if (kind_ != SpaceKind::euclidean_plane) throw GeometryError("direction() needs a euclidean space");
    Num n2 = ux * ux + uy * uy;
    if (n2.sign() == 0) throw GeometryError("zero direction");
    Num n = sqrt(n2);
    IdealPoint xi;
    xi.kind = kind_;
    xi.ux = ux / n;
    xi.uy = uy / n;
    if (!exact()) {
        xi.ux = xi.ux.inexact_copy();
        xi.uy = xi.uy.inexact_copy();
    }
    return xi;
}

IdealPoint ModelSpace::boundary_angle(double theta) const
{
    if (kind_ != SpaceKind::hyperbolic_plane) throw GeometryError("boundary_angle() needs the hyperbolic plane");
    IdealPoint xi;
    xi.kind = kind_;
    xi.theta = wrap_angle(theta);
    return xi;
}

IdealPoint ModelSpace::end(int ray) const
{
    if (kind_ != SpaceKind::metric_tree) throw GeometryError("end() needs a metric tree");
    if (ray < 0 || ray >= static_cast<int>(tree_.edges.size()) || !tree_.edges[ray].ray)
        throw GeometryError("not a ray id");
    IdealPoint xi;
    xi.kind = kind_;
    xi.ray = ray;
    return xi;
}

IdealPoint ModelSpace::product_end(int ray, int slope) const
{
    if (kind_ != SpaceKind::tree_cross_line) throw GeometryError("product_end() needs tree_cross_line");
    if (slope < -1 || slope > 1) throw GeometryError("slope must be -1, 0 or 1");
    if (ray == -1) {
        if (slope == 0) throw GeometryError("vertical end needs slope +-1");
    } else if (ray < 0 || ray >= static_cast<int>(tree_.edges.size()) || !tree_.edges[ray].ray) {
        throw GeometryError("not a ray id");
    }
    IdealPoint xi;
    xi.kind = kind_;
    xi.ray = ray;
    xi.slope = slope;
    return xi;
}

void ModelSpace::validate(const Point& p) const
{
    if (p.kind != kind_) throw GeometryError("point belongs to a different space kind");
    if (kind_ == SpaceKind::hyperbolic_plane) {
        double n = lorentz(p.h, p.h);
        if (p.h[0] <= 0 || std::abs(n + 1.0) > 1e-12 * std::max(1.0, p.h[0] * p.h[0]))
            throw GeometryError("point is off the hyperboloid");
    }
    if (kind_ == SpaceKind::metric_tree || kind_ == SpaceKind::tree_cross_line) {
        if (p.edge < 0 || p.edge >= static_cast<int>(tree_.edges.size())) throw GeometryError("bad edge id");
        const auto& e = tree_.edges[p.edge];
        if (p.offset.sign() < 0 || (!e.ray && p.offset > Num(e.length)))
            throw GeometryError("tree offset outside the edge");
    }
}

bool ModelSpace::same_ideal(const IdealPoint& a, const IdealPoint& b) const
{
    if (a.kind != kind_ || b.kind != kind_) throw GeometryError("ideal point of another space kind");
    switch (kind_) {
    case SpaceKind::euclidean_plane:
        if (exact() && a.ux.exact() && b.ux.exact() && a.uy.exact() && b.uy.exact())
            return a.ux == b.ux && a.uy == b.uy;
        return std::abs(a.ux.value() - b.ux.value()) < 1e-12 && std::abs(a.uy.value() - b.uy.value()) < 1e-12;
    case SpaceKind::hyperbolic_plane:
        return std::abs(std::remainder(a.theta - b.theta, 2 * kPi)) < 1e-12;
    case SpaceKind::metric_tree: return a.ray == b.ray;
    case SpaceKind::tree_cross_line: return a.ray == b.ray && a.slope == b.slope;
    }
    return false;
}

bool ModelSpace::same_point(const Point& p, const Point& q) const
{
    Num d = distance(p, q);
    if (d.exact()) return d.sign() == 0;
    return d.value() <= 1e-12;
}

// ---------------------------------------------------------------------------
// Distances

int ModelSpace::vertex_of(const Point& p) const
{
    const auto& e = tree_.edges[p.edge];
    if (p.offset.sign() == 0) return e.tail;
    if (!e.ray && p.offset == Num(e.length)) return e.head;
    return -1;
}

int ModelSpace::degree(int vertex) const { return static_cast<int>(adj_.at(vertex).size()); }

std::vector<ModelSpace::Exit> ModelSpace::exits(const Point& p) const
{
    if (int v = vertex_of(p); v >= 0) return {Exit{v, Num(0), std::nullopt}};
    const auto& e = tree_.edges[p.edge];
    std::vector<Exit> out;
    out.push_back(Exit{e.tail, p.offset, TreeStep{p.edge, p.offset, Num(0)}});
    if (!e.ray) {
        Num len(e.length);
        out.push_back(Exit{e.head, len - p.offset, TreeStep{p.edge, p.offset, len}});
    }
    if (!exact())
        for (auto& x : out) x.cost = x.cost.inexact_copy();
    return out;
}

Num ModelSpace::tree_distance(const Point& p, const Point& q) const
{
    if (p.edge == q.edge) return abs(p.offset - q.offset);
    std::optional<Num> best;
    for (const auto& a : exits(p))
        for (const auto& b : exits(q)) {
            Num d = a.cost + vdist_[a.vertex][b.vertex] + b.cost;
            if (!best || d < *best) best = d;
        }
    return *best;
}

Num ModelSpace::distance(const Point& p, const Point& q) const
{
    if (p.kind != kind_ || q.kind != kind_) throw GeometryError("mismatched space tags");
    switch (kind_) {
    case SpaceKind::euclidean_plane: return sqrt(sq(p.x - q.x) + sq(p.y - q.y));
    case SpaceKind::hyperbolic_plane: return Num(hyper_distance(p.h, q.h));
    case SpaceKind::metric_tree: return tree_distance(p, q);
    case SpaceKind::tree_cross_line: {
        Num dt = tree_distance(p, q);
        Num dy = p.y - q.y;
        if (dy.sign() == 0) return dt;
        if (dt.sign() == 0) return abs(dy);
        return sqrt(sq(dt) + sq(dy));
    }
    }
    return Num(0.0);
}

std::pair<int, bool> ModelSpace::compare_distance(const Point& p, const Point& q, const Num& r) const
{
    if (p.kind != kind_ || q.kind != kind_) throw GeometryError("mismatched space tags");
    Num lhs;
    switch (kind_) {
    case SpaceKind::euclidean_plane: lhs = sq(p.x - q.x) + sq(p.y - q.y); break;
    case SpaceKind::hyperbolic_plane: {
        double d = hyper_distance(p.h, q.h);
        return {(d > r.value()) - (d < r.value()), false};
    }
    case SpaceKind::metric_tree: {
        Num diff = tree_distance(p, q) - r;
        return {diff.sign(), diff.exact()};
    }
    case SpaceKind::tree_cross_line: lhs = sq(tree_distance(p, q)) + sq(p.y - q.y); break;
    }
    if (r.sign() < 0) return {1, r.exact()};
    Num diff = lhs - r * r;
    return {diff.sign(), diff.exact()};
}

// ---------------------------------------------------------------------------
// Tree paths

std::vector<int> ModelSpace::vertex_path_edges(int a, int b) const
{
    std::vector<int> edges;
    int v = a;
    while (v != b) {
        int e = parent_edge_[b][v];
        edges.push_back(e);
        const auto& ed = tree_.edges[e];
        v = ed.tail == v ? ed.head : ed.tail;
    }
    return edges;
}

std::vector<ModelSpace::TreeStep> ModelSpace::tree_path_steps(const Point& p, const Point& q) const
{
    std::vector<TreeStep> steps;
    if (p.edge == q.edge) {
        if (p.offset != q.offset) steps.push_back(TreeStep{p.edge, p.offset, q.offset});
        return steps;
    }
    const Exit* ba = nullptr;
    const Exit* bb = nullptr;
    std::optional<Num> best;
    auto ep = exits(p);
    auto eq = exits(q);
    for (const auto& a : ep)
        for (const auto& b : eq) {
            Num d = a.cost + vdist_[a.vertex][b.vertex] + b.cost;
            if (!best || d < *best) {
                best = d;
                ba = &a;
                bb = &b;
            }
        }
    if (ba->step) steps.push_back(*ba->step);
    int v = ba->vertex;
    for (int e : vertex_path_edges(ba->vertex, bb->vertex)) {
        const auto& ed = tree_.edges[e];
        Num len(ed.length);
        if (ed.tail == v) {
            steps.push_back(TreeStep{e, Num(0), len});
            v = ed.head;
        } else {
            steps.push_back(TreeStep{e, len, Num(0)});
            v = ed.tail;
        }
    }
    if (bb->step) steps.push_back(TreeStep{bb->step->edge, bb->step->to, bb->step->from});
    if (!exact())
        for (auto& s : steps) {
            s.from = s.from.inexact_copy();
            s.to = s.to.inexact_copy();
        }
    return steps;
}

std::vector<ModelSpace::TreeStep> ModelSpace::extend_from_vertex(int vertex, int arrived_by) const
{
    std::vector<TreeStep> out;
    int v = vertex;
    int from = arrived_by;
    for (;;) {
        const Incidence* next = nullptr;
        for (const auto& inc : adj_[v])
            if (inc.edge != from && (!next || inc.edge < next->edge)) next = &inc;
        const auto& ed = tree_.edges[next->edge];
        if (ed.ray) {
            out.push_back(TreeStep{next->edge, Num(0), Num(0), true});
            return out;
        }
        Num len = exact() ? Num(ed.length) : Num(ed.length.convert_to<double>());
        Num zero = exact() ? Num(0) : Num(0.0);
        if (next->at_tail)
            out.push_back(TreeStep{next->edge, zero, len});
        else
            out.push_back(TreeStep{next->edge, len, zero});
        from = next->edge;
        v = next->other;
    }
}

std::vector<ModelSpace::TreeStep> ModelSpace::continue_step(int edge, const Num& offset, int dir) const
{
    const auto& ed = tree_.edges[edge];
    std::vector<TreeStep> out;
    if (ed.ray && dir > 0) {
        out.push_back(TreeStep{edge, offset, offset, true});
        return out;
    }
    Num target = dir > 0 ? Num(ed.length) : Num(0);
    if (!exact()) target = target.inexact_copy();
    if (offset != target) out.push_back(TreeStep{edge, offset, target});
    int v = dir > 0 ? ed.head : ed.tail;
    auto rest = extend_from_vertex(v, edge);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

std::vector<TreeLeg> ModelSpace::legs_from(const std::vector<TreeStep>& back, const std::vector<TreeStep>& fwd) const
{
    std::vector<TreeLeg> legs;
    Num zero = exact() ? Num(0) : Num(0.0);
    Num T = zero;
    for (const auto& s : back) {
        TreeLeg leg;
        leg.edge = s.edge;
        leg.dir = -s.dir();
        leg.t_ref = T;
        leg.s_ref = s.from;
        leg.hi = T;
        if (s.to_inf) {
            leg.lo_inf = true;
            legs.push_back(leg);
            break;
        }
        T = T - abs(s.to - s.from);
        leg.lo = T;
        legs.push_back(leg);
    }
    std::reverse(legs.begin(), legs.end());
    T = zero;
    for (const auto& s : fwd) {
        TreeLeg leg;
        leg.edge = s.edge;
        leg.dir = s.dir();
        leg.t_ref = T;
        leg.s_ref = s.from;
        leg.lo = T;
        if (s.to_inf) {
            leg.hi_inf = true;
            legs.push_back(leg);
            break;
        }
        T = T + abs(s.to - s.from);
        leg.hi = T;
        legs.push_back(leg);
    }
    return legs;
}

Point ModelSpace::tree_walk(const Point& p, const Point& q, const Num& s) const
{
    Num left = s;
    for (const auto& st : tree_path_steps(p, q)) {
        Num len = abs(st.to - st.from);
        if (left <= len) {
            Point r = p;
            r.edge = st.edge;
            r.offset = st.from + Num(st.dir()) * left;
            return r;
        }
        left -= len;
    }
    Point r = p;
    r.edge = q.edge;
    r.offset = q.offset;
    return r;
}

Geodesic ModelSpace::tree_geodesic_through(const Point& p, const Point& q) const
{
    auto path = tree_path_steps(p, q);
    if (path.empty()) throw GeometryError("geodesic_through needs distinct points");
    const auto& first = path.front();
    const auto& last = path.back();
    auto back = continue_step(first.edge, first.from, -first.dir());
    auto fwd_tail = continue_step(last.edge, last.to, last.dir());
    path.insert(path.end(), fwd_tail.begin(), fwd_tail.end());
    Geodesic g;
    g.kind = SpaceKind::metric_tree;
    g.legs = legs_from(back, path);
    return g;
}

Geodesic ModelSpace::tree_ray_to_end(const Point& p, int ray) const
{
    std::vector<TreeStep> path;
    if (p.edge == ray) {
        path.push_back(TreeStep{ray, p.offset, p.offset, true});
    } else {
        path = tree_path_steps(p, vertex_point(tree_.edges[ray].tail));
        Num zero = exact() ? Num(0) : Num(0.0);
        path.push_back(TreeStep{ray, zero, zero, true});
    }
    Geodesic g;
    g.kind = SpaceKind::metric_tree;
    g.domain = Domain::ray;
    g.lo = exact() ? Num(0) : Num(0.0);
    g.lo_inf = false;
    g.legs = legs_from({}, path);
    return g;
}

Geodesic ModelSpace::tree_line_between(int ray_plus, int ray_minus, const Point& anchor) const
{
    if (ray_plus == ray_minus) throw GeometryError("a line needs two distinct ends");
    Num zero = exact() ? Num(0) : Num(0.0);
    std::vector<TreeStep> back{TreeStep{ray_minus, zero, zero, true}};
    int a = tree_.edges[ray_minus].tail;
    int b = tree_.edges[ray_plus].tail;
    std::vector<TreeStep> fwd;
    if (a != b) fwd = tree_path_steps(vertex_point(a), vertex_point(b));
    fwd.push_back(TreeStep{ray_plus, zero, zero, true});
    Geodesic g;
    g.kind = SpaceKind::metric_tree;
    g.legs = legs_from(back, fwd);
    Projection pr = tree_project(anchor, g);
    return reparametrize(g, pr.t);
}

Num ModelSpace::tree_busemann(int ray, const Point& basepoint, const Point& x) const
{
    int tail = tree_.edges[ray].tail;
    Point tp = vertex_point(tail);
    auto g = [&](const Point& p) { return p.edge == ray ? -p.offset : tree_distance(p, tp); };
    return g(x) - g(basepoint);
}

Projection ModelSpace::tree_project(const Point& x, const Geodesic& c) const
{
    std::optional<Num> best_d;
    Projection best;
    auto consider = [&](const Num& t) {
        if (!in_domain(c, t)) return;
        Point f = eval(c, t);
        Point ft = tree_part(f);
        Num d = tree_distance(tree_part(x), ft);
        if (!best_d || d < *best_d) {
            best_d = d;
            best.t = t;
            best.foot = ft;
        }
    };
    for (const auto& leg : c.legs) {
        if (!leg.lo_inf) consider(leg.lo);
        if (!leg.hi_inf) consider(leg.hi);
        if (leg.edge == x.edge) {
            // offset(t) = s_ref + dir (t - t_ref)  =>  t = t_ref + dir (offset - s_ref)
            Num t = leg.t_ref + Num(leg.dir) * (x.offset - leg.s_ref);
            if ((leg.lo_inf || t >= leg.lo) && (leg.hi_inf || t <= leg.hi)) consider(t);
        }
    }
    if (!best_d) throw GeometryError("projection onto an empty geodesic");
    return best;
}

// ---------------------------------------------------------------------------
// Geodesics

bool in_domain(const Geodesic& c, const Num& t)
{
    if (!c.lo_inf && t < c.lo) return false;
    if (!c.hi_inf && t > c.hi) return false;
    return true;
}

namespace {

Point tree_eval(const Geodesic& c, const Num& s, SpaceKind kind)
{
    for (const auto& leg : c.legs) {
        if (!leg.lo_inf && s < leg.lo) continue;
        if (!leg.hi_inf && s > leg.hi) continue;
        Point p;
        p.kind = kind;
        p.edge = leg.edge;
        p.offset = leg.s_ref + Num(leg.dir) * (s - leg.t_ref);
        if (p.offset.sign() < 0) p.offset = p.offset.exact() ? Num(0) : Num(0.0);
        return p;
    }
    throw GeometryError("parameter outside the tree path");
}

}  // namespace

Point eval(const Geodesic& c, const Num& t)
{
    if (!in_domain(c, t)) throw GeometryError("parameter " + t.str() + " outside the geodesic domain");
    Point p;
    p.kind = c.kind;
    switch (c.kind) {
    case SpaceKind::euclidean_plane:
        p.x = c.px + t * c.ex;
        p.y = c.py + t * c.ey;
        return p;
    case SpaceKind::hyperbolic_plane: {
        double tv = t.value();
        p.h = renormalize(add(scale(c.P, std::cosh(tv)), c.U, std::sinh(tv)));
        return p;
    }
    case SpaceKind::metric_tree: return tree_eval(c, t, c.kind);
    case SpaceKind::tree_cross_line: {
        if (c.alpha.sign() == 0) {
            p = c.foot;
            p.kind = c.kind;
        } else {
            p = tree_eval(c, c.alpha * t, c.kind);
        }
        p.y = c.h0 + c.beta * t;
        return p;
    }
    }
    return p;
}

Point eval(const Geodesic& c, double t)
{
    const bool exact_carrier = (c.kind == SpaceKind::euclidean_plane && c.px.exact() && c.ex.exact()) ||
                               (c.kind == SpaceKind::metric_tree && !c.legs.empty() && c.legs.front().s_ref.exact());
    return eval(c, exact_carrier ? Num::exact_double(t) : Num(t));
}

Geodesic reparametrize(const Geodesic& c, const Num& shift)
{
    Geodesic g = c;
    if (!g.lo_inf) g.lo = g.lo - shift;
    if (!g.hi_inf) g.hi = g.hi - shift;
    auto shift_legs = [](std::vector<TreeLeg>& legs, const Num& s) {
        for (auto& leg : legs) {
            leg.t_ref = leg.t_ref - s;
            if (!leg.lo_inf) leg.lo = leg.lo - s;
            if (!leg.hi_inf) leg.hi = leg.hi - s;
        }
    };
    switch (c.kind) {
    case SpaceKind::euclidean_plane:
        g.px = c.px + shift * c.ex;
        g.py = c.py + shift * c.ey;
        break;
    case SpaceKind::hyperbolic_plane: {
        double s = shift.value();
        g.P = renormalize(add(scale(c.P, std::cosh(s)), c.U, std::sinh(s)));
        g.U = add(scale(c.P, std::sinh(s)), c.U, std::cosh(s));
        // Re-orthogonalize the tangent against the new anchor.
        g.U = add(g.U, g.P, lorentz(g.U, g.P));
        g.U = scale(g.U, 1.0 / std::sqrt(lorentz(g.U, g.U)));
        break;
    }
    case SpaceKind::metric_tree: shift_legs(g.legs, shift); break;
    case SpaceKind::tree_cross_line:
        if (c.alpha.sign() != 0) shift_legs(g.legs, c.alpha * shift);
        g.h0 = c.h0 + c.beta * shift;
        break;
    }
    return g;
}

Geodesic reversed(const Geodesic& c)
{
    Geodesic g = c;
    g.lo_inf = c.hi_inf;
    g.hi_inf = c.lo_inf;
    if (!c.hi_inf) g.lo = -c.hi;
    if (!c.lo_inf) g.hi = -c.lo;
    if (c.domain == Domain::ray) g.domain = Domain::ray;  // now (-inf, 0]; callers rarely reverse rays
    auto flip = [](std::vector<TreeLeg>& legs) {
        std::reverse(legs.begin(), legs.end());
        for (auto& leg : legs) {
            leg.t_ref = -leg.t_ref;
            leg.dir = -leg.dir;
            std::swap(leg.lo_inf, leg.hi_inf);
            Num lo = leg.lo, hi = leg.hi;
            leg.lo = -hi;
            leg.hi = -lo;
        }
    };
    switch (c.kind) {
    case SpaceKind::euclidean_plane:
        g.ex = -c.ex;
        g.ey = -c.ey;
        break;
    case SpaceKind::hyperbolic_plane: g.U = scale(c.U, -1.0); break;
    case SpaceKind::metric_tree: flip(g.legs); break;
    case SpaceKind::tree_cross_line:
        if (c.alpha.sign() != 0) flip(g.legs);
        g.beta = -c.beta;
        break;
    }
    return g;
}

Geodesic ModelSpace::geodesic_through(const Point& p, const Point& q) const
{
    validate(p);
    validate(q);
    Geodesic g;
    g.kind = kind_;
    switch (kind_) {
    case SpaceKind::euclidean_plane: {
        Num d = distance(p, q);
        if (d.sign() == 0) throw GeometryError("geodesic_through needs distinct points");
        g.px = p.x;
        g.py = p.y;
        g.ex = (q.x - p.x) / d;
        g.ey = (q.y - p.y) / d;
        return g;
    }
    case SpaceKind::hyperbolic_plane: {
        double d = hyper_distance(p.h, q.h);
        if (d <= 0) throw GeometryError("geodesic_through needs distinct points");
        g.P = p.h;
        // Tangent toward q: component of q orthogonal to p, normalized.
        Vec3 u = add(q.h, p.h, lorentz(p.h, q.h));
        g.U = scale(u, 1.0 / std::sqrt(lorentz(u, u)));
        return g;
    }
    case SpaceKind::metric_tree: return tree_geodesic_through(p, q);
    case SpaceKind::tree_cross_line: {
        Num dt = tree_distance(p, q);
        Num dy = q.y - p.y;
        Num d = distance(p, q);
        if (d.sign() == 0) throw GeometryError("geodesic_through needs distinct points");
        g.h0 = p.y;
        g.beta = dy / d;
        if (dt.sign() == 0) {
            g.alpha = exact() ? Num(0) : Num(0.0);
            g.foot = p;
        } else {
            g.alpha = dt / d;
            Geodesic t = tree_geodesic_through(tree_part(p), tree_part(q));
            g.legs = t.legs;
        }
        return g;
    }
    }
    return g;
}

Geodesic ModelSpace::segment(const Point& p, const Point& q) const
{
    Geodesic g = geodesic_through(p, q);
    g.domain = Domain::segment;
    g.lo = exact() ? Num(0) : Num(0.0);
    g.hi = distance(p, q);
    g.lo_inf = g.hi_inf = false;
    return g;
}

Geodesic ModelSpace::geodesic_to_ideal(const Point& p, const IdealPoint& xi) const
{
    validate(p);
    if (xi.kind != kind_) throw GeometryError("ideal point not representable in this space kind");
    Geodesic g;
    g.kind = kind_;
    switch (kind_) {
    case SpaceKind::euclidean_plane:
        g.px = p.x;
        g.py = p.y;
        g.ex = xi.ux;
        g.ey = xi.uy;
        break;
    case SpaceKind::hyperbolic_plane: {
        Vec3 n = null_vector(xi.theta);
        double k = -lorentz(p.h, n);
        g.P = p.h;
        g.U = add(scale(n, 1.0 / k), p.h, -1.0);
        break;
    }
    case SpaceKind::metric_tree: return tree_ray_to_end(p, xi.ray);
    case SpaceKind::tree_cross_line: {
        g.h0 = p.y;
        if (xi.ray < 0) {
            g.alpha = exact() ? Num(0) : Num(0.0);
            g.beta = exact() ? Num(xi.slope) : Num(static_cast<double>(xi.slope));
            g.foot = p;
        } else {
            Geodesic t = tree_ray_to_end(tree_part(p), xi.ray);
            g.legs = t.legs;
            if (xi.slope == 0) {
                g.alpha = exact() ? Num(1) : Num(1.0);
                g.beta = exact() ? Num(0) : Num(0.0);
            } else {
                Num h = sqrt(exact() ? Num(Rational(1, 2)) : Num(0.5));
                g.alpha = h;
                g.beta = Num(xi.slope) * h;
            }
        }
        break;
    }
    }
    g.domain = Domain::ray;
    g.lo = exact() ? Num(0) : Num(0.0);
    g.lo_inf = false;
    return g;
}

Geodesic ModelSpace::geodesic_between_ideals(const IdealPoint& xi, const IdealPoint& eta, const Point& anchor) const
{
    validate(anchor);
    if (xi.kind != kind_ || eta.kind != kind_) throw GeometryError("ideal point not representable in this space kind");
    if (same_ideal(xi, eta)) throw GeometryError("geodesic_between_ideals needs distinct ideal points");
    Geodesic g;
    g.kind = kind_;
    switch (kind_) {
    case SpaceKind::euclidean_plane: {
        bool opposite = exact() && xi.ux.exact() && eta.ux.exact()
                            ? (xi.ux + eta.ux).sign() == 0 && (xi.uy + eta.uy).sign() == 0
                            : std::abs(xi.ux.value() + eta.ux.value()) < 1e-12 &&
                                  std::abs(xi.uy.value() + eta.uy.value()) < 1e-12;
        if (!opposite) throw GeometryError("no geodesic joins non-opposite euclidean directions");
        g.px = anchor.x;
        g.py = anchor.y;
        g.ex = xi.ux;
        g.ey = xi.uy;
        return g;
    }
    case SpaceKind::hyperbolic_plane: {
        Vec3 np = null_vector(xi.theta);
        Vec3 nm = null_vector(eta.theta);
        double k = -lorentz(np, nm);
        double s = 1.0 / std::sqrt(2.0 * k);
        g.P = renormalize(scale(add(np, nm), s));
        g.U = scale(add(np, nm, -1.0), s);
        Projection pr = project(anchor, g);
        return reparametrize(g, pr.t);
    }
    case SpaceKind::metric_tree: return tree_line_between(xi.ray, eta.ray, anchor);
    case SpaceKind::tree_cross_line: {
        if (xi.ray < 0 || eta.ray < 0) {
            if (!(xi.ray < 0 && eta.ray < 0 && xi.slope == -eta.slope))
                throw GeometryError("no geodesic joins these product ends");
            g.alpha = exact() ? Num(0) : Num(0.0);
            g.beta = exact() ? Num(xi.slope) : Num(static_cast<double>(xi.slope));
            g.foot = anchor;
            g.h0 = anchor.y;
            return g;
        }
        if (xi.slope != -eta.slope || xi.ray == eta.ray)
            throw GeometryError("no geodesic joins these product ends");
        Geodesic t = tree_line_between(xi.ray, eta.ray, tree_part(anchor));
        g.legs = t.legs;
        g.h0 = anchor.y;
        if (xi.slope == 0) {
            g.alpha = exact() ? Num(1) : Num(1.0);
            g.beta = exact() ? Num(0) : Num(0.0);
        } else {
            Num h = sqrt(exact() ? Num(Rational(1, 2)) : Num(0.5));
            g.alpha = h;
            g.beta = Num(xi.slope) * h;
        }
        return g;
    }
    }
    return g;
}

Point ModelSpace::interpolate(const Point& p, const Point& q, const Rational& lambda) const
{
    validate(p);
    validate(q);
    Num l = num(lambda);
    switch (kind_) {
    case SpaceKind::euclidean_plane: return point(p.x + l * (q.x - p.x), p.y + l * (q.y - p.y));
    case SpaceKind::hyperbolic_plane: {
        double d = hyper_distance(p.h, q.h);
        if (d <= 0) return p;
        // z = (sinh((1 - l) d) p + sinh(l d) q) / sinh(d), in extended precision: far endpoints
        // cancel heavily when the segment passes near the origin.
        using L = long double;
        const L l = lambda.convert_to<double>();
        const L wp = std::sinh((1 - l) * L(d)) / std::sinh(L(d)), wq = std::sinh(l * L(d)) / std::sinh(L(d));
        Point z;
        z.kind = kind_;
        z.h = lift(static_cast<double>(wp * p.h[1] + wq * q.h[1]), static_cast<double>(wp * p.h[2] + wq * q.h[2]));
        return z;
    }
    case SpaceKind::metric_tree: return tree_walk(p, q, l * tree_distance(p, q));
    case SpaceKind::tree_cross_line: {
        Point r = tree_walk(p, q, l * tree_distance(p, q));
        r.kind = kind_;
        r.y = p.y + l * (q.y - p.y);
        return r;
    }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Busemann functions, projections, angles

Num ModelSpace::busemann(const IdealPoint& xi, const Point& basepoint, const Point& x) const
{
    validate(basepoint);
    validate(x);
    if (xi.kind != kind_) throw GeometryError("ideal point of another space kind");
    switch (kind_) {
    case SpaceKind::euclidean_plane: return -((x.x - basepoint.x) * xi.ux + (x.y - basepoint.y) * xi.uy);
    case SpaceKind::hyperbolic_plane: {
        // Pairings with the null vector cancel toward xi; extended precision delays the loss.
        using L = long double;
        const L c = std::cos(L(xi.theta)), s = std::sin(L(xi.theta));
        auto pair = [&](const Vec3& v) {
            L x0 = std::sqrt(1.0L + L(v[1]) * v[1] + L(v[2]) * v[2]);
            return x0 - L(v[1]) * c - L(v[2]) * s;
        };
        return Num(static_cast<double>(std::log(pair(x.h) / pair(basepoint.h))));
    }
    case SpaceKind::metric_tree: return tree_busemann(xi.ray, basepoint, x);
    case SpaceKind::tree_cross_line: {
        Num vert = -(x.y - basepoint.y);
        if (xi.ray < 0) return Num(xi.slope) * vert;
        Num horiz = tree_busemann(xi.ray, tree_part(basepoint), tree_part(x));
        if (xi.slope == 0) return horiz;
        Num h = sqrt(exact() ? Num(Rational(1, 2)) : Num(0.5));
        return h * (horiz + Num(xi.slope) * vert);
    }
    }
    return Num(0.0);
}

Projection ModelSpace::project(const Point& x, const Geodesic& c) const
{
    validate(x);
    Projection pr;
    auto clamp = [&](Num t) {
        if (!c.lo_inf && t < c.lo) t = c.lo;
        if (!c.hi_inf && t > c.hi) t = c.hi;
        return t;
    };
    switch (kind_) {
    case SpaceKind::euclidean_plane:
        pr.t = clamp((x.x - c.px) * c.ex + (x.y - c.py) * c.ey);
        break;
    case SpaceKind::hyperbolic_plane: {
        // With d the distance to c, -<x, P -+ U> = cosh(d) e^{+-t} and <x, N> = sinh(d) for the
        // unit normal N. Using the larger pairing avoids the cancellation in the other one.
        using L = long double;
        const L x0 = std::sqrt(1.0L + L(x.h[1]) * x.h[1] + L(x.h[2]) * x.h[2]);
        auto pair = [&](double sg) {
            return x0 * (L(c.P[0]) + sg * L(c.U[0])) - L(x.h[1]) * (L(c.P[1]) + sg * L(c.U[1])) -
                   L(x.h[2]) * (L(c.P[2]) + sg * L(c.U[2]));
        };
        // Euclidean cross product w = P x U; J w is the Lorentz normal and <J w, x> = w . x.
        const L w0 = L(c.P[1]) * c.U[2] - L(c.P[2]) * c.U[1];
        const L w1 = L(c.P[2]) * c.U[0] - L(c.P[0]) * c.U[2];
        const L w2 = L(c.P[0]) * c.U[1] - L(c.P[1]) * c.U[0];
        const L wn = std::sqrt(std::max(-w0 * w0 + w1 * w1 + w2 * w2, std::numeric_limits<L>::min()));
        const L sh = (w0 * x0 + w1 * x.h[1] + w2 * x.h[2]) / wn;
        const L ch = std::sqrt(1.0L + sh * sh);
        const L ahead = pair(-1.0), behind = pair(1.0);
        const L t = ahead >= behind ? std::log(ahead / ch) : -std::log(behind / ch);
        pr.t = clamp(Num(static_cast<double>(t)));
        break;
    }
    case SpaceKind::metric_tree: return tree_project(x, c);
    case SpaceKind::tree_cross_line: {
        // Minimize sqrt((d_T(x_T, gamma(alpha t)))^2 + (y - h0 - beta t)^2).
        if (c.alpha.sign() == 0) {
            pr.t = clamp((x.y - c.h0) * c.beta);
            break;
        }
        Geodesic tg;
        tg.kind = SpaceKind::metric_tree;
        tg.legs = c.legs;
        Projection tp = tree_project(x, tg);
        // d_T(x, gamma(s)) = d0 + |s - s*|, so f(t) = (d0 + |alpha t - s*|)^2 + (dy - beta t)^2
        // is minimized at the kink or at one of the two smooth critical points.
        const Num& s_star = tp.t;
        Num d0 = tree_distance(tree_part(x), tp.foot);
        Num dy = x.y - c.h0;
        Num base = c.alpha * s_star + c.beta * dy;
        std::vector<Num> cand{s_star / c.alpha};
        Num tp_plus = base - c.alpha * d0;
        Num tp_minus = base + c.alpha * d0;
        if (c.alpha * tp_plus >= s_star) cand.push_back(tp_plus);
        if (c.alpha * tp_minus <= s_star) cand.push_back(tp_minus);
        std::optional<Num> best_f;
        for (const Num& t0 : cand) {
            Num t = clamp(t0);
            Num f = sq(d0 + abs(c.alpha * t - s_star)) + sq(dy - c.beta * t);
            if (!best_f || f < *best_f) {
                best_f = f;
                pr.t = t;
            }
        }
        break;
    }
    }
    pr.foot = eval(c, pr.t);
    return pr;
}

namespace {

/// First unit-speed leg leaving the germ base for t > 0: (edge, dir).
std::pair<int, int> tree_germ(const Geodesic& g)
{
    for (const auto& leg : g.legs) {
        if (!leg.hi_inf && leg.hi.sign() <= 0) continue;
        return {leg.edge, leg.dir};
    }
    throw GeometryError("germ has no forward leg");
}

}  // namespace

double ModelSpace::angle(const Point& x, const DirectionAtPoint& u, const DirectionAtPoint& v) const
{
    if (!same_point(u.base, x) || !same_point(v.base, x)) throw GeometryError("directions not based at x");
    switch (kind_) {
    case SpaceKind::euclidean_plane: {
        double c = u.germ.ex.value() * v.germ.ex.value() + u.germ.ey.value() * v.germ.ey.value();
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    case SpaceKind::hyperbolic_plane: {
        Geodesic gu = u.germ, gv = v.germ;
        double c = lorentz(gu.U, gv.U);
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    case SpaceKind::metric_tree: return tree_germ(u.germ) == tree_germ(v.germ) ? 0.0 : kPi;
    case SpaceKind::tree_cross_line: {
        double au = u.germ.alpha.value(), av = v.germ.alpha.value();
        double same = 1.0;
        if (au != 0 && av != 0) same = tree_germ(u.germ) == tree_germ(v.germ) ? 1.0 : -1.0;
        double c = same * au * av + u.germ.beta.value() * v.germ.beta.value();
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    }
    return 0.0;
}

bool ModelSpace::has_unique_inverse_direction(const Point& x, const DirectionAtPoint& u) const
{
    if (!same_point(u.base, x)) throw GeometryError("direction not based at x");
    switch (kind_) {
    case SpaceKind::euclidean_plane:
    case SpaceKind::hyperbolic_plane: return true;
    case SpaceKind::metric_tree: {
        int v = vertex_of(x);
        return v < 0 || degree(v) == 2;
    }
    case SpaceKind::tree_cross_line: {
        if (u.germ.alpha.sign() == 0) return true;
        int v = vertex_of(x);
        return v < 0 || degree(v) == 2;
    }
    }
    return true;
}

double ModelSpace::comparison_check(const std::array<Point, 3>& triple, int sample_count) const
{
    if (sample_count < 1) throw std::invalid_argument("sample_count must be positive");
    for (const auto& p : triple) validate(p);
    const double a = distance(triple[0], triple[1]).value();
    const double b = distance(triple[1], triple[2]).value();
    const double c = distance(triple[0], triple[2]).value();
    // Comparison triangle: P0 = (0,0), P1 = (a,0), P2 from the law of cosines.
    std::array<std::array<double, 2>, 3> bar{};
    bar[1] = {a, 0.0};
    if (a > 0) {
        double x2 = (a * a + c * c - b * b) / (2 * a);
        bar[2] = {x2, std::sqrt(std::max(0.0, c * c - x2 * x2))};
    } else {
        bar[2] = {c, 0.0};
    }
    struct Sample {
        Point p;
        std::array<double, 2> bar;
    };
    std::vector<Sample> samples;
    const int sides[3][2] = {{0, 1}, {1, 2}, {0, 2}};
    for (const auto& s : sides) {
        for (int k = 0; k <= sample_count; ++k) {
            Rational lam(k, sample_count);
            double l = lam.convert_to<double>();
            Point p = interpolate(triple[s[0]], triple[s[1]], lam);
            std::array<double, 2> pb{bar[s[0]][0] + l * (bar[s[1]][0] - bar[s[0]][0]),
                                     bar[s[0]][1] + l * (bar[s[1]][1] - bar[s[0]][1])};
            samples.push_back({p, pb});
        }
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i)
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            double d = distance(samples[i].p, samples[j].p).value();
            double db = std::hypot(samples[i].bar[0] - samples[j].bar[0], samples[i].bar[1] - samples[j].bar[1]);
            worst = std::max(worst, d - db);
        }
    return worst;
}

double ModelSpace::tits_distance(const IdealPoint& xi, const IdealPoint& eta) const
{
    switch (kind_) {
    case SpaceKind::euclidean_plane: {
        double c = xi.ux.value() * eta.ux.value() + xi.uy.value() * eta.uy.value();
        return std::acos(std::clamp(c, -1.0, 1.0));
    }
    case SpaceKind::hyperbolic_plane:
        return same_ideal(xi, eta) ? 0.0 : std::numeric_limits<double>::infinity();
    default: throw GeometryError("Tits distance is only implemented for the euclidean and hyperbolic planes");
    }
}

IdealPoint ModelSpace::ideal_end(const Geodesic& c, int side) const
{
    if (side > 0 ? !c.hi_inf : !c.lo_inf) throw GeometryError("geodesic has no ideal end on that side");
    IdealPoint xi;
    xi.kind = kind_;
    switch (kind_) {
    case SpaceKind::euclidean_plane:
        xi.ux = Num(side) * c.ex;
        xi.uy = Num(side) * c.ey;
        break;
    case SpaceKind::hyperbolic_plane: {
        Vec3 n = add(c.P, c.U, static_cast<double>(side));
        xi.theta = wrap_angle(std::atan2(n[2], n[1]));
        break;
    }
    case SpaceKind::metric_tree: xi.ray = side > 0 ? c.legs.back().edge : c.legs.front().edge; break;
    case SpaceKind::tree_cross_line: {
        int bs = c.beta.sign() * side;
        if (c.alpha.sign() == 0) {
            xi.ray = -1;
            xi.slope = bs;
        } else {
            if (bs != 0 && std::abs(std::abs(c.alpha.value()) - std::abs(c.beta.value())) > 1e-12)
                throw GeometryError("geodesic end is not factor-aligned");
            xi.ray = side > 0 ? c.legs.back().edge : c.legs.front().edge;
            xi.slope = bs;
        }
        break;
    }
    }
    return xi;
}

DirectionAtPoint ModelSpace::direction_toward(const Point& x, const Point& y) const
{
    return DirectionAtPoint{x, geodesic_through(x, y)};
}

bool ModelSpace::bounds_flat_strip(const Geodesic&) const
{
    switch (kind_) {
    case SpaceKind::euclidean_plane:
    case SpaceKind::tree_cross_line: return true;
    case SpaceKind::hyperbolic_plane:
    case SpaceKind::metric_tree: return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Point> ModelSpace::tree_sphere(const Point& p, const Num& r, const Point* away_from,
                                           std::size_t limit) const
{
    std::vector<Point> out;
    if (r.sign() < 0) return out;
    Point base = tree_part(p);
    if (r.sign() == 0) {
        out.push_back(p);
        return out;
    }
    struct Front {
        int edge;
        Num offset;
        int dir;
        Num left;
    };
    std::vector<Front> stack;
    auto push_initial = [&](int edge, const Num& offset, int dir) {
        if (away_from) {
            const auto& ed = tree_.edges[edge];
            Num room = dir > 0 ? (ed.ray ? r : Num(ed.length) - offset) : offset;
            Num h = min(room, r) / Num(2);
            Point probe = base;
            probe.edge = edge;
            probe.offset = offset + Num(dir) * h;
            Point at = tree_part(*away_from);
            if (tree_distance(probe, at) < tree_distance(base, at)) return;
        }
        stack.push_back(Front{edge, offset, dir, r});
    };
    if (int v = vertex_of(base); v >= 0) {
        for (const auto& inc : adj_[v]) {
            Num off = inc.at_tail ? Num(0) : Num(tree_.edges[inc.edge].length);
            push_initial(inc.edge, off, inc.at_tail ? 1 : -1);
        }
    } else {
        push_initial(base.edge, base.offset, 1);
        push_initial(base.edge, base.offset, -1);
    }
    while (!stack.empty() && out.size() < limit) {
        Front f = stack.back();
        stack.pop_back();
        const auto& ed = tree_.edges[f.edge];
        bool unbounded = ed.ray && f.dir > 0;
        Num room = unbounded ? f.left : (f.dir > 0 ? Num(ed.length) - f.offset : f.offset);
        if (unbounded || f.left <= room) {
            Point q = p;
            q.edge = f.edge;
            q.offset = f.offset + Num(f.dir) * f.left;
            if (!exact()) q.offset = q.offset.inexact_copy();
            out.push_back(q);
            continue;
        }
        Num left = f.left - room;
        int v = f.dir > 0 ? ed.head : ed.tail;
        for (const auto& inc : adj_[v]) {
            if (inc.edge == f.edge) continue;
            Num off = inc.at_tail ? Num(0) : Num(tree_.edges[inc.edge].length);
            stack.push_back(Front{inc.edge, off, inc.at_tail ? 1 : -1, left});
        }
    }
    return out;
}

std::vector<Point> ModelSpace::sphere_sample(const Point& y, const Num& r, int count) const
{
    validate(y);
    std::vector<Point> out;
    switch (kind_) {
    case SpaceKind::euclidean_plane:
        for (int k = 0; k < count; ++k) {
            double phi = 2 * kPi * k / count;
            if (exact()) {
                auto [c, s] = rational_unit(phi);
                out.push_back(point(y.x + r * c, y.y + r * s));
            } else {
                out.push_back(point(y.x + r * Num(std::cos(phi)), y.y + r * Num(std::sin(phi))));
            }
        }
        break;
    case SpaceKind::hyperbolic_plane: {
        // Orthonormal tangent frame at y.
        Vec3 e1 = add(Vec3{0, 1, 0}, y.h, lorentz(y.h, Vec3{0, 1, 0}));
        e1 = scale(e1, 1.0 / std::sqrt(lorentz(e1, e1)));
        Vec3 e2 = add(Vec3{0, 0, 1}, y.h, lorentz(y.h, Vec3{0, 0, 1}));
        e2 = add(e2, e1, -lorentz(e2, e1));
        e2 = scale(e2, 1.0 / std::sqrt(lorentz(e2, e2)));
        double rv = r.value();
        for (int k = 0; k < count; ++k) {
            double phi = 2 * kPi * k / count;
            Vec3 t = add(scale(e1, std::cos(phi)), e2, std::sin(phi));
            Point p;
            p.kind = kind_;
            p.h = renormalize(add(scale(y.h, std::cosh(rv)), t, std::sinh(rv)));
            out.push_back(p);
        }
        break;
    }
    case SpaceKind::metric_tree: out = tree_sphere(y, r, nullptr, static_cast<std::size_t>(count)); break;
    case SpaceKind::tree_cross_line: {
        const int rings = std::max(1, count / 8);
        for (int k = 0; k < rings && static_cast<int>(out.size()) < count; ++k) {
            double phi = -kPi / 2 + kPi * (k + 0.5) / rings;
            Num c, s;
            if (exact()) {
                std::tie(c, s) = rational_unit(phi);
            } else {
                c = Num(std::cos(phi));
                s = Num(std::sin(phi));
            }
            for (auto& q : tree_sphere(y, r * c, nullptr, static_cast<std::size_t>(count))) {
                q.y = y.y + r * s;
                out.push_back(q);
                if (static_cast<int>(out.size()) >= count) break;
            }
        }
        break;
    }
    }
    return out;
}

Point ModelSpace::random_point(std::mt19937_64& rng, double radius) const
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto grid = [&](double v) {
        if (!exact()) return Num(v);
        return Num(Rational(static_cast<long long>(std::llround(v * 1024.0)), 1024));
    };
    switch (kind_) {
    case SpaceKind::euclidean_plane: {
        double rr = radius * std::sqrt(unit(rng));
        double phi = 2 * kPi * unit(rng);
        return point(grid(rr * std::cos(phi)), grid(rr * std::sin(phi)));
    }
    case SpaceKind::hyperbolic_plane: return polar(radius * std::sqrt(unit(rng)), 2 * kPi * unit(rng));
    case SpaceKind::metric_tree:
    case SpaceKind::tree_cross_line: {
        Num rr = grid(radius * unit(rng));
        auto pts = tree_sphere(vertex_point(0), rr, nullptr, 64);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        Point p = pts[pick(rng)];
        if (kind_ == SpaceKind::tree_cross_line) {
            p.kind = kind_;
            p.y = grid(radius * (2 * unit(rng) - 1));
        }
        return p;
    }
    }
    return {};
}

// ---------------------------------------------------------------------------

std::vector<double> chart_coordinates(const Point& p)
{
    switch (p.kind) {
    case SpaceKind::euclidean_plane: return {p.x.value(), p.y.value()};
    case SpaceKind::hyperbolic_plane: return {p.h[1] / (1 + p.h[0]), p.h[2] / (1 + p.h[0])};
    case SpaceKind::metric_tree: return {static_cast<double>(p.edge), p.offset.value()};
    case SpaceKind::tree_cross_line: return {static_cast<double>(p.edge), p.offset.value(), p.y.value()};
    }
    return {};
}

std::string describe(const Point& p)
{
    std::ostringstream os;
    os.precision(12);
    switch (p.kind) {
    case SpaceKind::euclidean_plane: os << "(" << p.x.value() << ", " << p.y.value() << ")"; break;
    case SpaceKind::hyperbolic_plane: os << "[" << p.h[0] << ", " << p.h[1] << ", " << p.h[2] << "]"; break;
    case SpaceKind::metric_tree: os << "e" << p.edge << "@" << p.offset.value(); break;
    case SpaceKind::tree_cross_line:
        os << "(e" << p.edge << "@" << p.offset.value() << ", " << p.y.value() << ")";
        break;
    }
    return os.str();
}

}  // namespace cat0
