#include "cat0/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cat0 {

std::string to_string(Answer a) { return a == Answer::le ? "le" : "gt"; }

std::string to_string(Side s)
{
    switch (s) {
    case Side::lt: return "lt";
    case Side::on: return "on";
    case Side::gt: return "gt";
    }
    return "?";
}

std::string to_string(Relation r)
{
    switch (r) {
    case Relation::closed: return "closed";
    case Relation::boundary: return "boundary";
    case Relation::interior: return "interior";
    }
    return "?";
}

std::string to_string(Membership m)
{
    switch (m) {
    case Membership::yes: return "yes";
    case Membership::no: return "no";
    case Membership::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string to_string(HoroVerdict v)
{
    switch (v) {
    case HoroVerdict::inside: return "inside";
    case HoroVerdict::on_horosphere: return "on_horosphere";
    case HoroVerdict::outside: return "outside";
    case HoroVerdict::indeterminate: return "indeterminate";
    }
    return "?";
}

// ---------------------------------------------------------------------------

std::vector<std::vector<Point>> WitnessSource::chains(const ModelSpace& space, const Point& x, const Point& y,
                                                      int n) const
{
    std::vector<Point> chain;
    chain.reserve(n + 1);
    chain.push_back(x);
    for (int k = 1; k < n; ++k) chain.push_back(space.interpolate(x, y, Rational(k, n)));
    chain.push_back(y);
    return {chain};
}

std::vector<Point> WitnessSource::perturbations(const ModelSpace& space, const Point& z, double radius, int grid,
                                                int random, std::mt19937_64& rng) const
{
    Num eta = space.num(radius);
    std::vector<Point> out = space.sphere_sample(z, eta, grid);
    for (int k = 0; k < random; ++k) {
        Point q = space.random_point(rng, 4.0);
        double d = space.distance(z, q).value();
        if (d <= radius) continue;
        Rational lam = space.exact() ? Num::exact_double(radius / d).as_rational() : Rational(radius / d);
        out.push_back(space.interpolate(z, q, lam));
    }
    return out;
}

const WitnessSource& geodesic_witnesses()
{
    static const WitnessSource source;
    return source;
}

// ---------------------------------------------------------------------------

OracleSession::OracleSession(SpacePtr space, OracleConfig config)
    : space_(std::move(space)), config_(config), rng_(config.seed)
{
    if (config_.boundary_band < 0) config_.boundary_band = space_->exact() ? 0.0 : 1e-9;
    band_ = config_.boundary_band;
}

void OracleSession::record(const Point& x, const Point& y, bool le, bool boundary, const std::string& tag)
{
    ++queries_;
    if (log_.size() < config_.log_limit) log_.push_back(QueryRecord{x, y, le, boundary, tag});
}

Side OracleSession::side_of(const Point& x, const Point& y, const Num& r) const
{
    auto [sign, exact] = space_->compare_distance(x, y, r);
    if (exact) return sign < 0 ? Side::lt : (sign == 0 ? Side::on : Side::gt);
    // Inexact comparison: the float band decides, even inside an exact session.
    double b = band_ > 0 ? band_ : 1e-9;
    double d = space_->distance(x, y).value();
    double rv = r.value();
    if (std::abs(d - rv) <= b * std::max(1.0, rv)) return Side::on;
    return d < rv ? Side::lt : Side::gt;
}

Answer OracleSession::unit_query(const Point& x, const Point& y, const std::string& tag)
{
    auto [sign, exact] = space_->compare_distance(x, y, Num(1));
    if (!exact && band_ > 0) {
        double d = space_->distance(x, y).value();
        if (std::abs(d - 1.0) < band_) throw BoundaryAmbiguity("query within the boundary band: d = " + std::to_string(d));
    }
    bool le = sign <= 0;
    record(x, y, le, false, tag);
    return le ? Answer::le : Answer::gt;
}

Side OracleSession::classify(const Point& x, const Point& y, const std::string& tag)
{
    Side s = side_of(x, y, Num(1));
    record(x, y, s != Side::gt, true, tag);
    return s;
}

bool OracleSession::probe_unique(const std::vector<Point>& chain, std::size_t i, const WitnessSource& witnesses)
{
    for (const Point& z : witnesses.perturbations(*space_, chain[i], config_.probe_radius, config_.probe_grid,
                                                  config_.probe_random, rng_)) {
        if (classify(chain[i - 1], z, "probe") == Side::gt) continue;
        if (classify(z, chain[i + 1], "probe") == Side::gt) continue;
        return false;
    }
    return true;
}

Membership OracleSession::certify_chain(const std::vector<Point>& chain, Relation relation,
                                        const WitnessSource& witnesses)
{
    if (chain.size() < 2) throw std::invalid_argument("a chain needs at least two points");
    if (witness_log_.size() < config_.log_limit) witness_log_.push_back(chain);
    int lt = 0, on = 0, gt = 0;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        switch (classify(chain[i], chain[i + 1], "chain")) {
        case Side::lt: ++lt; break;
        case Side::on: ++on; break;
        case Side::gt: ++gt; break;
        }
    }
    if (gt > 0) {
        // Equal subdivisions have equal steps; a mixed chain is a float artefact.
        if (lt == 0 && on == 0) return Membership::no;
        return Membership::indeterminate;
    }
    if (relation == Relation::closed) return Membership::yes;
    if (lt > 0) return relation == Relation::interior ? Membership::yes : Membership::no;

    // Every step sits on the unit boundary: the chain is tight unless some
    // chain point can be moved without breaking it.
    const std::size_t n = chain.size() - 1;
    bool unique = true;
    if (n >= 2) {
        const std::size_t probes = std::min<std::size_t>(n - 1, 4);
        for (std::size_t k = 1; k <= probes && unique; ++k) {
            std::size_t i = (k * n) / (probes + 1);
            i = std::clamp<std::size_t>(i, 1, n - 1);
            unique = probe_unique(chain, i, witnesses);
        }
    }
    if (relation == Relation::boundary) return unique ? Membership::yes : Membership::no;
    return unique ? Membership::no : Membership::yes;
}

Membership OracleSession::relation_member(const Point& x, const Point& y, RelationKind kind,
                                          const WitnessSource& witnesses)
{
    if (kind.level < 1) throw std::invalid_argument("relation level must be positive");
    space_->validate(x);
    space_->validate(y);
    bool undecided = false;
    bool refuted = false;
    for (const auto& chain : witnesses.chains(*space_, x, y, kind.level)) {
        Membership m = certify_chain(chain, kind.relation, witnesses);
        if (m == Membership::yes) return m;
        if (m == Membership::no) refuted = true;
        if (m == Membership::indeterminate) undecided = true;
    }
    if (undecided || !refuted) return Membership::indeterminate;
    return Membership::no;
}

Point OracleSession::midpoint_from_tube(const Point& x, const Point& y, const WitnessSource& witnesses)
{
    for (const auto& chain : witnesses.chains(*space_, x, y, 2)) {
        if (certify_chain(chain, Relation::boundary, witnesses) == Membership::yes) return chain[1];
    }
    throw GeometryError("pair is not certified on the boundary of 2V");
}

Membership OracleSession::integer_sphere_member(const Point& center, int n, const Point& y,
                                                const WitnessSource& witnesses)
{
    return relation_member(center, y, RelationKind{Relation::boundary, n}, witnesses);
}

HoroVerdict OracleSession::horoball_member(const RSequence& s, long long basepoint_index, const Point& y, int n_max,
                                           const WitnessSource& witnesses)
{
    if (n_max < 1) throw std::invalid_argument("N_max must be positive");
    for (int n = 1; n <= n_max; ++n) {
        if (relation_member(s.at(basepoint_index + n), y, RelationKind{Relation::interior, n}, witnesses) ==
            Membership::yes)
            return HoroVerdict::inside;
    }
    IdealPoint xi = space_->ideal_end(s.carrier, 1);
    double beta = space_->busemann(xi, s.at(basepoint_index), y).value();
    if (beta > config_.horosphere_band) return HoroVerdict::outside;
    if (beta < -config_.horosphere_band) return HoroVerdict::indeterminate;

    // Discretized B(y, 1) inside hb(x_{k-1}): sampled sphere points must each land in a ball.
    Num rho = space_->num(config_.horosphere_probe_radius);
    for (const Point& w : space_->sphere_sample(y, rho, config_.sphere_samples)) {
        bool covered = false;
        for (int n = 1; n <= n_max && !covered; ++n)
            covered = relation_member(s.at(basepoint_index - 1 + n), w, RelationKind{Relation::interior, n},
                                      witnesses) == Membership::yes;
        if (!covered) return HoroVerdict::indeterminate;
    }
    return HoroVerdict::on_horosphere;
}

bool OracleSession::audit() const
{
    for (const auto& q : log_) {
        auto [sign, exact] = space_->compare_distance(q.x, q.y, Num(1));
        bool le = sign <= 0;
        if (!exact) {
            double d = space_->distance(q.x, q.y).value();
            double b = band_ > 0 ? band_ : 1e-9;
            if (std::abs(d - 1.0) <= b) continue;  // band answers carry no ground-truth sign
            le = d <= 1.0;
        }
        if (le != q.le) return false;
    }
    return true;
}

void OracleSession::export_csv(std::ostream& out) const
{
    auto coords = [](const Point& p) {
        std::string s;
        for (double c : chart_coordinates(p)) {
            if (!s.empty()) s += ";";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", c);
            s += buf;
        }
        return s;
    };
    out << "x,y,answer,tag\n";
    for (const auto& q : log_)
        out << coords(q.x) << "," << coords(q.y) << "," << (q.le ? "le" : "gt") << "," << q.tag << "\n";
}

}  // namespace cat0
