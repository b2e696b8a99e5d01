#pragma once

#include "cat0/model_spaces.hpp"
#include "cat0/rsequence.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace cat0 {

enum class Answer { le, gt };
/// Position of a pair relative to the unit tube: inside, on its boundary, outside.
enum class Side { lt, on, gt };
enum class Relation { closed, boundary, interior };
enum class Membership { yes, no, indeterminate };
enum class HoroVerdict { inside, on_horosphere, outside, indeterminate };

std::string to_string(Answer a);
std::string to_string(Side s);
std::string to_string(Relation r);
std::string to_string(Membership m);
std::string to_string(HoroVerdict v);

struct RelationKind {
    Relation relation = Relation::closed;
    int level = 1;
};

struct BoundaryAmbiguity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OracleConfig {
    /// Negative selects the default: 0 in exact mode, 1e-9 in float mode.
    double boundary_band = -1.0;
    double probe_radius = 1e-3;
    int probe_grid = 16;
    int probe_random = 8;
    int sphere_samples = 64;
    /// Radius of the sampled sphere in the horosphere containment test.
    double horosphere_probe_radius = 0.5;
    /// Busemann band within which a point counts as on the horosphere.
    double horosphere_band = 1e-9;
    std::uint64_t seed = 1;
    /// Stored log entries are capped; the query counter is not.
    std::size_t log_limit = 200000;
};

struct QueryRecord {
    Point x, y;
    bool le = false;
    bool boundary = false;  // the query asked for the boundary relation as well
    std::string tag;
};

/// Candidate points offered to the certification channel. Proposals may use
/// full knowledge of the model space; only oracle answers certify.
class WitnessSource {
public:
    virtual ~WitnessSource() = default;
    /// Candidate chains x = z_0, ..., z_n = y.
    virtual std::vector<std::vector<Point>> chains(const ModelSpace& space, const Point& x, const Point& y,
                                                   int n) const;
    /// Perturbations of z used to probe uniqueness of a chain point.
    virtual std::vector<Point> perturbations(const ModelSpace& space, const Point& z, double radius, int grid,
                                             int random, std::mt19937_64& rng) const;
};

/// Default source: equal subdivision of the geodesic segment.
const WitnessSource& geodesic_witnesses();

class OracleSession {
public:
    explicit OracleSession(SpacePtr space, OracleConfig config = {});

    const ModelSpace& space() const { return *space_; }
    SpacePtr space_ptr() const { return space_; }
    const OracleConfig& config() const { return config_; }
    double band() const { return band_; }

    /// [d(x, y) <= 1]. Float-mode queries within the band are refused.
    Answer unit_query(const Point& x, const Point& y, const std::string& tag = "V");
    /// Query of the tube and its boundary together.
    Side classify(const Point& x, const Point& y, const std::string& tag = "dV");

    Membership relation_member(const Point& x, const Point& y, RelationKind kind,
                               const WitnessSource& witnesses = geodesic_witnesses());
    /// Certifies one given chain (z_0 ... z_n) for the level n = chain.size() - 1.
    Membership certify_chain(const std::vector<Point>& chain, Relation relation,
                             const WitnessSource& witnesses = geodesic_witnesses());

    /// The unique z with (x,z), (z,y) in V when (x,y) is on the boundary of 2V.
    Point midpoint_from_tube(const Point& x, const Point& y, const WitnessSource& witnesses = geodesic_witnesses());
    Membership integer_sphere_member(const Point& center, int n, const Point& y,
                                     const WitnessSource& witnesses = geodesic_witnesses());
    /// Membership of y in the horoball of s(+inf) through s(basepoint_index).
    HoroVerdict horoball_member(const RSequence& s, long long basepoint_index, const Point& y, int n_max,
                                const WitnessSource& witnesses = geodesic_witnesses());

    std::uint64_t query_count() const { return queries_; }
    const std::vector<QueryRecord>& query_log() const { return log_; }
    const std::vector<std::vector<Point>>& witness_log() const { return witness_log_; }
    /// Re-evaluates every logged answer against the model distance.
    bool audit() const;
    void export_csv(std::ostream& out) const;

private:
    void record(const Point& x, const Point& y, bool le, bool boundary, const std::string& tag);
    Side side_of(const Point& x, const Point& y, const Num& r) const;
    bool probe_unique(const std::vector<Point>& chain, std::size_t i, const WitnessSource& witnesses);

    SpacePtr space_;
    OracleConfig config_;
    double band_;
    std::mt19937_64 rng_;
    std::uint64_t queries_ = 0;
    std::vector<QueryRecord> log_;
    std::vector<std::vector<Point>> witness_log_;
};

}  // namespace cat0
