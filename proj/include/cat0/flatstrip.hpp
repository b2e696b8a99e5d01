#pragma once

#include "cat0/oracle.hpp"
#include "cat0/rsequence.hpp"
#include "cat0/sequences.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace cat0 {

/// Isometric chart (u, v) -> X of [0, width] x R, with chart(0, v) = c(v).
struct FlatStrip {
    SpacePtr space;
    Geodesic c;
    Num width;
    bool unbounded = false;
    int sigma = 1;     // normal orientation (euclidean, sloped product lines)
    Geodesic across;   // horizontal product line through c(0) (vertical product lines)

    /// The parallel line at offset u, parametrized so that line_at(u)(v) = chart(u, v).
    Geodesic line_at(const Num& u) const;
    Point chart(const Num& u, const Num& v) const { return eval(line_at(u), v); }
};

/// Strip of the given width along c, spreading toward `toward` when given.
/// A width of zero requests an unbounded strip. Throws where c bounds no strip.
FlatStrip make_flat_strip(SpacePtr space, const Geodesic& c, const Num& width,
                          const std::optional<Point>& toward = std::nullopt);

/// Horizontal section of a point in the parallel set of c: Busemann values at both ends,
/// normalized at c(0), plus its distance from c.
struct SectionLabel {
    Num beta_minus, beta_plus;
    Num offset;
};

bool same_section(const SectionLabel& a, const SectionLabel& b);

std::vector<SectionLabel> parallel_set_sections(const ModelSpace& space, const Geodesic& c,
                                                const std::vector<Point>& probes);

/// True iff the section of x lies strictly below (farther from c(+inf) than) the section of y.
bool section_below(const ModelSpace& space, const Geodesic& c, const Point& x, const Point& y);
/// Oracle variant: y certified inside the horoball of c(+inf) through x.
Membership section_below_oracle(OracleSession& session, const Geodesic& c, const Point& x, const Point& y,
                                int n_max);

/// s(p) = 3 sqrt(4p - 1) / (2p).
Num tape_width(int p);
/// Smallest P >= 0 with tape_width(p) <= w for every p > P.
int min_tape_order(const Num& w);

struct TapeIndex {
    int i = 0;
    long long j = 1;
    long long z = 0;
};

/// 4p parallel r-sequences x_{i,j,z}, i in 0..3, j in 1..p.
struct Tape {
    int p = 0;
    FlatStrip strip;
    Num t0;      // phase of the base sequence on c
    Num step;    // h = (2p - 1) / p
    Num row;     // s(p) / 3, the offset between consecutive i

    /// Chart offset of row i and phase of x_{i,j,0}; valid for every integer j.
    Num offset(int i) const { return row * Num(i); }
    Num phase(int i, long long j) const;
    Point at(int i, long long j, long long z) const;
    Point at(const TapeIndex& ix) const { return at(ix.i, ix.j, ix.z); }
    RSequence sequence(int i, long long j) const;

    /// Quadruples of the defining system: p rows then p crossings.
    std::vector<std::vector<TapeIndex>> relations() const;
    void export_csv(std::ostream& out, int window) const;
};

/// Proposes the tape in the strip chart and certifies every relation by the oracle.
Tape build_tape(OracleSession& session, const FlatStrip& strip, const RSequence& base, int p);
/// Tape layout only; relations unchecked.
Tape layout_tape(const FlatStrip& strip, const Num& t0, int p);
/// Certifies the 2p quadruples and the unit spacing of every sequence.
Membership certify_tape(OracleSession& session, const Tape& tape);

struct RationalIndex {
    long long j = 0;
    long long z = 0;
};

/// j = p + 1 - k(m' + 1), z' = q' + 1 - 2p + 2k(m' + 1) for q = m/n, p = kn.
RationalIndex rational_index(const Rational& q, int p);
/// The index as printed: j = n + 1 - k m', same z'.
RationalIndex rational_index_as_printed(const Rational& q, int p);
/// Exhaustive search of x_{0,j,z} at parameter q, j in 1..p.
std::optional<RationalIndex> rational_index_search(const Rational& q, int p);

struct RationalPoint {
    Point point;
    RationalIndex index;
};

RationalPoint rational_point(const Tape& tape, const Rational& q);

struct FlatReconstruction {
    double estimate = 0.0;
    std::optional<Rational> exact;  // set on the rational path
    double lo = 0.0, hi = 0.0;      // certified bracket
    int tape_order = 0;
    int iterations = 0;
    std::uint64_t queries = 0;
};

struct FlatConfig {
    RankConfig rank{16, 8, 16};
    int budget = 64;
};

FlatReconstruction reconstruct_flat(OracleSession& session, const Geodesic& c, const Num& t1, const Num& t2,
                                    double tol, const FlatConfig& config = {});

}  // namespace cat0
