#pragma once

#include "cat0/oracle.hpp"
#include "cat0/rsequence.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cat0 {

struct ParallelVerdict {
    enum class Kind { equivalent, not_equivalent, inconclusive };
    Kind kind = Kind::inconclusive;
    int k = 0;        // bound for equivalent verdicts
    int window = 0;   // window inspected
};

std::string to_string(ParallelVerdict::Kind k);

enum class Rank { rank_one, higher_rank, inconclusive };
std::string to_string(Rank r);

struct RankConfig {
    int k_max = 16;
    int window = 64;
    /// Candidate directions per search.
    int density = 16;
};

struct RankResult {
    Rank rank = Rank::inconclusive;
    std::optional<RSequence> witness;
    int candidates_tried = 0;
};

/// All pairs of the window certified on the boundary of |i - j| V, using the
/// window itself as the chain.
Membership verify_rsequence(OracleSession& session, const std::vector<Point>& window,
                            const WitnessSource& witnesses = geodesic_witnesses());

/// Smallest k in [1, cap] with (x, y) certified in kV; cap + 1 when none is found.
int certified_level(OracleSession& session, const Point& x, const Point& y, int cap);

ParallelVerdict parallel_equivalent(OracleSession& session, const RSequence& s1, const RSequence& s2, int k_max,
                                    int window);

/// Candidate sequences at unit distance from s.at(0), proposed from the model geometry.
std::vector<RSequence> parallel_candidates(const ModelSpace& space, const RSequence& s, int density);

RankResult rank_classify(OracleSession& session, const RSequence& s, const RankConfig& config = {});

}  // namespace cat0
