#pragma once

#include "cat0/model_spaces.hpp"

#include <utility>
#include <vector>

namespace cat0 {

/// Geodesics a_0, ..., a_n where a_i and a_{i+1} share the ideal endpoint on
/// side sides[i] (+1 for +inf, -1 for -inf).
struct AsymptoticChain {
    std::vector<Geodesic> links;
    std::vector<int> sides;
};

/// Side on which c1 and c2 share an ideal endpoint; +1 wins when both ends
/// agree, 0 when neither does.
int shared_side(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2);

/// Validates every link; throws GeometryError on a broken one.
AsymptoticChain make_chain(const ModelSpace& space, std::vector<Geodesic> links, std::vector<int> sides);

/// Reparametrizes c2 so that the Busemann function of xi agrees along both curves.
std::pair<Geodesic, Geodesic> normalize_pair(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2,
                                             const IdealPoint& xi);

/// c1(t) -> c2(t) for the normalized pair.
Point transfer(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2, const IdealPoint& xi,
               const Point& m);

Point chain_transfer(const ModelSpace& space, const AsymptoticChain& chain, const Point& m);

/// Chain a, a_1, a' where a_1 runs from a(-inf) through x0 to a'(+inf).
AsymptoticChain aa_prime_chain(const ModelSpace& space, const Geodesic& a, const Geodesic& a_prime,
                               const Point& x0);

/// Largest distance between c1 and c2 sampled on the shared side over [0, reach]
/// after normalization. Bounded values indicate asymptotic rays.
double asymptotic_gap(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2, int side, double reach,
                      int samples);

}  // namespace cat0
