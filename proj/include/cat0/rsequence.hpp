#pragma once

#include "cat0/model_spaces.hpp"

namespace cat0 {

/// Unit-spaced integer samples x(z) = c(t0 + z) of a complete geodesic.
struct RSequence {
    Geodesic carrier;
    Num t0;

    Point at(long long z) const { return eval(carrier, t0 + Num(z)); }
    /// Window x(center - m), ..., x(center + m).
    std::vector<Point> window(long long center, int m) const;
};

RSequence make_rsequence(const Geodesic& c, const Num& t0);

}  // namespace cat0
