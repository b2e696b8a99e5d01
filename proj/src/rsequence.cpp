#include "cat0/rsequence.hpp"

namespace cat0 {

std::vector<Point> RSequence::window(long long center, int m) const
{
    std::vector<Point> pts;
    pts.reserve(2 * m + 1);
    for (long long z = center - m; z <= center + m; ++z) pts.push_back(at(z));
    return pts;
}

RSequence make_rsequence(const Geodesic& c, const Num& t0)
{
    if (!c.lo_inf || !c.hi_inf) throw GeometryError("an r-sequence needs a complete carrier");
    return RSequence{c, t0};
}

}  // namespace cat0
