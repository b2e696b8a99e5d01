#include "cat0/horo.hpp"

#include <algorithm>
#include <cmath>

namespace cat0 {

namespace {

int side_of(const ModelSpace& space, const Geodesic& c, const IdealPoint& xi)
{
    if (c.domain != Domain::complete) throw GeometryError("asymptotic links must be complete geodesics");
    if (space.same_ideal(space.ideal_end(c, 1), xi)) return 1;
    if (space.same_ideal(space.ideal_end(c, -1), xi)) return -1;
    return 0;
}

}  // namespace

int shared_side(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2)
{
    for (int side : {1, -1})
        if (space.same_ideal(space.ideal_end(c1, side), space.ideal_end(c2, side))) return side;
    return 0;
}

AsymptoticChain make_chain(const ModelSpace& space, std::vector<Geodesic> links, std::vector<int> sides)
{
    if (links.empty() || sides.size() + 1 != links.size())
        throw GeometryError("a chain of n+1 geodesics needs n link sides");
    for (std::size_t i = 0; i < sides.size(); ++i) {
        int s = sides[i];
        if (s != 1 && s != -1) throw GeometryError("link side must be +1 or -1");
        if (links[i].domain != Domain::complete || links[i + 1].domain != Domain::complete)
            throw GeometryError("asymptotic links must be complete geodesics");
        if (!space.same_ideal(space.ideal_end(links[i], s), space.ideal_end(links[i + 1], s)))
            throw GeometryError("broken chain link " + std::to_string(i));
    }
    return AsymptoticChain{std::move(links), std::move(sides)};
}

std::pair<Geodesic, Geodesic> normalize_pair(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2,
                                             const IdealPoint& xi)
{
    int s1 = side_of(space, c1, xi);
    int s2 = side_of(space, c2, xi);
    if (s1 == 0 || s1 != s2) throw GeometryError("geodesics are not asymptotic at the given ideal point");
    // Along c the Busemann function decreases at unit rate toward xi.
    Num shift = Num(s1) * space.busemann(xi, eval(c1, Num(0)), eval(c2, Num(0)));
    return {c1, reparametrize(c2, shift)};
}

Point transfer(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2, const IdealPoint& xi,
               const Point& m)
{
    auto [a, b] = normalize_pair(space, c1, c2, xi);
    Num t = space.project(m, a).t;
    if (space.distance(m, eval(a, t)).value() > 1e-9) throw GeometryError("point is not on the source geodesic");
    return eval(b, t);
}

Point chain_transfer(const ModelSpace& space, const AsymptoticChain& chain, const Point& m)
{
    Point cur = m;
    for (std::size_t i = 0; i < chain.sides.size(); ++i) {
        const Geodesic& a = chain.links[i];
        const Geodesic& b = chain.links[i + 1];
        IdealPoint xi = space.ideal_end(a, chain.sides[i]);
        if (!space.same_ideal(xi, space.ideal_end(b, chain.sides[i])))
            throw GeometryError("broken chain link " + std::to_string(i));
        cur = transfer(space, a, b, xi, cur);
    }
    return cur;
}

AsymptoticChain aa_prime_chain(const ModelSpace& space, const Geodesic& a, const Geodesic& a_prime,
                               const Point& x0)
{
    IdealPoint back = space.ideal_end(a, -1);
    IdealPoint front = space.ideal_end(a_prime, 1);
    Geodesic a1 = space.geodesic_between_ideals(front, back, x0);
    return make_chain(space, {a, a1, a_prime}, {-1, 1});
}

double asymptotic_gap(const ModelSpace& space, const Geodesic& c1, const Geodesic& c2, int side, double reach,
                      int samples)
{
    auto [a, b] = normalize_pair(space, c1, c2, space.ideal_end(c1, side));
    double worst = 0.0;
    for (int k = 0; k <= samples; ++k) {
        double t = side * reach * k / std::max(samples, 1);
        worst = std::max(worst, space.distance(eval(a, t), eval(b, t)).value());
    }
    return worst;
}

}  // namespace cat0
