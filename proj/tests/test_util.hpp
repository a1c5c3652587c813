#pragma once

#include <cmath>
#include <random>

#include "boxrefine/geometry.hpp"

namespace boxrefine::testutil {

// Random car-scale box for property sweeps.
inline Box3D random_box(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-8, 8), uz(8, 40), utheta(-M_PI, M_PI);
    std::uniform_real_distribution<double> uh(1.0, 2.2), uw(1.2, 2.2), ul(3.0, 5.0);
    Box3D b;
    b.x = ux(rng);
    b.y = 1.5;
    b.z = uz(rng);
    b.h = uh(rng);
    b.w = uw(rng);
    b.l = ul(rng);
    b.theta = utheta(rng);
    return b;
}

// Partner with varied overlap: offset a copy of `a` by a fraction of
// its dimensions.
inline Box3D offset_partner(const Box3D& a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    Box3D b = a;
    b.x += u(rng) * a.w;
    b.y += u(rng) * 0.5 * a.h;
    b.z += u(rng) * a.l * 0.5;
    b.h = std::max(0.3, a.h + u(rng) * 0.3);
    b.w = std::max(0.3, a.w + u(rng) * 0.3);
    b.l = std::max(0.5, a.l + u(rng) * 0.6);
    b.theta = wrap_angle(a.theta + u(rng) * 0.6);
    return b;
}

}  // namespace boxrefine::testutil
