#include "rmslab/rng.hpp"

#include <cmath>
#include <numbers>

namespace rmslab {

namespace {

// One Box-Muller pair from two uniforms. u1 is reflected away from 0 so the
// log argument is always in (0, 1].
inline void box_muller(SplitMix64& rng, double& z0, double& z1) {
    const double u1 = 1.0 - rng.next_unit();
    const double u2 = rng.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

}  // namespace

void fill_gaussian(SplitMix64& rng, std::span<double> out) {
    std::size_t i = 0;
    double z0 = 0.0;
    double z1 = 0.0;
    for (; i + 1 < out.size(); i += 2) {
        box_muller(rng, z0, z1);
        out[i] = z0;
        out[i + 1] = z1;
    }
    if (i < out.size()) {
        box_muller(rng, z0, z1);
        out[i] = z0;
    }
}

double sample_gaussian(SplitMix64& rng) {
    double z0 = 0.0;
    double z1 = 0.0;
    box_muller(rng, z0, z1);
    return z0;
}

}  // namespace rmslab
