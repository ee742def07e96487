#pragma once

// Deterministic sampling of points on S^2 and Sigma.  Uniform variates are
// built directly from the 64-bit engine output so that sequences agree
// across standard library implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "finsler/atlas.hpp"
#include "finsler/coframe.hpp"
#include "finsler/metric.hpp"

namespace finsler {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Area-uniform point of S^2.
    Vec3 sphere_point() {
        const double z = uniform(-1.0, 1.0);
        const double phi = uniform(0.0, 2.0 * std::numbers::pi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(phi), r * std::sin(phi), z};
    }

    ChartPoint chart_point() { return ChartPoint::from_sphere(sphere_point()); }

    SigmaPoint sigma_point(const FinslerMetric& m) {
        const ChartPoint p = chart_point();
        return SigmaPoint::make(m, p, uniform(0.0, 2.0 * std::numbers::pi));
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// n points of S^2 on a Fibonacci spiral.
inline std::vector<Vec3> fibonacci_sphere(int n) {
    std::vector<Vec3> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(1.0 - z * z);
        pts.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return pts;
}

// n x n latitude-longitude grid with cell-centred latitudes (no poles).
inline std::vector<Vec3> latlong_grid(int n) {
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        const double th = std::numbers::pi * (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            const double ph = 2.0 * std::numbers::pi * j / n;
            pts.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
        }
    }
    return pts;
}

}  // namespace finsler
