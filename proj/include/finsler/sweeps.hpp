#pragma once

// Grid sweeps of the coframe residuals and invariants over Sigma.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/coframe.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

struct SweepCell {
    SigmaPoint u;
    StructureResiduals residuals;
    Invariants invariants;
    bool failed = false;  // construction threw
};

struct SweepSummary {
    int points = 0;
    int failures = 0;
    double max_property = 0.0;
    double max_equation = 0.0;
    double max_duality = 0.0;
    double max_abs_I = 0.0;
    double max_abs_J = 0.0;
    double max_K_dev = 0.0;  // max |K - 1|
    SigmaPoint worst_residual;
    SigmaPoint worst_K;
    std::vector<SweepCell> cells;
};

// n x n cell-centred chart points over [-1, 1]^2 in both charts, `fibers`
// fiber angles each.
inline std::vector<SigmaPoint> sigma_grid(const FinslerMetric& m, int n, int fibers) {
    std::vector<SigmaPoint> pts;
    for (Chart c : {Chart::North, Chart::South}) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const ChartPoint p{c, {-1.0 + 2.0 * (i + 0.5) / n, -1.0 + 2.0 * (j + 0.5) / n}};
                for (int k = 0; k < fibers; ++k) {
                    pts.push_back(SigmaPoint::make(m, p, 2.0 * std::numbers::pi * k / fibers));
                }
            }
        }
    }
    return pts;
}

inline SweepSummary sweep(const FinslerMetric& m, const std::vector<SigmaPoint>& pts, bool keep_cells = false) {
    std::vector<SweepCell> cells(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        cells[i].u = pts[i];
        try {
            const LocalStructure<2> ls(m, pts[i]);
            cells[i].residuals = ls.residuals();
            cells[i].invariants = ls.invariants();
        } catch (const Error&) {
            cells[i].failed = true;
        }
    });
    SweepSummary s;
    double worst_r = -1.0, worst_k = -1.0;
    for (const auto& c : cells) {
        ++s.points;
        if (c.failed) {
            ++s.failures;
            s.worst_residual = c.u;
            worst_r = INFINITY;
            continue;
        }
        s.max_property = std::max(s.max_property, c.residuals.max_property());
        s.max_equation = std::max(s.max_equation, c.residuals.max_equation());
        s.max_duality = std::max(s.max_duality, c.residuals.duality);
        s.max_abs_I = std::max(s.max_abs_I, std::abs(c.invariants.I));
        s.max_abs_J = std::max(s.max_abs_J, std::abs(c.invariants.J));
        const double r = c.residuals.max();
        if (r > worst_r) {
            worst_r = r;
            s.worst_residual = c.u;
        }
        const double k = std::abs(c.invariants.K - 1.0);
        s.max_K_dev = std::max(s.max_K_dev, k);
        if (k > worst_k) {
            worst_k = k;
            s.worst_K = c.u;
        }
    }
    if (keep_cells) s.cells = std::move(cells);
    return s;
}

}  // namespace finsler
