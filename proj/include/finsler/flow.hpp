#pragma once

// Geodesic flow Psi_t of X1 on Sigma.
//
// The integrated state is (x1, x2, s).  Because the velocity is always
// reconstructed as y(s) = e(s) / F(x, e(s)), the state never leaves Sigma
// and F(base, velocity) = 1 holds identically along the flow.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "finsler/atlas.hpp"
#include "finsler/coframe.hpp"
#include "finsler/errors.hpp"
#include "finsler/integrator.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

namespace finsler {

inline constexpr double kMaxFlowTime = 100.0 * std::numbers::pi;

struct FlowOptions {
    IntegratorOptions integrator;
    double t_max = kMaxFlowTime;
};

inline double wrap_fiber(double s) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    s = std::fmod(s, two_pi);
    if (s < 0.0) s += two_pi;
    return s;
}

inline VectorField<3> geodesic_field(const FinslerMetric& m) {
    return [m](Chart c, const std::array<double, 3>& z) { return spray_field<double>(m, c, z[0], z[1], z[2]); };
}

inline ChartSwitch<3> sigma_switch() {
    return [](const std::array<double, 3>& z) { return switch_coordinates<double>(z[0], z[1], z[2]); };
}

// Flow state plus the 3x3 tangent map, stored row-major after the state.
inline VectorField<12> variational_field(const FinslerMetric& m) {
    return [m](Chart c, const std::array<double, 12>& z) {
        using J = Jet<1, 3>;
        const auto f = spray_field<J>(m, c, J::variable(0, z[0]), J::variable(1, z[1]), J::variable(2, z[2]));
        std::array<double, 12> out{};
        for (int i = 0; i < 3; ++i) {
            out[i] = f[i].value();
            for (int j = 0; j < 3; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k) acc += f[i].coef(1 + k) * z[3 + 3 * k + j];
                out[3 + 3 * i + j] = acc;
            }
        }
        return out;
    };
}

inline ChartSwitch<12> variational_switch() {
    return [](const std::array<double, 12>& z) {
        using J = Jet<1, 3>;
        const auto w = switch_coordinates<J>(J::variable(0, z[0]), J::variable(1, z[1]), J::variable(2, z[2]));
        std::array<double, 12> out{};
        for (int i = 0; i < 3; ++i) {
            out[i] = w[i].value();
            for (int j = 0; j < 3; ++j) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k) acc += w[i].coef(1 + k) * z[3 + 3 * k + j];
                out[3 + 3 * i + j] = acc;
            }
        }
        return out;
    };
}

inline void check_flow_time(double t, const FlowOptions& opt) {
    if (!(std::abs(t) <= opt.t_max)) throw Error(ErrorKind::InvalidArgument, "flow time exceeds t_max");
}

inline SigmaPoint to_sigma(const FinslerMetric& m, Chart c, const std::array<double, 3>& z) {
    return SigmaPoint::make(m, {c, {z[0], z[1]}}, wrap_fiber(z[2]));
}

inline SigmaPoint flow(const FinslerMetric& m, const SigmaPoint& u, double t, const FlowOptions& opt = {}) {
    check_flow_time(t, opt);
    const auto tr = integrate<3>(u.base.chart, {u.base.x[0], u.base.x[1], u.s}, t, geodesic_field(m), sigma_switch(),
                                 opt.integrator);
    return to_sigma(m, tr.chart, tr.state);
}

// A flow line with dense output on [0, T] (or [T, 0]).
class GeodesicPath {
public:
    GeodesicPath(const FinslerMetric& m, const SigmaPoint& u, double T, const FlowOptions& opt = {})
        : metric_(m), start_(u), T_(T) {
        check_flow_time(T, opt);
        traj_ = integrate<3>(u.base.chart, {u.base.x[0], u.base.x[1], u.s}, T, geodesic_field(m), sigma_switch(),
                             opt.integrator, true);
    }

    double length() const { return T_; }
    const SigmaPoint& start() const { return start_; }
    SigmaPoint end() const { return to_sigma(metric_, traj_.chart, traj_.state); }
    const IntegratorStats& stats() const { return traj_.stats; }

    SigmaPoint at(double t) const {
        if (t == 0.0 || traj_.segments.empty()) return start_;
        const auto [c, z] = traj_.at(t);
        return to_sigma(metric_, c, z);
    }

    // Accepted step endpoints as (t, point).
    std::vector<std::pair<double, SigmaPoint>> samples() const {
        std::vector<std::pair<double, SigmaPoint>> out;
        out.emplace_back(0.0, start_);
        for (const auto& seg : traj_.segments) {
            const auto z = seg.eval(seg.t1());
            out.emplace_back(seg.t1(), to_sigma(metric_, seg.chart, z));
        }
        return out;
    }

private:
    FinslerMetric metric_;
    SigmaPoint start_;
    double T_;
    Trajectory<3> traj_;
};

struct TangentFlow {
    SigmaPoint end;
    // d Psi_t in coordinates: (x1, x2, s) of the start chart to those of the
    // end chart.
    Mat3 D{};

    Vector3 push(const Vector3& v) const {
        Vector3 r{};
        for (int i = 0; i < 3; ++i) r[i] = D[i][0] * v[0] + D[i][1] * v[1] + D[i][2] * v[2];
        return r;
    }
};

inline TangentFlow flow_with_tangent(const FinslerMetric& m, const SigmaPoint& u, double t,
                                     const FlowOptions& opt = {}) {
    check_flow_time(t, opt);
    std::array<double, 12> z0{u.base.x[0], u.base.x[1], u.s, 1, 0, 0, 0, 1, 0, 0, 0, 1};
    const auto tr = integrate<12>(u.base.chart, z0, t, variational_field(m), variational_switch(), opt.integrator);
    TangentFlow out;
    out.end = to_sigma(m, tr.chart, {tr.state[0], tr.state[1], tr.state[2]});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out.D[i][j] = tr.state[3 + 3 * i + j];
    }
    return out;
}

struct RotationResidual {
    double omega1 = 0.0;   // |omega1(dPsi X_b) - omega1(X_b)|
    double omega23 = 0.0;  // deviation of (omega2, omega3) from the rotation by t
    double max() const { return std::max(omega1, omega23); }
};

// Pushes the frame (X1, X2, X3) at u along the flow and compares the
// coframe at the endpoint with
//   Psi_t^* omega1 = omega1,
//   Psi_t^* omega2 =  cos t omega2 + sin t omega3,
//   Psi_t^* omega3 = -sin t omega2 + cos t omega3.
inline RotationResidual pullback_rotation_check(const FinslerMetric& m, const SigmaPoint& u, double t,
                                                const FlowOptions& opt = {}) {
    if (!(t >= 0.0 && t <= 4.0 * std::numbers::pi)) throw Error(ErrorKind::InvalidArgument, "t must lie in [0, 4 pi]");
    const Frame f0 = frame(m, u);
    const TangentFlow tf = flow_with_tangent(m, u, t, opt);
    const Coframe w1 = coframe(m, tf.end);
    const double c = std::cos(t), s = std::sin(t);
    RotationResidual r;
    for (int b = 0; b < 3; ++b) {
        const Vector3 v = tf.push(f0.X[b]);
        const double e2 = b == 1 ? c : (b == 2 ? s : 0.0);
        const double e3 = b == 1 ? -s : (b == 2 ? c : 0.0);
        r.omega1 = std::max(r.omega1, std::abs(contract(w1.omega[0], v) - (b == 0 ? 1.0 : 0.0)));
        r.omega23 = std::max({r.omega23, std::abs(contract(w1.omega[1], v) - e2), std::abs(contract(w1.omega[2], v) - e3)});
    }
    return r;
}

// Lift to Sigma of the rotation by angle a about the polar axis.  In either
// chart the rotation acts as x -> R_a x, so the lift is s -> s + a.
inline SigmaPoint rotation_lift(const FinslerMetric& m, const SigmaPoint& u, double a) {
    const double c = std::cos(a), sn = std::sin(a);
    const ChartPoint q{u.base.chart, {c * u.base.x[0] - sn * u.base.x[1], sn * u.base.x[0] + c * u.base.x[1]}};
    return SigmaPoint::make(m, q, wrap_fiber(u.s + a));
}

// max |omega_i(psi(u))(dpsi e_k) - omega_i(u)(e_k)| over the coordinate
// basis, psi the rotation lift.  Small exactly when the rotation is a
// Finsler isometry.
inline double rotation_lift_residual(const FinslerMetric& m, const SigmaPoint& u, double a) {
    const Coframe w0 = coframe(m, u);
    const Coframe w1 = coframe(m, rotation_lift(m, u, a));
    const double c = std::cos(a), sn = std::sin(a);
    const Vector3 basis[3] = {{c, sn, 0.0}, {-sn, c, 0.0}, {0.0, 0.0, 1.0}};  // dpsi e_k
    double r = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            Vector3 e{0.0, 0.0, 0.0};
            e[k] = 1.0;
            r = std::max(r, std::abs(contract(w1.omega[i], basis[k]) - contract(w0.omega[i], e)));
        }
    }
    return r;
}

// Deviation of Psi_pi^* omega from (omega1, -omega2, -omega3) on the
// transported frame at u.
inline double antipodal_signature_residual(const FinslerMetric& m, const SigmaPoint& u, const FlowOptions& opt = {}) {
    const Frame f0 = frame(m, u);
    const TangentFlow tf = flow_with_tangent(m, u, std::numbers::pi, opt);
    const Coframe w = coframe(m, tf.end);
    const double sign[3] = {1.0, -1.0, -1.0};
    double r = 0.0;
    for (int b = 0; b < 3; ++b) {
        const Vector3 v = tf.push(f0.X[b]);
        for (int i = 0; i < 3; ++i) r = std::max(r, std::abs(contract(w.omega[i], v) - (i == b ? sign[i] : 0.0)));
    }
    return r;
}

struct ConservationReport {
    double drift = 0.0;           // max |I^2 + J^2 - initial|
    double max_curvature_dev = 0.0;
    double phase_residual = 0.0;  // |I(t) - (I0 cos t + J0 sin t)|, same for J
    double harmonic_residual = 0.0;  // |X1 I - J|, |X1 J + I| via the Bianchi identities
    std::vector<double> t, I, J, K;
};

struct ConservationOptions {
    int samples = 256;
    bool require_constant_curvature = true;
    double curvature_tolerance = 1e-4;
    FlowOptions flow;
};

inline ConservationReport conservation_check(const FinslerMetric& m, const SigmaPoint& u, double T,
                                             const ConservationOptions& opt = {}) {
    const GeodesicPath path(m, u, T, opt.flow);
    ConservationReport rep;
    const int n = std::max(opt.samples, 2);
    double i0 = 0.0, j0 = 0.0, q0 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = T * k / (n - 1);
        const LocalStructure<3> ls(m, path.at(t).canonical(m));
        const Invariants v = ls.invariants();
        const BianchiCoefficients b = ls.bianchi();
        if (k == 0) {
            i0 = v.I;
            j0 = v.J;
            q0 = v.I * v.I + v.J * v.J;
        }
        rep.t.push_back(t);
        rep.I.push_back(v.I);
        rep.J.push_back(v.J);
        rep.K.push_back(v.K);
        rep.drift = std::max(rep.drift, std::abs(v.I * v.I + v.J * v.J - q0));
        rep.max_curvature_dev = std::max(rep.max_curvature_dev, std::abs(v.K - 1.0));
        const double ip = i0 * std::cos(t) + j0 * std::sin(t);
        const double jp = j0 * std::cos(t) - i0 * std::sin(t);
        rep.phase_residual = std::max({rep.phase_residual, std::abs(v.I - ip), std::abs(v.J - jp)});
        rep.harmonic_residual = std::max({rep.harmonic_residual, std::abs(b.X1I - v.J), std::abs(b.X1J + v.I)});
    }
    if (opt.require_constant_curvature && rep.max_curvature_dev > opt.curvature_tolerance) {
        throw Error(ErrorKind::NotConstantCurvature, "|K - 1| = " + std::to_string(rep.max_curvature_dev) +
                                                         " along the geodesic");
    }
    return rep;
}

}  // namespace finsler
