#pragma once

// Runs named checks against one metric and collects a Report.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "finsler/acceptance.hpp"
#include "finsler/antipodal.hpp"
#include "finsler/coframe.hpp"
#include "finsler/config.hpp"
#include "finsler/flow.hpp"
#include "finsler/lambda.hpp"
#include "finsler/metric.hpp"
#include "finsler/report.hpp"
#include "finsler/reversibility.hpp"
#include "finsler/sampling.hpp"
#include "finsler/sweeps.hpp"

namespace finsler {

inline const std::vector<std::string>& lambda_part_names() {
    static const std::vector<std::string> names = {"free_action", "g_invariance", "rho", "closure", "beta"};
    return names;
}

inline const std::vector<std::string>& suite_checks() {
    static const std::vector<std::string> names = {"validate", "structure", "invariants", "curvature", "bianchi",
                                                   "rotation", "isometry",  "antipodal",  "alpha2",    "polar",
                                                   "reversibility", "conserve", "flow", "lambda"};
    return names;
}

// Expands "all" and "acceptance" (acceptance.1 ... acceptance.11), accepts
// lambda.<part> and rejects unknown names.
inline std::vector<std::string> resolve_checks(const std::vector<std::string>& requested) {
    std::vector<std::string> out;
    for (const auto& name : requested) {
        if (name == "all") {
            out.insert(out.end(), suite_checks().begin(), suite_checks().end());
        } else if (name == "acceptance") {
            for (int i = 1; i <= acceptance::kCriteria; ++i) out.push_back("acceptance." + std::to_string(i));
        } else if (name.rfind("acceptance.", 0) == 0) {
            const std::string id = name.substr(11);
            int v = 0;
            const auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
            if (ec != std::errc() || p != id.data() + id.size() || v < 1 || v > acceptance::kCriteria) {
                throw Error(ErrorKind::InvalidArgument, "unknown check '" + name + "'");
            }
            out.push_back(name);
        } else if (name.rfind("lambda.", 0) == 0) {
            const auto& parts = lambda_part_names();
            if (std::find(parts.begin(), parts.end(), name.substr(7)) == parts.end()) {
                throw Error(ErrorKind::InvalidArgument, "unknown check '" + name + "'");
            }
            out.push_back(name);
        } else if (std::find(suite_checks().begin(), suite_checks().end(), name) != suite_checks().end()) {
            out.push_back(name);
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown check '" + name + "'");
        }
    }
    return out;
}

namespace detail {

class SuiteRunner {
public:
    SuiteRunner(const ExperimentConfig& cfg, FinslerMetric m) : cfg_(cfg), m_(std::move(m)) {}

    void run(const std::string& name, Report& rep) {
        CheckRecord rec;
        rec.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        current_.reset();
        try {
            if (name.rfind("acceptance.", 0) == 0) {
                acceptance_check(std::stoi(name.substr(11)), rec);
            } else if (name.rfind("lambda.", 0) == 0) {
                check_lambda_part(name.substr(7), rec);
            } else if (!valid() && name != "validate") {
                rec.status = Status::Skip;
                rec.message = "metric failed validation";
            } else {
                dispatch(name, rec, rep);
            }
        } catch (const Error& e) {
            rec.status = Status::Fail;
            rec.message = e.what();
            rec.value("error", to_string(e.kind()));
            if (current_) rec.failure_point = *current_;
        }
        if (rec.status == Status::Fail && rec.failure_point.is_null() && current_) rec.failure_point = *current_;
        rec.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.checks.push_back(std::move(rec));
    }

private:
    const ExperimentConfig& cfg_;
    FinslerMetric m_;
    std::optional<ValidationReport> validation_;
    std::optional<SweepSummary> sweep_;
    std::optional<LambdaSpace> lambda_;
    std::optional<Json> current_;  // sample being processed, for failure reports

    const Tolerances& tol() const { return cfg_.tol; }
    Sampler sampler(std::uint64_t salt) const { return Sampler(cfg_.seed * 1000003ULL + salt); }

    // Start points for the point-based checks: the configured point alone,
    // or n seeded samples.
    std::vector<SigmaPoint> starts(std::uint64_t salt, int n) const {
        if (cfg_.point) return {cfg_.point->sigma(m_)};
        Sampler rng = sampler(salt);
        std::vector<SigmaPoint> out;
        for (int i = 0; i < n; ++i) out.push_back(rng.sigma_point(m_));
        return out;
    }
    std::vector<ChartPoint> bases(std::uint64_t salt, int n) const {
        if (cfg_.point) return {cfg_.point->p};
        Sampler rng = sampler(salt);
        std::vector<ChartPoint> out;
        for (int i = 0; i < n; ++i) out.push_back(rng.chart_point());
        return out;
    }

    bool valid() {
        if (!validation_) validation_ = validate(m_, std::max(cfg_.grid, 8), 64);
        return validation_->ok;
    }

    const SweepSummary& grid_sweep() {
        if (!sweep_) sweep_ = sweep(m_, sigma_grid(m_, cfg_.grid, 2 * cfg_.grid), true);
        return *sweep_;
    }

    static void fail_if(CheckRecord& rec, bool bad, const std::string& why) {
        if (!bad) return;
        rec.status = Status::Fail;
        rec.message += (rec.message.empty() ? "" : "; ") + why;
    }

    void dispatch(const std::string& name, CheckRecord& rec, Report& rep) {
        static const std::map<std::string, void (SuiteRunner::*)(CheckRecord&, Report&)> table = {
            {"validate", &SuiteRunner::check_validate},   {"structure", &SuiteRunner::check_structure},
            {"invariants", &SuiteRunner::check_invariants}, {"curvature", &SuiteRunner::check_curvature},
            {"bianchi", &SuiteRunner::check_bianchi},     {"rotation", &SuiteRunner::check_rotation},
            {"isometry", &SuiteRunner::check_isometry},
            {"antipodal", &SuiteRunner::check_antipodal}, {"alpha2", &SuiteRunner::check_alpha2},
            {"polar", &SuiteRunner::check_polar},         {"reversibility", &SuiteRunner::check_reversibility},
            {"conserve", &SuiteRunner::check_conserve},   {"flow", &SuiteRunner::check_flow},
            {"lambda", &SuiteRunner::check_lambda}};
        (this->*table.at(name))(rec, rep);
    }

    void acceptance_check(int id, CheckRecord& rec) {
        const acceptance::CriterionResult r = acceptance::run(id);
        rec.value("title", r.title);
        for (const auto& [k, v] : r.measured) rec.residual(k, v);
        rec.status = r.passed ? Status::Pass : Status::Fail;
        rec.message = r.detail;
    }

    void check_validate(CheckRecord& rec, Report&) {
        valid();
        const ValidationReport& v = *validation_;
        rec.value("samples", v.samples);
        rec.residual("min_F", v.min_F);
        rec.residual("min_eigenvalue", v.min_eigenvalue);
        rec.residual("max_wind", v.max_wind);
        rec.residual("max_chart_mismatch", v.max_chart_mismatch);
        fail_if(rec, !v.ok, v.failure);
    }

    void check_structure(CheckRecord& rec, Report& rep) {
        const SweepSummary& s = grid_sweep();
        rec.value("points", s.points);
        rec.value("failures", s.failures);
        rec.residual("max_property", s.max_property);
        rec.residual("max_equation", s.max_equation);
        rec.residual("max_duality", s.max_duality);
        const bool bad = s.failures > 0 || s.max_property > tol().structure || s.max_equation > tol().structure ||
                         s.max_duality > tol().duality;
        fail_if(rec, bad, "structure residuals exceed tolerance");
        if (bad) rec.failure_point = point_json(s.worst_residual);

        // one row per chart point, maximized over the fiber
        Series ser{"structure", {"chart", "x1", "x2", "max_residual", "max_abs_I", "max_abs_J", "max_K_dev"}, {}};
        const std::size_t fibers = static_cast<std::size_t>(2 * cfg_.grid);
        for (std::size_t i = 0; i + fibers <= s.cells.size(); i += fibers) {
            double res = 0.0, ai = 0.0, aj = 0.0, kd = 0.0;
            for (std::size_t k = i; k < i + fibers; ++k) {
                const SweepCell& c = s.cells[k];
                if (c.failed) {
                    res = INFINITY;
                    continue;
                }
                res = std::max(res, c.residuals.max());
                ai = std::max(ai, std::abs(c.invariants.I));
                aj = std::max(aj, std::abs(c.invariants.J));
                kd = std::max(kd, std::abs(c.invariants.K - 1.0));
            }
            const ChartPoint& p = s.cells[i].u.base;
            ser.add(to_string(p.chart), p.x[0], p.x[1], res, ai, aj, kd);
        }
        rep.series.push_back(std::move(ser));
    }

    void check_invariants(CheckRecord& rec, Report&) {
        const SweepSummary& s = grid_sweep();
        double lo[3] = {INFINITY, INFINITY, INFINITY}, hi[3] = {-INFINITY, -INFINITY, -INFINITY};
        for (const auto& c : s.cells) {
            if (c.failed) continue;
            const double v[3] = {c.invariants.I, c.invariants.J, c.invariants.K};
            for (int k = 0; k < 3; ++k) {
                lo[k] = std::min(lo[k], v[k]);
                hi[k] = std::max(hi[k], v[k]);
            }
        }
        const char* names[3] = {"I", "J", "K"};
        for (int k = 0; k < 3; ++k) rec.value(names[k], Json{{"min", lo[k]}, {"max", hi[k]}});
        rec.residual("max_abs_I", s.max_abs_I);
        rec.residual("max_abs_J", s.max_abs_J);
        rec.value("riemannian", s.max_abs_I <= tol().invariant && s.max_abs_J <= tol().invariant);
        fail_if(rec, s.failures > 0, "invariants could not be computed at every grid point");
        if (cfg_.point) {
            const SigmaPoint u = cfg_.point->sigma(m_);
            current_ = point_json(u);
            const LocalStructure<2> ls(m_, u);
            const Invariants v = ls.invariants();
            const Coframe w = ls.coframe();
            Json omega = Json::array();
            for (const auto& c : w.omega) omega.push_back(Json{c[0], c[1], c[2]});
            rec.value("at_point", Json{{"point", point_json(u)},
                                       {"I", v.I},
                                       {"J", v.J},
                                       {"K", v.K},
                                       {"coframe", omega},
                                       {"max_residual", ls.residuals().max()}});
            current_.reset();
        }
    }

    void check_curvature(CheckRecord& rec, Report&) {
        const SweepSummary& s = grid_sweep();
        rec.residual("max_K_dev", s.max_K_dev);
        rec.value("constant_curvature", s.max_K_dev <= tol().invariant);
        if (s.max_K_dev > tol().invariant || s.failures > 0) {
            fail_if(rec, true, "K differs from 1");
            rec.failure_point = point_json(s.worst_K);
        }
    }

    void check_bianchi(CheckRecord& rec, Report&) {
        double rI = 0.0, rJ = 0.0, rK = 0.0;
        for (const SigmaPoint& u : starts(5, cfg_.samples)) {
            current_ = point_json(u);
            const LocalStructure<3> ls(m_, u);
            const Invariants v = ls.invariants();
            const BianchiCoefficients b = ls.bianchi();
            rI = std::max(rI, b.residual_I(v));
            rJ = std::max(rJ, b.residual_J(v));
            rK = std::max(rK, b.residual_K());
            if (std::max({rI, rJ, rK}) > tol().structure) {
                fail_if(rec, true, "Bianchi identities violated");
                rec.failure_point = *current_;
                break;
            }
        }
        rec.residual("X1I_minus_J", rI);
        rec.residual("X1J_plus_K3_plus_KI", rJ);
        rec.residual("X1K_minus_K1", rK);
    }

    void check_rotation(CheckRecord& rec, Report&) {
        double worst = 0.0;
        for (const SigmaPoint& u : starts(6, cfg_.samples)) {
            current_ = point_json(u);
            for (double t : {std::numbers::pi / 2, std::numbers::pi, 2 * std::numbers::pi}) {
                worst = std::max(worst, pullback_rotation_check(m_, u, t).max());
            }
            if (worst > tol().global) {
                fail_if(rec, true, "pullback differs from the rotation by t");
                rec.failure_point = *current_;
                break;
            }
        }
        rec.residual("max_rotation_residual", worst);
    }

    // Coframe preservation by the polar rotation is reported, not required:
    // it only holds when that rotation is an isometry.
    void check_isometry(CheckRecord& rec, Report&) {
        Sampler rng = sampler(15);
        double lift = 0.0, sig = 0.0;
        for (const SigmaPoint& u : starts(14, cfg_.samples)) {
            current_ = point_json(u);
            lift = std::max(lift, rotation_lift_residual(m_, u, rng.uniform(0.0, kTwoPi)));
            sig = std::max(sig, antipodal_signature_residual(m_, u));
            if (sig > tol().global) {
                fail_if(rec, true, "Psi_pi does not pull omega back to (omega1, -omega2, -omega3)");
                rec.failure_point = *current_;
                break;
            }
        }
        rec.residual("antipodal_signature", sig);
        rec.value("rotation_lift_residual", lift);
        rec.value("rotation_is_isometry", lift <= tol().structure);
    }

    void check_antipodal(CheckRecord& rec, Report&) {
        double worst = 0.0, a2 = 0.0;
        Json examples = Json::array();
        for (const ChartPoint& p : bases(7, cfg_.samples)) {
            current_ = point_json(p);
            const AntipodalReport a = alpha(m_, p);
            worst = std::max(worst, a.spread);
            a2 = std::max(a2, a.alpha2_displacement);
            if (examples.size() < 3) examples.push_back(Json{{"p", point_json(p)}, {"alpha_p", point_json(a.alpha_p)}});
            if (a.spread > tol().global) {
                fail_if(rec, true, "endpoints do not refocus");
                rec.failure_point = *current_;
                break;
            }
        }
        rec.residual("max_spread", worst);
        rec.value("max_alpha2_displacement", a2);
        rec.value("examples", examples);
    }

    void check_alpha2(CheckRecord& rec, Report&) {
        Alpha2Options ao;
        ao.grid = std::max(4, cfg_.grid * 3 / 4);
        ao.starts = cfg_.samples;
        const Alpha2Classification c = alpha2_classify(m_, ao);
        rec.value("identity", c.identity);
        rec.residual("max_displacement", c.max_displacement);
        if (c.identity) return;
        rec.value("basins", c.basins);
        rec.value("count_mismatch", c.count_mismatch);
        Json fps = Json::array();
        double inv = 0.0;
        for (const auto& f : c.fixed_points) {
            fps.push_back(Json{{"n", point_json(f.n)},
                               {"alpha_n", point_json(f.alpha_n)},
                               {"theta_n", f.theta_n},
                               {"residual", f.residual},
                               {"invariance", f.invariance}});
            inv = std::max(inv, f.invariance);
        }
        rec.value("fixed_points", fps);
        rec.residual("max_invariance", inv);
        fail_if(rec, c.count_mismatch || c.fixed_points.size() != 2, "expected exactly two fixed points");
        if (c.fixed_points.size() == 2) {
            const double sum = std::abs(c.fixed_points[0].theta_n + c.fixed_points[1].theta_n - kTwoPi);
            rec.residual("theta_sum_minus_2pi", sum);
            fail_if(rec, sum > tol().classification, "rotation angles at n and alpha(n) do not sum to 2 pi");
        }
        fail_if(rec, inv > tol().classification, "derivative does not preserve the invariant inner product");
        if (rec.status == Status::Fail) rec.failure_point = point_json(ChartPoint::from_sphere(c.worst_point));
    }

    void check_polar(CheckRecord& rec, Report& rep) {
        const ChartPoint p = bases(9, 1).front();
        current_ = point_json(p);
        const int nt = std::max(8, cfg_.grid);
        const InjectivityReport inj = injectivity_check(m_, p, 4 * nt, 2 * nt - 1);
        rec.value("p", point_json(p));
        rec.residual("min_separation", inj.min_separation);
        rec.residual("winding_minus_1", std::abs(inj.winding - 1.0));
        rec.residual("refocus_spread", inj.refocus_spread);
        fail_if(rec, !inj.passed(), "polar map is not injective or not of degree one");
        const AngleMeasure am = angle_measure(m_, p);
        rec.value("r", am.r);
        double jac = 0.0;
        for (int k = 0; k < 8; ++k) {
            for (double t : {std::numbers::pi / 4, std::numbers::pi / 2, 3 * std::numbers::pi / 4}) {
                jac = std::max(jac, std::abs(polar_jacobian(m_, am, kTwoPi * k / 8, t) - am.r * std::sin(t)));
            }
        }
        rec.residual("jacobian_minus_r_sin_t", jac);
        fail_if(rec, jac > tol().classification, "polar Jacobian differs from r sin t");
        if (rec.status == Status::Fail) rec.failure_point = *current_;
        Series ser{"polar", {"theta", "t", "chart", "x1", "x2"}, {}};
        for (const auto& g : inj.grid) ser.add(g.theta, g.t, to_string(g.point.chart), g.point.x[0], g.point.x[1]);
        rep.series.push_back(std::move(ser));
    }

    void check_reversibility(CheckRecord& rec, Report&) {
        const ReversibilityReport r = is_reversible(m_, cfg_.grid + 1);
        GeodesicReversibilityOptions go;
        go.samples = std::min(cfg_.samples, 16);
        go.seed = cfg_.seed;
        go.tolerance = tol().global;
        const GeodesicReversibilityReport g = is_geodesically_reversible(m_, go);
        rec.value("reversible", r.reversible);
        rec.value("geodesically_reversible", g.reversible);
        rec.residual("gap", r.gap);
        rec.residual("max_geodesic_deviation", g.max_deviation);
        rec.residual("mean_geodesic_deviation", g.mean_deviation);
        if (!r.reversible) rec.value("witness", Json{{"p", point_json(r.witness.base)}, {"y1", r.witness.y[0]}, {"y2", r.witness.y[1]}});
        fail_if(rec, r.reversible && !g.reversible, "reversible metric with non-reversible geodesics");
    }

    void check_conserve(CheckRecord& rec, Report& rep) {
        double drift = 0.0, phase = 0.0, harm = 0.0;
        std::optional<ConservationReport> first;
        for (const SigmaPoint& u : starts(11, std::min(cfg_.samples, 20))) {
            current_ = point_json(u);
            const ConservationReport c = conservation_check(m_, u, cfg_.time);
            drift = std::max(drift, c.drift);
            phase = std::max(phase, c.phase_residual);
            harm = std::max(harm, c.harmonic_residual);
            if (!first) first = c;
            if (c.drift > tol().global) {
                fail_if(rec, true, "I^2 + J^2 is not conserved");
                rec.failure_point = *current_;
                break;
            }
        }
        rec.residual("max_drift", drift);
        rec.residual("max_phase_residual", phase);
        rec.residual("max_harmonic_residual", harm);
        Series ser{"conserve", {"t", "I", "J", "I2_plus_J2"}, {}};
        for (std::size_t k = 0; first && k < first->t.size(); ++k) {
            ser.add(first->t[k], first->I[k], first->J[k], first->I[k] * first->I[k] + first->J[k] * first->J[k]);
        }
        rep.series.push_back(std::move(ser));
    }

    void check_flow(CheckRecord& rec, Report& rep) {
        const SigmaPoint u = starts(12, 1).front();
        current_ = point_json(u);
        const GeodesicPath path(m_, u, cfg_.time);
        rec.value("start", point_json(u));
        rec.value("end", point_json(path.end()));
        rec.value("accepted_steps", path.stats().accepted);
        rec.value("rejected_steps", path.stats().rejected);
        rec.value("chart_switches", path.stats().chart_switches);
        rec.value("return_distance", sigma_distance(path.end(), u));
        Series ser{"flow", {"t", "chart", "x1", "x2", "s", "I", "J", "K"}, {}};
        double unit = 0.0;
        const int n = 256;
        for (int k = 0; k <= n; ++k) {
            const double t = cfg_.time * k / n;
            const SigmaPoint q = path.at(t);
            unit = std::max(unit, std::abs(eval_F(m_, q.velocity()) - 1.0));
            const Invariants v = invariants(m_, q.canonical(m_));
            ser.add(t, to_string(q.base.chart), q.base.x[0], q.base.x[1], q.s, v.I, v.J, v.K);
        }
        rec.residual("max_unit_speed_error", unit);
        fail_if(rec, unit > tol().structure, "geodesic left the indicatrix bundle");
        rep.series.push_back(std::move(ser));
    }

    void check_lambda(CheckRecord& rec, Report&) { lambda_parts(rec, lambda_part_names()); }

    void check_lambda_part(const std::string& part, CheckRecord& rec) {
        rec.name = "lambda." + part;
        if (!valid()) {
            rec.status = Status::Skip;
            rec.message = "metric failed validation";
            return;
        }
        lambda_parts(rec, {part});
    }

    void lambda_parts(CheckRecord& rec, const std::vector<std::string>& parts) {
        if (!lambda_) {
            try {
                lambda_.emplace(m_);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NotPeriodic) throw;
                rec.status = Status::Skip;
                rec.message = e.what();
                return;
            }
        }
        const LambdaSpace& L = *lambda_;
        const int n = std::min(cfg_.samples, 20);
        auto wants = [&](const char* p) { return std::find(parts.begin(), parts.end(), p) != parts.end(); };

        if (wants("free_action")) {
            const FreeActionReport fa = L.free_action_check(n, cfg_.seed);
            rec.residual("free_action_max_return", fa.max_return);
            rec.value("min_subperiod_distance", fa.min_subperiod_distance);
            fail_if(rec, !fa.passed(), "flow does not generate a free circle action");
        }
        Sampler rng = sampler(13);
        if (wants("g_invariance")) {
            std::vector<double> times;
            for (int k = 1; k <= 8; ++k) times.push_back(kTwoPi * k / 8);
            double g = 0.0;
            for (const SigmaPoint& u : starts(16, n)) {
                current_ = point_json(u);
                const Vector3 v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
                const Vector3 w{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
                g = std::max(g, L.g_invariance(u, v, w, times).max());
                if (g > tol().global) break;
            }
            rec.residual("g_invariance", g);
            fail_if(rec, g > tol().global, "g is not flow invariant");
        }
        if (wants("rho")) {
            double kappa = 0.0;
            for (const SigmaPoint& u : starts(17, n)) {
                current_ = point_json(u);
                const RhoCurvature rc = L.rho_curvature(u);
                kappa = std::max({kappa, std::abs(rc.curvature - 1.0), rc.residual});
                if (kappa > tol().global) break;
            }
            rec.residual("rho_curvature_minus_1", kappa);
            fail_if(rec, kappa > tol().global, "rho connection does not have curvature 1");
        }
        if (wants("closure")) {
            double ret = 0.0, drift = 0.0, interior = INFINITY;
            for (const SigmaPoint& u : starts(18, n)) {
                current_ = point_json(u);
                const ClosureReport c = L.nabla_geodesic_closure(u);
                ret = std::max(ret, c.return_distance);
                drift = std::max(drift, c.base_drift);
                interior = std::min(interior, c.min_interior_distance);
                if (ret > tol().global || drift > tol().global) break;
            }
            rec.residual("closure_return", ret);
            rec.residual("closure_base_drift", drift);
            rec.value("closure_min_interior_distance", interior);
            fail_if(rec, ret > tol().global || drift > tol().global, "X3 orbits do not close over length 2 pi r");
        }
        if (wants("beta")) {
            try {
                double inv = 0.0, sep = INFINITY;
                for (const SigmaPoint& u : starts(19, n)) {
                    current_ = point_json(u);
                    const OrientedGeodesic G{u};
                    const OrientedGeodesic B = L.beta(G);
                    inv = std::max(inv, L.orbit_distance(G, L.beta(B)));
                    sep = std::min(sep, L.orbit_distance(G, B));
                    if (inv > tol().global || sep <= tol().global) break;
                }
                rec.residual("beta_involution", inv);
                rec.value("beta_min_separation", sep);
                fail_if(rec, inv > tol().global, "beta is not an involution");
                fail_if(rec, sep <= tol().global, "beta fixes an oriented geodesic");
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NotGeodesicallyReversible) throw;
                rec.value("beta", "undefined: geodesics are not reversible");
            }
        }
    }
};

}  // namespace detail

// Runs the selected checks (the full metric-level list when none were
// selected) against the metric named by cfg.metric.  Throws
// MetricValidationError when the metric is invalid, unless the selection is
// only "validate", whose record then reports the failure.
inline Report run_suite(const ExperimentConfig& cfg) {
    const std::vector<std::string> names = resolve_checks(cfg.checks ? *cfg.checks : suite_checks());
    Report rep;
    rep.seed = cfg.seed;
    rep.tol = cfg.tol;
    FinslerMetric m = cfg.metric == "radial-wind" ? non_killing_randers() : load_metric(cfg.metric, false);
    rep.metric = m.name();
    const bool validate_only =
        std::all_of(names.begin(), names.end(), [](const std::string& n) { return n == "validate"; });
    const bool metric_level = std::any_of(names.begin(), names.end(), [](const std::string& n) {
        return n.rfind("acceptance.", 0) != 0;
    });
    if (!validate_only && metric_level) {
        const ValidationReport v = validate(m, std::max(cfg.grid, 8), 64);
        if (!v.ok) throw Error(ErrorKind::MetricValidationError, rep.metric + ": " + v.failure);
    }
    detail::SuiteRunner runner(cfg, std::move(m));
    for (const auto& n : names) runner.run(n, rep);
    return rep;
}

}  // namespace finsler
