#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bapc/criteria.hpp"
#include "bapc/dataset.hpp"
#include "bapc/engine.hpp"
#include "bapc/errors.hpp"
#include "bapc/mlp.hpp"
#include "bapc/rng.hpp"

namespace bapc::drag {

/// Free fall with quadratic drag: dv/dt = g - (rho * area * cd / 2m) v^2.
struct DragParams {
    double g = 9.81;
    double m = 10.0;
    double rho = 1.2;
    double area = 1.0;
    double cd = 0.47;
    double v_i = 0.0;
};

inline void validate(const DragParams& p) {
    if (!(p.g > 0 && p.m > 0 && p.rho > 0 && p.area > 0 && p.cd > 0))
        throw ValidationError("drag: g, m, rho, area, cd must be > 0");
    if (!(p.v_i >= 0)) throw ValidationError("drag: v_i must be >= 0");
}

/// v_t = sqrt(2 m g / (rho * area * cd)).
inline double terminal_velocity(const DragParams& p) {
    validate(p);
    return std::sqrt(2.0 * p.m * p.g / (p.rho * p.area * p.cd));
}

/// Closed form v(t) = v_t tanh(t g / v_t + artanh(v_i / v_t)).
inline double velocity(double t, const DragParams& p) {
    if (!(t >= 0.0)) throw ValidationError("drag: t must be >= 0");
    const double v_t = terminal_velocity(p);
    if (!(p.v_i < v_t)) throw ValidationError("drag: v_i must be below terminal velocity");
    return v_t * std::tanh(t * p.g / v_t + std::atanh(p.v_i / v_t));
}

enum class NoiseKind { none, gaussian, uniform };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double sigma = 0.0;
};

inline void validate(const NoiseSpec& noise) {
    if (noise.kind != NoiseKind::none && !(noise.sigma > 0.0))
        throw ValidationError("noise: sigma must be > 0");
}

/// Time points: 90% uniform on [0,2], the rest on [2,3], so the late
/// interval is sparsely covered. Labels are v(t) plus sigma-scaled noise
/// (standard normal, or uniform on [-1,1]). The time points come from their
/// own substream, so changing the noise setting never changes them.
inline LabeledDataset generate_drag_dataset(const NoiseSpec& noise, std::uint64_t seed,
                                            int n = 100,
                                            const DragParams& params = DragParams()) {
    validate(noise);
    if (n < 2) throw ValidationError("drag: need at least two points");
    const int n_early = n * 9 / 10;

    RandomStream time_stream(seed, "time-points");
    RandomStream noise_stream(seed, "noise");
    std::vector<double> t(static_cast<std::size_t>(n)), v(t.size());
    for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(i);
        t[j] = i < n_early ? time_stream.uniform(0.0, 2.0) : time_stream.uniform(2.0, 3.0);
        v[j] = velocity(t[j], params);
        switch (noise.kind) {
            case NoiseKind::none: break;
            case NoiseKind::gaussian: v[j] += noise.sigma * noise_stream.normal(); break;
            case NoiseKind::uniform:
                v[j] += noise.sigma * noise_stream.uniform(-1.0, 1.0);
                break;
        }
    }
    return LabeledDataset::from_1d(t, v);
}

/// The two focus intervals: I1 = N(1, 1) = [0, 2] and I2 = N(2.5, 0.5) = [2, 3].
inline NeighborhoodSpec interval_i1() { return NeighborhoodSpec::interval(1.0, 1.0); }
inline NeighborhoodSpec interval_i2() { return NeighborhoodSpec::interval(2.5, 0.5); }

struct DragRunOptions {
    NoiseSpec noise;
    std::uint64_t seed = 0;
    DragParams params;
    int n = 100;
    int hidden_units = 32;
    int max_iterations = 1000;
    int curve_points = 301;
};

/// One row of the fit-curve table: the 301-point grid plus the data points
/// (the only rows carrying a noisy observation), sorted by t.
struct CurveRow {
    double t = 0.0;
    double v_true = 0.0;
    std::optional<double> v_noisy;
    double f_theta = 0.0;
    double f_corrected = 0.0;
    double f_theta_prime_i1 = 0.0;
    double f_tilde_i1 = 0.0;
    double f_theta_prime_i2 = 0.0;
    double f_tilde_i2 = 0.0;
};

struct DragRunResult {
    LabeledDataset data;
    BapcResult i1;
    BapcResult i2;
    MlpDiagnostics corrector_diagnostics;
    std::vector<CurveRow> curves;

    /// Slope entry of the reflected shift theta~ - theta = theta - theta'.
    double reflected_slope_shift_i1() const { return i1.delta_theta_reflected()(1); }
    double reflected_slope_shift_i2() const { return i2.delta_theta_reflected()(1); }
};

/// Straight-line base fit, one globally trained MLP corrector, then one BAPC
/// refit per interval. Step (2) has no neighborhood, so the corrector is
/// shared by both intervals.
inline DragRunResult run_drag(const DragRunOptions& opts) {
    const LabeledDataset data =
        generate_drag_dataset(opts.noise, opts.seed, opts.n, opts.params);
    const OlsLinearModel ols;
    const BaseModelFit base = fit_base(ols, data);
    const MlpSpec mlp_spec{.hidden_units = opts.hidden_units,
                           .max_iterations = opts.max_iterations,
                           .seed = substream_seed(opts.seed, "corrector-init")};
    const MlpCorrector corrector(mlp_spec, residual_dataset(base, data));

    const auto i1 = interval_i1();
    const auto i2 = interval_i2();
    BapcResult r1 = run_bapc(ols, corrector, data, i1.center, i1);
    BapcResult r2 = run_bapc(ols, corrector, data, i2.center, i2);

    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(opts.curve_points) +
               static_cast<std::size_t>(data.size()));
    for (int i = 0; i < opts.curve_points; ++i)
        ts.push_back(3.0 * static_cast<double>(i) /
                     static_cast<double>(opts.curve_points - 1));
    for (Eigen::Index i = 0; i < data.size(); ++i) ts.push_back(data.inputs()(i, 0));

    std::vector<CurveRow> curves;
    curves.reserve(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        CurveRow row;
        row.t = ts[k];
        Eigen::VectorXd x(1);
        x << row.t;
        row.v_true = velocity(row.t, opts.params);
        if (k >= static_cast<std::size_t>(opts.curve_points))
            row.v_noisy = data.label(
                static_cast<Eigen::Index>(k - static_cast<std::size_t>(opts.curve_points)));
        row.f_theta = r1.base.predict(x);
        row.f_corrected = row.f_theta + corrector.predict(x);
        row.f_theta_prime_i1 = r1.refit.predict(x);
        row.f_tilde_i1 = r1.reflected(x);
        row.f_theta_prime_i2 = r2.refit.predict(x);
        row.f_tilde_i2 = r2.reflected(x);
        curves.push_back(row);
    }
    std::stable_sort(curves.begin(), curves.end(),
                     [](const CurveRow& a, const CurveRow& b) { return a.t < b.t; });

    return DragRunResult{data, std::move(r1), std::move(r2),
                         corrector.diagnostics(), std::move(curves)};
}

struct CriteriaSweepOptions {
    std::vector<NoiseSpec> noises = {{NoiseKind::gaussian, 1.0},
                                     {NoiseKind::gaussian, 2.0},
                                     {NoiseKind::gaussian, 3.0}};
    std::vector<double> etas = {1.0, 0.75, 0.5, 0.3, 0.1};
    std::vector<double> radii;
    std::uint64_t seed = 0;
    DragParams params;
    int n = 100;
    int hidden_units = 32;
    int max_iterations = 1000;

    CriteriaSweepOptions() {
        for (double r = 0.1; r <= 2.0 + 1e-9; r += 0.1) radii.push_back(r);
    }
};

/// One (noise, eta) scenario: the per-point C1/C2 table for the I1 refit and
/// the radius sweep of the violation fractions around x_m = 1.
struct CriteriaScenario {
    NoiseSpec noise;
    double eta = 0.0;
    CriteriaReport points;
    std::vector<RadiusSweepRow> sweep;
};

inline std::vector<CriteriaScenario> run_criteria_sweep(const CriteriaSweepOptions& opts) {
    if (opts.etas.empty()) throw ValidationError("criteria sweep: no eta values");
    std::vector<CriteriaScenario> scenarios;
    const OlsLinearModel ols;
    for (const NoiseSpec& noise : opts.noises) {
        const LabeledDataset data =
            generate_drag_dataset(noise, opts.seed, opts.n, opts.params);
        const BaseModelFit base = fit_base(ols, data);
        const MlpSpec mlp_spec{.hidden_units = opts.hidden_units,
                               .max_iterations = opts.max_iterations,
                               .seed = substream_seed(opts.seed, "corrector-init")};
        const MlpCorrector corrector(mlp_spec, residual_dataset(base, data));

        const auto i1 = interval_i1();
        const BaseModelFit refit_i1 =
            refit_base(ols, modified_labels(data, corrector, i1));

        for (const double eta : opts.etas) {
            CriteriaScenario scenario;
            scenario.noise = noise;
            scenario.eta = eta;
            const CriteriaParams params(eta, eta, 1.0);
            scenario.points =
                estimate_deltas(data, base, refit_i1, corrector, params);
            scenario.sweep =
                radius_sweep(ols, corrector, data, i1.center, opts.radii, params);
            scenarios.push_back(std::move(scenario));
        }
    }
    return scenarios;
}

} // namespace bapc::drag
