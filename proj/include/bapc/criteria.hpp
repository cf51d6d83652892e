#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bapc/base_model.hpp"
#include "bapc/corrector.hpp"
#include "bapc/dataset.hpp"
#include "bapc/engine.hpp"
#include "bapc/errors.hpp"

namespace bapc {

struct CriteriaParams {
    double eta1;
    double eta2;
    double alpha;

    explicit CriteriaParams(double eta1_ = 1.0, double eta2_ = 1.0, double alpha_ = 1.0)
        : eta1(eta1_), eta2(eta2_), alpha(alpha_) {
        if (!(eta1 > 0.0 && eta1 <= 1.0) || !(eta2 > 0.0 && eta2 <= 1.0))
            throw ValidationError("criteria: eta values must lie in (0,1]");
        if (!(alpha > 0.0)) throw ValidationError("criteria: alpha must be > 0");
    }
};

/// C1 (accuracy): |delta_eps| < eta1 * |eps|, strictly. delta_eps = eps - eps_hat.
inline bool check_c1(double eps, double delta_eps, double eta1) {
    return std::abs(delta_eps) < eta1 * std::abs(eps);
}

/// C2 (fidelity): |eps_hat - delta_f| < eta2 * |eps|, strictly.
inline bool check_c2(double eps_hat, double delta_f, double eps, double eta2) {
    return std::abs(eps_hat - delta_f) < eta2 * std::abs(eps);
}

struct CriterionPoint {
    Eigen::VectorXd x;
    double eps = 0.0;
    double abs_delta_eps = 0.0;
    double abs_fidelity_gap = 0.0;
    bool c1_ok = false;
    bool c2_ok = false;
    /// True residual is exactly zero: any nonzero left side violates the
    /// strict inequalities. Flagged so reports can filter these crossings.
    bool eps_is_zero = false;
};

struct CriteriaReport {
    std::vector<CriterionPoint> points;
    double delta1_hat = 0.0;
    double delta2_hat = 0.0;
    double mean_abs_eps = 0.0;
};

/// Violation fractions of C1/C2 over the data points inside the
/// neighborhood, with delta_f taken from the supplied theta'.
inline CriteriaReport estimate_deltas(const LabeledDataset& data,
                                      const NeighborhoodSpec& nbhd,
                                      const BaseModelFit& fit,
                                      const BaseModelFit& fit_prime,
                                      const Corrector& corrector,
                                      const CriteriaParams& params) {
    CriteriaReport report;
    double abs_eps_sum = 0.0;
    std::size_t violations1 = 0, violations2 = 0;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Eigen::VectorXd x = data.point(i);
        if (!nbhd.contains(x)) continue;
        CriterionPoint pt;
        pt.x = x;
        pt.eps = data.label(i) - fit.predict(x);
        const double eps_hat = corrector.predict(x);
        const double delta_f = surrogate_delta_f(fit, fit_prime, x);
        pt.abs_delta_eps = std::abs(pt.eps - eps_hat);
        pt.abs_fidelity_gap = std::abs(eps_hat - delta_f);
        pt.c1_ok = check_c1(pt.eps, pt.eps - eps_hat, params.eta1);
        pt.c2_ok = check_c2(eps_hat, delta_f, pt.eps, params.eta2);
        pt.eps_is_zero = pt.eps == 0.0;
        violations1 += pt.c1_ok ? 0 : 1;
        violations2 += pt.c2_ok ? 0 : 1;
        abs_eps_sum += std::abs(pt.eps);
        report.points.push_back(std::move(pt));
    }
    if (report.points.empty())
        throw EmptyNeighborhoodError("estimate_deltas: no data points in neighborhood");
    const double n = static_cast<double>(report.points.size());
    report.delta1_hat = static_cast<double>(violations1) / n;
    report.delta2_hat = static_cast<double>(violations2) / n;
    report.mean_abs_eps = abs_eps_sum / n;
    return report;
}

/// All data points (global neighborhood).
inline CriteriaReport estimate_deltas(const LabeledDataset& data, const BaseModelFit& fit,
                                      const BaseModelFit& fit_prime,
                                      const Corrector& corrector,
                                      const CriteriaParams& params) {
    return estimate_deltas(data, NeighborhoodSpec::global(data.dim()), fit, fit_prime,
                           corrector, params);
}

struct RadiusSweepRow {
    double radius = 0.0;
    double delta1_hat = 0.0;
    double delta2_hat = 0.0;
};

/// Per-radius violation fractions. theta' is refit for every radius while
/// both fractions are evaluated on one fixed set of points, those inside the
/// widest neighborhood, so that delta1_hat is exactly radius-invariant (C1
/// never involves theta') and delta2_hat varies only through theta'(r).
inline std::vector<RadiusSweepRow> radius_sweep(const BaseModelFamily& family,
                                                const Corrector& corrector,
                                                const LabeledDataset& data,
                                                const Eigen::VectorXd& x_m,
                                                const std::vector<double>& radii,
                                                const CriteriaParams& params) {
    if (radii.empty()) throw ValidationError("radius_sweep: empty radius list");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw ValidationError("radius_sweep: radii must be > 0");
        if (i > 0 && radii[i] <= radii[i - 1])
            throw ValidationError("radius_sweep: radii must be ascending");
    }
    const BaseModelFit fit = fit_base(family, data);
    const NeighborhoodSpec widest(x_m, radii.back());

    std::vector<RadiusSweepRow> rows;
    rows.reserve(radii.size());
    for (const double r : radii) {
        const NeighborhoodSpec nbhd(x_m, r);
        const BaseModelFit refit =
            refit_base(family, modified_labels(data, corrector, nbhd));
        const CriteriaReport report =
            estimate_deltas(data, widest, fit, refit, corrector, params);
        rows.push_back({r, report.delta1_hat, report.delta2_hat});
    }
    return rows;
}

/// Theorem bound on the surrogate tail probability:
/// ((eta1 + eta2) / alpha) * E|eps| + delta1 + delta2 + delta1 * delta2.
inline double theorem_bound(double eta1, double eta2, double delta1, double delta2,
                            double alpha, double mean_abs_eps) {
    if (!(alpha > 0.0)) throw ValidationError("theorem_bound: alpha must be > 0");
    if (eta1 < 0.0 || eta2 < 0.0 || delta1 < 0.0 || delta2 < 0.0 || mean_abs_eps < 0.0)
        throw ValidationError("theorem_bound: inputs must be nonnegative");
    return (eta1 + eta2) / alpha * mean_abs_eps + delta1 + delta2 + delta1 * delta2;
}

/// Fraction of test points with |y - (f_theta(x) + delta_f(x))| > alpha,
/// i.e. where the reflected model misses by more than alpha.
inline double empirical_surrogate_tail(const LabeledDataset& test, const BaseModelFit& fit,
                                       const BaseModelFit& fit_prime, double alpha) {
    if (!(alpha >= 0.0)) throw ValidationError("surrogate_tail: alpha must be >= 0");
    std::size_t exceed = 0;
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const Eigen::VectorXd x = test.point(i);
        if (std::abs(test.label(i) - reflected_prediction(fit, fit_prime, x)) > alpha)
            ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(test.size());
}

} // namespace bapc
