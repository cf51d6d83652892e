#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>

#include "bapc/base_model.hpp"
#include "bapc/corrector.hpp"
#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"

namespace bapc {

/// Step (1): fit the interpretable model, producing theta and f_theta.
inline BaseModelFit fit_base(const BaseModelFamily& family, const LabeledDataset& data) {
    return family.fit(data);
}

/// eps_i = Y_i - f_theta(X_i), order preserved.
inline Eigen::VectorXd residuals(const BaseModelFit& fit, const LabeledDataset& data) {
    if (fit.input_dim() != data.dim())
        throw DimensionError("residuals: fit and dataset dimension mismatch");
    Eigen::VectorXd eps(data.size());
    for (Eigen::Index i = 0; i < data.size(); ++i)
        eps(i) = data.label(i) - fit.predict(data.point(i));
    return eps;
}

/// The residual training set xi = (X_i, eps_i) for Step (2).
inline LabeledDataset residual_dataset(const BaseModelFit& fit, const LabeledDataset& data) {
    return data.with_labels(residuals(fit, data));
}

/// Step (3) input: Y'_j = Y_j - eps_hat_j inside the neighborhood, Y_j
/// elsewhere; inputs unchanged.
inline LabeledDataset modified_labels(const LabeledDataset& data, const Corrector& corrector,
                                      const NeighborhoodSpec& nbhd) {
    Eigen::VectorXd labels = data.labels();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        const Eigen::VectorXd x = data.point(i);
        if (nbhd.contains(x)) labels(i) -= corrector.predict(x);
    }
    return data.with_labels(std::move(labels));
}

/// Step (3): second application of the base model, producing theta'.
inline BaseModelFit refit_base(const BaseModelFamily& family, const LabeledDataset& modified) {
    return family.fit(modified);
}

/// Delta f(x) = f_theta(x) - f_theta'(x), the interpretable surrogate of the
/// correction.
inline double surrogate_delta_f(const BaseModelFit& fit, const BaseModelFit& fit_prime,
                                const Eigen::VectorXd& x) {
    if (fit.kind() != fit_prime.kind())
        throw ValidationError("surrogate: fits come from different model kinds");
    return fit.predict(x) - fit_prime.predict(x);
}

/// Reflected model f_theta~(x) = f_theta(x) + Delta f(x) = 2 f_theta(x) - f_theta'(x).
inline double reflected_prediction(const BaseModelFit& fit, const BaseModelFit& fit_prime,
                                   const Eigen::VectorXd& x) {
    return 2.0 * fit.predict(x) - fit_prime.predict(x);
}

/// Output of one BAPC run. delta_theta follows the theta' - theta
/// convention; the reflected shift theta~ - theta = theta - theta' is
/// exposed separately since explanations read off the reflected model.
struct BapcResult {
    BaseModelFit base;
    BaseModelFit refit;
    Eigen::VectorXd x_n;
    NeighborhoodSpec neighborhood;
    double eps_hat_at_xn = 0.0;
    double corrected_prediction = 0.0;
    double delta_f_at_xn = 0.0;

    const Eigen::VectorXd& theta() const { return base.params(); }
    const Eigen::VectorXd& theta_prime() const { return refit.params(); }
    Eigen::VectorXd delta_theta() const { return refit.params() - base.params(); }
    Eigen::VectorXd delta_theta_reflected() const { return base.params() - refit.params(); }

    double delta_f(const Eigen::VectorXd& x) const {
        return surrogate_delta_f(base, refit, x);
    }
    double reflected(const Eigen::VectorXd& x) const {
        return reflected_prediction(base, refit, x);
    }
};

/// Steps (1)-(3) with an already-trained corrector (trained on the residuals
/// of this family/dataset fit; reuse across neighborhoods is the caller's
/// prerogative since Step (2) has no neighborhood).
inline BapcResult run_bapc(const BaseModelFamily& family, const Corrector& corrector,
                           const LabeledDataset& data, const Eigen::VectorXd& x_n,
                           const NeighborhoodSpec& nbhd) {
    if (!nbhd.contains(x_n))
        throw ValidationError("run_bapc: x_n must lie in its own neighborhood");
    BaseModelFit base = fit_base(family, data);
    const LabeledDataset modified = modified_labels(data, corrector, nbhd);
    BaseModelFit refit = refit_base(family, modified);

    BapcResult result{std::move(base), std::move(refit), x_n, nbhd};
    result.eps_hat_at_xn = corrector.predict(x_n);
    result.corrected_prediction = result.base.predict(x_n) + result.eps_hat_at_xn;
    result.delta_f_at_xn = surrogate_delta_f(result.base, result.refit, x_n);
    return result;
}

using CorrectorFactory =
    std::function<std::shared_ptr<const Corrector>(const LabeledDataset& xi)>;

/// Full pipeline variant that also performs Step (2): the factory receives
/// the residual dataset xi and returns the trained corrector.
inline BapcResult run_bapc(const BaseModelFamily& family, const CorrectorFactory& train,
                           const LabeledDataset& data, const Eigen::VectorXd& x_n,
                           const NeighborhoodSpec& nbhd) {
    if (!nbhd.contains(x_n))
        throw ValidationError("run_bapc: x_n must lie in its own neighborhood");
    const BaseModelFit base = fit_base(family, data);
    const auto corrector = train(residual_dataset(base, data));
    return run_bapc(family, *corrector, data, x_n, nbhd);
}

} // namespace bapc
