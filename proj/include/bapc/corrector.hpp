#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string_view>
#include <utility>

#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"

namespace bapc {

enum class CorrectorKind { mlp, random_forest };

/// Residual regressor A_xi: trained on (X_i, eps_i), predicts eps_hat(x).
class Corrector {
public:
    virtual ~Corrector() = default;
    virtual double predict(const Eigen::VectorXd& x) const = 0;
    virtual std::string_view name() const = 0;

    double predict1(double x) const {
        Eigen::VectorXd v(1);
        v << x;
        return predict(v);
    }

    /// eps_hat for every row of the dataset's inputs, order preserved.
    Eigen::VectorXd predict_all(const LabeledDataset& data) const {
        Eigen::VectorXd out(data.size());
        for (Eigen::Index i = 0; i < data.size(); ++i) out(i) = predict(data.point(i));
        return out;
    }
};

/// Predicts 0 everywhere; the injection that must leave BAPC a fixed point.
class ZeroCorrector final : public Corrector {
public:
    double predict(const Eigen::VectorXd&) const override { return 0.0; }
    std::string_view name() const override { return "zero"; }
};

/// Adapts an arbitrary function; used to inject exact residuals and other
/// analytically known corrections.
class FunctionCorrector final : public Corrector {
public:
    explicit FunctionCorrector(std::function<double(const Eigen::VectorXd&)> fn)
        : fn_(std::move(fn)) {}
    double predict(const Eigen::VectorXd& x) const override { return fn_(x); }
    std::string_view name() const override { return "function"; }

private:
    std::function<double(const Eigen::VectorXd&)> fn_;
};

/// Residuals of exactly +-1 are pulled inside the open interval before the
/// logit transform.
inline constexpr double kLgtClampBound = 1.0 - 1e-6;

inline double clamp_for_lgt(double x) {
    return std::clamp(x, -kLgtClampBound, kLgtClampBound);
}

/// Lgt(x) = log((1+x)/(1-x)), the logit scaled to (-1, 1).
inline double lgt(double x) {
    if (!(std::abs(x) < 1.0)) throw ValidationError("lgt: |x| must be < 1");
    return std::log((1.0 + x) / (1.0 - x));
}

/// Inverse of lgt: (e^y - 1)/(e^y + 1), which is tanh(y/2) in a form that
/// cannot overflow.
inline double lgt_inverse(double y) { return std::tanh(0.5 * y); }

/// Clips eps_hat so that S - eps_hat stays in [0,1].
inline double truncate_correction(double s, double eps_hat) {
    if (!(s >= 0.0 && s <= 1.0))
        throw ValidationError("truncate: S must lie in [0,1]");
    return std::clamp(eps_hat, s - 1.0, s);
}

/// Trains the inner regressor on Lgt(eps) and back-transforms predictions,
/// so corrections of bounded success rates stay inside (-1, 1).
class LogitWrappedCorrector final : public Corrector {
public:
    explicit LogitWrappedCorrector(std::shared_ptr<const Corrector> inner)
        : inner_(std::move(inner)) {}

    /// Labels for the inner training set: Lgt of the clamped residuals.
    static Eigen::VectorXd transform_targets(const Eigen::VectorXd& eps) {
        Eigen::VectorXd out(eps.size());
        for (Eigen::Index i = 0; i < eps.size(); ++i)
            out(i) = lgt(clamp_for_lgt(eps(i)));
        return out;
    }

    double predict(const Eigen::VectorXd& x) const override {
        return lgt_inverse(inner_->predict(x));
    }
    std::string_view name() const override { return "logit-wrapped"; }

    const Corrector& inner() const { return *inner_; }

private:
    std::shared_ptr<const Corrector> inner_;
};

} // namespace bapc
