#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>

#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/ols.hpp"

namespace bapc {

enum class BaseModelKind { ols_linear, newsvendor_link };

/// A fitted interpretable model: the parameter vector theta plus the
/// deterministic prediction rule f_theta. training_loss is the sum of
/// squared residuals on the data the fit was produced from.
class BaseModelFit {
public:
    using PredictFn = std::function<double(const Eigen::VectorXd&)>;

    BaseModelFit(BaseModelKind kind, Eigen::VectorXd theta, double training_loss,
                 Eigen::Index input_dim, PredictFn predict)
        : kind_(kind),
          theta_(std::move(theta)),
          training_loss_(training_loss),
          input_dim_(input_dim),
          predict_(std::move(predict)) {}

    BaseModelKind kind() const { return kind_; }
    const Eigen::VectorXd& params() const { return theta_; }
    double training_loss() const { return training_loss_; }
    Eigen::Index input_dim() const { return input_dim_; }

    double predict(const Eigen::VectorXd& x) const {
        if (x.size() != input_dim_)
            throw DimensionError("base model: input dimension mismatch");
        return predict_(x);
    }

    double predict1(double x) const {
        Eigen::VectorXd v(1);
        v << x;
        return predict(v);
    }

private:
    BaseModelKind kind_;
    Eigen::VectorXd theta_;
    double training_loss_;
    Eigen::Index input_dim_;
    PredictFn predict_;
};

/// Fits instances of one interpretable model kind; refitting on modified
/// labels reuses exactly the same deterministic rule.
class BaseModelFamily {
public:
    virtual ~BaseModelFamily() = default;
    virtual BaseModelKind kind() const = 0;
    virtual BaseModelFit fit(const LabeledDataset& data) const = 0;
};

/// Ordinary least squares with an intercept.
class OlsLinearModel final : public BaseModelFamily {
public:
    BaseModelKind kind() const override { return BaseModelKind::ols_linear; }

    BaseModelFit fit(const LabeledDataset& data) const override {
        const OlsDesign design = OlsDesign::from_dataset(data);
        Eigen::VectorXd theta = ols_fit(design);
        const double loss = (design.y - design.X * theta).squaredNorm();
        const Eigen::Index dim = data.dim();
        auto predict = [theta](const Eigen::VectorXd& x) {
            return theta(0) + theta.tail(theta.size() - 1).dot(x);
        };
        return BaseModelFit(BaseModelKind::ols_linear, theta, loss, dim,
                            std::move(predict));
    }
};

} // namespace bapc
