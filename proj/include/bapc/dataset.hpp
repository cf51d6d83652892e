#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bapc/errors.hpp"

namespace bapc {

/// Ordered labeled sample: rows of `inputs()` are the instances, `labels()`
/// the scalar outcomes. Validated on construction: at least two points, a
/// consistent dimension, no non-finite values.
class LabeledDataset {
public:
    LabeledDataset(Eigen::MatrixXd inputs, Eigen::VectorXd labels)
        : inputs_(std::move(inputs)), labels_(std::move(labels)) {
        if (inputs_.rows() != labels_.size())
            throw DimensionError("dataset: inputs and labels disagree on n");
        if (inputs_.rows() < 2)
            throw ValidationError("dataset: need at least two points");
        if (inputs_.cols() < 1)
            throw ValidationError("dataset: need at least one input dimension");
        if (!inputs_.allFinite() || !labels_.allFinite())
            throw NonFiniteError("dataset: non-finite value");
    }

    static LabeledDataset from_1d(const std::vector<double>& x,
                                  const std::vector<double>& y) {
        if (x.size() != y.size())
            throw DimensionError("dataset: x and y sizes differ");
        Eigen::MatrixXd inputs(static_cast<Eigen::Index>(x.size()), 1);
        Eigen::VectorXd labels(static_cast<Eigen::Index>(y.size()));
        for (std::size_t i = 0; i < x.size(); ++i) {
            inputs(static_cast<Eigen::Index>(i), 0) = x[i];
            labels(static_cast<Eigen::Index>(i)) = y[i];
        }
        return LabeledDataset(std::move(inputs), std::move(labels));
    }

    Eigen::Index size() const { return inputs_.rows(); }
    Eigen::Index dim() const { return inputs_.cols(); }
    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& labels() const { return labels_; }

    Eigen::VectorXd point(Eigen::Index i) const { return inputs_.row(i).transpose(); }
    double label(Eigen::Index i) const { return labels_(i); }

    /// Same inputs, new labels.
    LabeledDataset with_labels(Eigen::VectorXd labels) const {
        return LabeledDataset(inputs_, std::move(labels));
    }

private:
    Eigen::MatrixXd inputs_;
    Eigen::VectorXd labels_;
};

/// Closed ball N(x_m, r): absolute distance per coordinate in one dimension,
/// Euclidean otherwise. r = 0 selects exactly x_m.
struct NeighborhoodSpec {
    Eigen::VectorXd center;
    double radius = 0.0;

    NeighborhoodSpec() = default;
    NeighborhoodSpec(Eigen::VectorXd center_, double radius_)
        : center(std::move(center_)), radius(radius_) {
        if (radius < 0.0) throw ValidationError("neighborhood: radius must be >= 0");
        if (!center.allFinite()) throw NonFiniteError("neighborhood: non-finite center");
    }

    /// 1-d interval N(center, radius) = [center - radius, center + radius].
    static NeighborhoodSpec interval(double center, double radius) {
        Eigen::VectorXd c(1);
        c << center;
        return NeighborhoodSpec(std::move(c), radius);
    }

    /// Contains every point; used for the global-correction identities.
    static NeighborhoodSpec global(Eigen::Index dim) {
        NeighborhoodSpec spec;
        spec.center = Eigen::VectorXd::Zero(dim);
        spec.radius = std::numeric_limits<double>::infinity();
        return spec;
    }

    double distance(const Eigen::VectorXd& x) const {
        if (x.size() != center.size())
            throw DimensionError("neighborhood: dimension mismatch");
        if (center.size() == 1) return std::abs(x(0) - center(0));
        return (x - center).norm();
    }

    bool contains(const Eigen::VectorXd& x) const { return distance(x) <= radius; }

    bool contains1(double x) const {
        Eigen::VectorXd v(1);
        v << x;
        return contains(v);
    }
};

} // namespace bapc
