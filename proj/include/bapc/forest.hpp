#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "bapc/corrector.hpp"
#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/rng.hpp"

namespace bapc {

struct ForestSpec {
    int n_trees = 100;
    int max_depth = 0; // 0 means unlimited
    int min_samples_leaf = 2;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

namespace detail {

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;
};

/// Greedy least-squares regression tree. Split score is the summed
/// within-child squared error; candidate thresholds are midpoints between
/// consecutive distinct values; ties keep the first candidate in
/// (feature asc, threshold asc) order, so the structure is deterministic.
class RegressionTree {
public:
    void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
             std::vector<std::int32_t> indices, const ForestSpec& spec) {
        nodes_.clear();
        build(x, y, std::move(indices), 0, spec);
    }

    double predict(const Eigen::VectorXd& x) const {
        std::int32_t at = 0;
        while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& node = nodes_[static_cast<std::size_t>(at)];
            at = x(node.feature) <= node.threshold ? node.left : node.right;
        }
        return nodes_[static_cast<std::size_t>(at)].value;
    }

private:
    std::int32_t build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       std::vector<std::int32_t> idx, int depth,
                       const ForestSpec& spec) {
        const auto id = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();

        const double n = static_cast<double>(idx.size());
        double sum = 0.0, sumsq = 0.0;
        for (auto i : idx) {
            sum += y(i);
            sumsq += y(i) * y(i);
        }
        nodes_[static_cast<std::size_t>(id)].value = sum / n;
        const double sse = sumsq - sum * sum / n;

        const bool depth_capped = spec.max_depth > 0 && depth >= spec.max_depth;
        if (idx.size() < 2 * static_cast<std::size_t>(spec.min_samples_leaf) ||
            depth_capped || sse <= 0.0)
            return id;

        int best_feature = -1;
        double best_threshold = 0.0, best_score = sse;
        for (int f = 0; f < x.cols(); ++f) {
            std::vector<std::int32_t> order = idx;
            std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
                return x(a, f) != x(b, f) ? x(a, f) < x(b, f) : a < b;
            });
            double left_sum = 0.0, left_sumsq = 0.0;
            for (std::size_t k = 1; k < order.size(); ++k) {
                const double yk = y(order[k - 1]);
                left_sum += yk;
                left_sumsq += yk * yk;
                if (k < static_cast<std::size_t>(spec.min_samples_leaf) ||
                    order.size() - k < static_cast<std::size_t>(spec.min_samples_leaf))
                    continue;
                const double a = x(order[k - 1], f), b = x(order[k], f);
                if (a == b) continue;
                const double nl = static_cast<double>(k);
                const double nr = n - nl;
                const double right_sum = sum - left_sum;
                const double right_sumsq = sumsq - left_sumsq;
                const double score = (left_sumsq - left_sum * left_sum / nl) +
                                     (right_sumsq - right_sum * right_sum / nr);
                if (score < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = a + (b - a) / 2.0;
                    if (!(best_threshold < b)) best_threshold = a;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::int32_t> left_idx, right_idx;
        for (auto i : idx)
            (x(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        nodes_[static_cast<std::size_t>(id)].feature = best_feature;
        nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
        const auto left = build(x, y, std::move(left_idx), depth + 1, spec);
        nodes_[static_cast<std::size_t>(id)].left = left;
        const auto right = build(x, y, std::move(right_idx), depth + 1, spec);
        nodes_[static_cast<std::size_t>(id)].right = right;
        return id;
    }

    std::vector<TreeNode> nodes_;
};

} // namespace detail

/// Bagged regression trees; every prediction is an average of leaf means and
/// therefore a convex combination of training labels. Each tree draws its
/// bootstrap sample from its own seed-derived substream.
class ForestCorrector final : public Corrector {
public:
    ForestCorrector(const ForestSpec& spec, const LabeledDataset& data) {
        if (spec.n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
        if (spec.min_samples_leaf < 1)
            throw ValidationError("forest: min_samples_leaf must be >= 1");
        if (spec.max_depth < 0)
            throw ValidationError("forest: max_depth must be >= 0");

        dim_ = data.dim();
        const auto n = static_cast<std::uint64_t>(data.size());
        trees_.resize(static_cast<std::size_t>(spec.n_trees));
        for (std::size_t t = 0; t < trees_.size(); ++t) {
            std::vector<std::int32_t> indices(data.size());
            if (spec.bootstrap) {
                RandomStream rng(spec.seed, "tree", t);
                for (auto& i : indices)
                    i = static_cast<std::int32_t>(rng.below(n));
            } else {
                std::iota(indices.begin(), indices.end(), 0);
            }
            trees_[t].fit(data.inputs(), data.labels(), std::move(indices), spec);
        }
    }

    double predict(const Eigen::VectorXd& x) const override {
        if (x.size() != dim_) throw DimensionError("forest: input dimension mismatch");
        double sum = 0.0;
        for (const auto& tree : trees_) sum += tree.predict(x);
        return sum / static_cast<double>(trees_.size());
    }

    std::string_view name() const override { return "random-forest"; }

private:
    Eigen::Index dim_ = 0;
    std::vector<detail::RegressionTree> trees_;
};

inline ForestCorrector train_corrector(const ForestSpec& spec,
                                       const LabeledDataset& residuals) {
    return ForestCorrector(spec, residuals);
}

} // namespace bapc
