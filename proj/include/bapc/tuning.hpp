#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/forest.hpp"
#include "bapc/mlp.hpp"
#include "bapc/rng.hpp"

namespace bapc {

/// Mean held-out MSE per candidate from repeated 2-fold cross validation.
/// Ties resolve to the earlier candidate.
struct TuneReport {
    std::size_t best_index = 0;
    std::vector<double> mean_mse;
};

namespace detail {

inline std::vector<Eigen::Index> tuning_order(Eigen::Index n, RandomStream& stream) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(stream.below(i))]);
    return order;
}

inline LabeledDataset rows_of(const LabeledDataset& data,
                              const std::vector<Eigen::Index>& order, std::size_t begin,
                              std::size_t end) {
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(end - begin), data.dim());
    Eigen::VectorXd labels(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
        inputs.row(static_cast<Eigen::Index>(i - begin)) = data.inputs().row(order[i]);
        labels(static_cast<Eigen::Index>(i - begin)) = data.label(order[i]);
    }
    return LabeledDataset(std::move(inputs), std::move(labels));
}

template <typename Model>
double held_out_mse(const Model& model, const LabeledDataset& eval) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < eval.size(); ++i) {
        const double miss = model.predict(eval.point(i)) - eval.label(i);
        sum += miss * miss;
    }
    return sum / static_cast<double>(eval.size());
}

} // namespace detail

/// Scores every candidate by repeated 2-fold CV. `make(c, train, seed)`
/// trains candidate c on the fold's training half with a derived seed.
template <typename Factory>
TuneReport tune_by_cv(const LabeledDataset& data, std::size_t n_candidates, Factory&& make,
                      int repeats = 3, std::uint64_t seed = 0) {
    if (n_candidates == 0) throw ValidationError("tuning: empty candidate grid");
    if (repeats < 1) throw ValidationError("tuning: repeats must be >= 1");
    if (data.size() < 4) throw ValidationError("tuning: need at least 4 points");

    TuneReport report;
    report.mean_mse.assign(n_candidates, 0.0);
    for (int rep = 0; rep < repeats; ++rep) {
        RandomStream stream(seed, "fold-split", static_cast<std::uint64_t>(rep));
        const auto order = detail::tuning_order(data.size(), stream);
        const std::size_t half = order.size() / 2;
        for (int fold = 0; fold < 2; ++fold) {
            const auto train = fold == 0 ? detail::rows_of(data, order, 0, half)
                                         : detail::rows_of(data, order, half, order.size());
            const auto eval = fold == 0 ? detail::rows_of(data, order, half, order.size())
                                        : detail::rows_of(data, order, 0, half);
            // One seed per fold, shared by all candidates, so the
            // comparison is paired.
            const std::uint64_t derived = substream_seed(
                seed, "corrector-init",
                static_cast<std::uint64_t>(rep) * 2 + static_cast<std::uint64_t>(fold));
            for (std::size_t c = 0; c < n_candidates; ++c)
                report.mean_mse[c] += detail::held_out_mse(make(c, train, derived), eval);
        }
    }
    const double folds = 2.0 * static_cast<double>(repeats);
    for (auto& mse : report.mean_mse) mse /= folds;
    for (std::size_t c = 1; c < n_candidates; ++c)
        if (report.mean_mse[c] < report.mean_mse[report.best_index]) report.best_index = c;
    return report;
}

inline ForestSpec tune_forest(const ForestSpec& base, const std::vector<int>& n_trees_grid,
                              const LabeledDataset& data, int repeats = 3,
                              std::uint64_t seed = 0) {
    for (const int n : n_trees_grid)
        if (n < 1) throw ValidationError("tuning: n_trees must be >= 1");
    const auto report = tune_by_cv(
        data, n_trees_grid.size(),
        [&](std::size_t c, const LabeledDataset& train, std::uint64_t derived) {
            ForestSpec spec = base;
            spec.n_trees = n_trees_grid[c];
            spec.seed = derived;
            return ForestCorrector(spec, train);
        },
        repeats, seed);
    ForestSpec best = base;
    best.n_trees = n_trees_grid[report.best_index];
    return best;
}

inline MlpSpec tune_mlp(const MlpSpec& base, const std::vector<int>& hidden_grid,
                        const LabeledDataset& data, int repeats = 3, std::uint64_t seed = 0) {
    for (const int h : hidden_grid)
        if (h < 1) throw ValidationError("tuning: hidden_units must be >= 1");
    const auto report = tune_by_cv(
        data, hidden_grid.size(),
        [&](std::size_t c, const LabeledDataset& train, std::uint64_t derived) {
            MlpSpec spec = base;
            spec.hidden_units = hidden_grid[c];
            spec.seed = derived;
            return MlpCorrector(spec, train);
        },
        repeats, seed);
    MlpSpec best = base;
    best.hidden_units = hidden_grid[report.best_index];
    return best;
}

} // namespace bapc
