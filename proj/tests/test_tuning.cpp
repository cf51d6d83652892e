#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/forest.hpp"
#include "bapc/mlp.hpp"
#include "bapc/rng.hpp"
#include "bapc/tuning.hpp"

using bapc::LabeledDataset;

namespace {

LabeledDataset noisy_sine(std::uint64_t seed, int n) {
    bapc::RandomStream rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-2.0, 2.0);
        y[i] = std::sin(2.0 * x[i]) + 0.3 * rng.normal();
    }
    return LabeledDataset::from_1d(x, y);
}

bapc::TuneReport score_forests(const LabeledDataset& data, const std::vector<int>& grid,
                               std::uint64_t seed = 0) {
    return bapc::tune_by_cv(
        data, grid.size(),
        [&](std::size_t c, const LabeledDataset& train, std::uint64_t derived) {
            bapc::ForestSpec spec;
            spec.n_trees = grid[c];
            spec.seed = derived;
            return bapc::ForestCorrector(spec, train);
        },
        3, seed);
}

} // namespace

TEST_CASE("forest tuning prefers the averaged ensemble on noisy data") {
    const auto data = noisy_sine(42, 60);
    const auto report = score_forests(data, {1, 100});
    CHECK(report.best_index == 1);
    CHECK(report.mean_mse[1] < report.mean_mse[0]);
    CHECK(report.mean_mse[0] > 0.0);

    bapc::ForestSpec base;
    base.min_samples_leaf = 3;
    const auto tuned = bapc::tune_forest(base, {1, 100}, data);
    CHECK(tuned.n_trees == 100);
    CHECK(tuned.min_samples_leaf == 3);
}

TEST_CASE("mlp tuning prefers enough hidden units for a curved target") {
    const auto data = noisy_sine(42, 60);
    bapc::MlpSpec base;
    base.max_iterations = 400;
    const auto tuned = bapc::tune_mlp(base, {1, 16}, data);
    CHECK(tuned.hidden_units == 16);
    CHECK(tuned.max_iterations == 400);
}

TEST_CASE("identical candidates tie toward the earlier index") {
    const auto data = noisy_sine(7, 40);
    const auto report = score_forests(data, {7, 7});
    CHECK(report.best_index == 0);
    CHECK(report.mean_mse[0] == report.mean_mse[1]);
}

TEST_CASE("tuning is reproducible for a fixed seed") {
    const auto data = noisy_sine(3, 40);
    const auto first = score_forests(data, {2, 10}, 5);
    const auto second = score_forests(data, {2, 10}, 5);
    REQUIRE(first.mean_mse.size() == second.mean_mse.size());
    CHECK(first.best_index == second.best_index);
    for (std::size_t c = 0; c < first.mean_mse.size(); ++c)
        CHECK(first.mean_mse[c] == second.mean_mse[c]);

    const auto other = score_forests(data, {2, 10}, 6);
    CHECK(first.mean_mse[0] != other.mean_mse[0]);
}

TEST_CASE("fold shuffling is a permutation") {
    for (const Eigen::Index n : {4, 5, 17, 64}) {
        bapc::RandomStream stream(9, "fold-split", static_cast<std::uint64_t>(n));
        auto order = bapc::detail::tuning_order(n, stream);
        REQUIRE(order.size() == static_cast<std::size_t>(n));
        std::sort(order.begin(), order.end());
        for (Eigen::Index i = 0; i < n; ++i) CHECK(order[static_cast<std::size_t>(i)] == i);
    }
}

TEST_CASE("tuning rejects bad arguments") {
    const auto data = noisy_sine(1, 12);
    const auto make = [&](std::size_t, const LabeledDataset& train, std::uint64_t derived) {
        bapc::ForestSpec spec;
        spec.n_trees = 2;
        spec.seed = derived;
        return bapc::ForestCorrector(spec, train);
    };
    CHECK_THROWS_AS(bapc::tune_by_cv(data, 0, make), bapc::ValidationError);
    CHECK_THROWS_AS(bapc::tune_by_cv(data, 1, make, 0), bapc::ValidationError);

    const auto tiny = LabeledDataset::from_1d({0.0, 1.0}, {0.0, 1.0});
    CHECK_THROWS_AS(bapc::tune_by_cv(tiny, 1, make), bapc::ValidationError);

    CHECK_THROWS_AS(bapc::tune_forest(bapc::ForestSpec{}, {0}, data), bapc::ValidationError);
    CHECK_THROWS_AS(bapc::tune_mlp(bapc::MlpSpec{}, {0}, data), bapc::ValidationError);
}
