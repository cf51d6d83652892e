#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <utility>
#include <vector>

#include "bapc/corrector.hpp"
#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/forest.hpp"
#include "bapc/mlp.hpp"
#include "bapc/newsvendor_link.hpp"
#include "bapc/rng.hpp"

namespace bapc::newsvendor {

enum class CorrectorChoice { random_forest, mlp };

struct NewsvendorConfig {
    double price = 2.0;
    double cost = 1.0;
    double lambda_true = 1.0;
    double perturbation = 1.0;
    int fold_size = 100;
    int mc_repeats = 100;
    double lambda_lo = 0.1;
    double lambda_hi = 10.0;
    std::size_t lambda_grid_points = 200;
    double smoothing_span = 0.25;
    std::vector<double> delta_grid = {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4};
    std::uint64_t seed = 0;
};

inline void validate(const NewsvendorConfig& cfg) {
    if (!(cfg.price > cfg.cost && cfg.cost > 0.0))
        throw ValidationError("newsvendor: need price > cost > 0");
    if (!(cfg.lambda_true > 0.0))
        throw ValidationError("newsvendor: lambda_true must be > 0");
    if (cfg.fold_size < 2 || cfg.fold_size % 2 != 0)
        throw ValidationError("newsvendor: fold_size must be even and >= 2");
    if (cfg.mc_repeats < 1) throw ValidationError("newsvendor: mc_repeats must be >= 1");
    if (!(cfg.lambda_lo > 0.0 && cfg.lambda_hi > cfg.lambda_lo))
        throw ValidationError("newsvendor: need 0 < lambda_lo < lambda_hi");
    if (cfg.lambda_grid_points < 2)
        throw ValidationError("newsvendor: lambda grid needs two points");
    if (!(cfg.smoothing_span >= 0.0))
        throw ValidationError("newsvendor: smoothing_span must be >= 0");
    for (std::size_t i = 0; i < cfg.delta_grid.size(); ++i) {
        if (!(cfg.delta_grid[i] >= 0.0))
            throw ValidationError("newsvendor: delta values must be >= 0");
        if (i > 0 && cfg.delta_grid[i] <= cfg.delta_grid[i - 1])
            throw ValidationError("newsvendor: delta grid must be strictly increasing");
    }
}

/// One simulated month: realized demand, the order the company placed, and
/// whether the month turned a profit. Perturbed months over-order by the
/// configured amount on top of the empirical optimum.
struct MonthRecord {
    double demand = 0.0;
    double order = 0.0;
    double profit = 0.0;
    double success = 0.0;
    bool perturbed = false;
};

namespace detail {

/// Count records: demands drawn i.i.d. exponential(rate p * lambda_true),
/// orders at the sample's own empirical critical fractile, the second half
/// perturbed. Count must be even so the halves match.
inline std::vector<MonthRecord> make_records(const NewsvendorConfig& cfg,
                                             RandomStream& stream, int count) {
    std::vector<double> demands(static_cast<std::size_t>(count));
    for (auto& d : demands) d = stream.exponential(cfg.price * cfg.lambda_true);
    std::vector<double> sorted = demands;
    std::sort(sorted.begin(), sorted.end());
    const double q_hat = empirical_quantile(sorted, 1.0 - cfg.cost / cfg.price);

    std::vector<MonthRecord> records(demands.size());
    for (int i = 0; i < count; ++i) {
        auto& rec = records[static_cast<std::size_t>(i)];
        rec.perturbed = i >= count / 2;
        rec.demand = demands[static_cast<std::size_t>(i)];
        rec.order = q_hat + (rec.perturbed ? cfg.perturbation : 0.0);
        rec.profit = profit(cfg.price, cfg.cost, rec.order, rec.demand);
        rec.success = rec.profit > 0.0 ? 1.0 : 0.0;
    }
    return records;
}

/// Fisher-Yates driven by the stream; deterministic given the stream state.
inline void shuffle_indices(std::vector<std::size_t>& idx, RandomStream& stream) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[stream.below(i)]);
}

inline std::vector<double> demands_of(const std::vector<MonthRecord>& records) {
    std::vector<double> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].demand;
    return out;
}

inline std::vector<double> successes_of(const std::vector<MonthRecord>& records) {
    std::vector<double> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) out[i] = records[i].success;
    return out;
}

} // namespace detail

inline std::vector<MonthRecord> generate_newsvendor_dataset(const NewsvendorConfig& cfg) {
    validate(cfg);
    RandomStream stream(cfg.seed, "demand");
    return detail::make_records(cfg, stream, cfg.fold_size);
}

/// Everything one train/evaluate pass produces. lambda_star and
/// lambda_prime_star both come from the evaluation fold (the corrected fit
/// is a held-out quantity); the training fold supplies the residuals the
/// corrector learns from, plus its own fit lambda_train. delta_lambda
/// compares the two evaluation-fold fits, which makes a zero corrector an
/// exact fixed point; delta_lambda_from_train baselines against the
/// training fit instead, trading that invariance for a tighter spread.
struct FoldRunResult {
    double lambda_train = 0.0;
    double lambda_star = 0.0;
    double lambda_prime_star = 0.0;
    double delta_lambda = 0.0;
    double delta_lambda_from_train = 0.0;
    std::vector<double> train_residuals;
    std::vector<double> corrections;
    LambdaFitResult fit_star;
    LambdaFitResult fit_prime;
    bool degenerate_train = false;
    bool degenerate_eval = false;
};

inline std::vector<double> lambda_grid(const NewsvendorConfig& cfg) {
    return log_spaced_grid(cfg.lambda_lo, cfg.lambda_hi, cfg.lambda_grid_points);
}

namespace detail {

inline std::shared_ptr<const Corrector> train_inner(CorrectorChoice kind,
                                                    const LabeledDataset& data,
                                                    std::uint64_t seed) {
    if (kind == CorrectorChoice::random_forest) {
        ForestSpec spec;
        spec.seed = seed;
        return std::make_shared<ForestCorrector>(spec, data);
    }
    MlpSpec spec;
    spec.seed = seed;
    return std::make_shared<MlpCorrector>(spec, data);
}

inline bool all_equal(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(),
                              [](double a, double b) { return a != b; }) == v.end();
}

/// Splits 2n records (unperturbed in [0, n), perturbed in [n, 2n)) into two
/// folds of n rows, each holding exactly n/2 from either group. Index lists
/// come back sorted.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
stratified_split(std::size_t n, RandomStream& stream) {
    std::vector<std::size_t> unperturbed(n), perturbed(n);
    std::iota(unperturbed.begin(), unperturbed.end(), std::size_t{0});
    std::iota(perturbed.begin(), perturbed.end(), n);
    shuffle_indices(unperturbed, stream);
    shuffle_indices(perturbed, stream);

    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> folds;
    auto& [train, eval] = folds;
    train.insert(train.end(), unperturbed.begin(), unperturbed.begin() + n / 2);
    train.insert(train.end(), perturbed.begin(), perturbed.begin() + n / 2);
    eval.insert(eval.end(), unperturbed.begin() + n / 2, unperturbed.end());
    eval.insert(eval.end(), perturbed.begin() + n / 2, perturbed.end());
    std::sort(train.begin(), train.end());
    std::sort(eval.begin(), eval.end());
    return folds;
}

/// Step 1 on the training fold: fit lambda to the raw success flags and
/// keep the residuals the corrector will learn from.
struct StepOneFit {
    std::vector<double> demands;
    std::vector<double> successes;
    std::vector<double> residuals;
    LambdaFitResult fit;
    bool degenerate = false;
};

inline StepOneFit step_one(const NewsvendorConfig& cfg,
                           const std::vector<MonthRecord>& fold, double delta,
                           const std::vector<double>& grid) {
    StepOneFit out;
    out.demands = demands_of(fold);
    out.successes = successes_of(fold);
    out.degenerate = all_equal(out.successes);
    std::vector<double> sorted = out.demands;
    std::sort(sorted.begin(), sorted.end());
    const NewsvendorLinkParams params(1.0, delta, cfg.price, cfg.cost,
                                      std::move(sorted));
    out.fit = fit_lambda(out.demands, out.successes, params, grid, cfg.smoothing_span);
    const auto fitted = params.with_lambda(out.fit.lambda_star);
    out.residuals.resize(out.demands.size());
    for (std::size_t i = 0; i < out.demands.size(); ++i)
        out.residuals[i] = out.successes[i] - success_indicator(fitted, out.demands[i]);
    return out;
}

/// Steps 2b-3 on the evaluation fold: fit before, correct, fit after.
inline FoldRunResult finish_run(const NewsvendorConfig& cfg, const StepOneFit& step1,
                                const std::vector<MonthRecord>& eval,
                                const Corrector& corrector, double delta,
                                const std::vector<double>& grid) {
    FoldRunResult out;
    out.lambda_train = step1.fit.lambda_star;
    out.train_residuals = step1.residuals;
    out.degenerate_train = step1.degenerate;

    const auto d_eval = demands_of(eval);
    const auto s_eval = successes_of(eval);
    out.degenerate_eval = all_equal(s_eval);
    std::vector<double> eval_sorted = d_eval;
    std::sort(eval_sorted.begin(), eval_sorted.end());
    const NewsvendorLinkParams eval_params(1.0, delta, cfg.price, cfg.cost,
                                           std::move(eval_sorted));

    out.fit_star = fit_lambda(d_eval, s_eval, eval_params, grid, cfg.smoothing_span);
    out.lambda_star = out.fit_star.lambda_star;

    out.corrections.resize(d_eval.size());
    std::vector<double> corrected(d_eval.size());
    for (std::size_t j = 0; j < d_eval.size(); ++j) {
        out.corrections[j] =
            truncate_correction(s_eval[j], corrector.predict1(d_eval[j]));
        corrected[j] = s_eval[j] - out.corrections[j];
    }
    out.fit_prime = fit_lambda(d_eval, corrected, eval_params, grid, cfg.smoothing_span);
    out.lambda_prime_star = out.fit_prime.lambda_star;
    out.delta_lambda = out.lambda_prime_star - out.lambda_star;
    out.delta_lambda_from_train = out.lambda_prime_star - out.lambda_train;
    return out;
}

inline void check_run_args(const NewsvendorConfig& cfg,
                           const std::vector<MonthRecord>& train,
                           const std::vector<MonthRecord>& eval, double delta) {
    validate(cfg);
    if (!(delta >= 0.0)) throw ValidationError("newsvendor: delta must be >= 0");
    if (train.empty() || eval.empty())
        throw ValidationError("newsvendor: folds must be nonempty");
}

} // namespace detail

/// Train/evaluate pass with a caller-supplied correction model, applied
/// as-is to the evaluation fold. A model that predicts zero everywhere
/// leaves the targets untouched, so lambda_prime_star equals lambda_star
/// exactly.
inline FoldRunResult run_newsvendor_bapc(const NewsvendorConfig& cfg,
                                         const std::vector<MonthRecord>& train,
                                         const std::vector<MonthRecord>& eval,
                                         const Corrector& corrector, double delta) {
    detail::check_run_args(cfg, train, eval, delta);
    const std::vector<double> grid = lambda_grid(cfg);
    const auto step1 = detail::step_one(cfg, train, delta, grid);
    return detail::finish_run(cfg, step1, eval, corrector, delta, grid);
}

/// Standard pass: train the chosen corrector on the training fold's
/// residuals (logit-transformed so raw tree or network outputs map back
/// into valid correction range) and evaluate on the other fold.
inline FoldRunResult run_newsvendor_bapc(const NewsvendorConfig& cfg,
                                         const std::vector<MonthRecord>& train,
                                         const std::vector<MonthRecord>& eval,
                                         CorrectorChoice kind, double delta,
                                         std::uint64_t corrector_seed) {
    detail::check_run_args(cfg, train, eval, delta);
    const std::vector<double> grid = lambda_grid(cfg);
    const auto step1 = detail::step_one(cfg, train, delta, grid);

    Eigen::VectorXd eps(static_cast<Eigen::Index>(step1.residuals.size()));
    for (std::size_t i = 0; i < step1.residuals.size(); ++i)
        eps(static_cast<Eigen::Index>(i)) = step1.residuals[i];
    const LabeledDataset inner_data =
        LabeledDataset::from_1d(step1.demands, step1.residuals)
            .with_labels(LogitWrappedCorrector::transform_targets(eps));
    const LogitWrappedCorrector corrector(
        detail::train_inner(kind, inner_data, corrector_seed));
    return detail::finish_run(cfg, step1, eval, corrector, delta, grid);
}

/// The one-sample demonstration: Steps 1-3 on a single dataset, corrections
/// evaluated in-sample (the corrector sees the very months it corrects).
/// Cross-validated shift estimates come from monte_carlo_cv instead.
inline FoldRunResult run_single_sample(const NewsvendorConfig& cfg, CorrectorChoice kind,
                                       double delta) {
    const auto records = generate_newsvendor_dataset(cfg);
    return run_newsvendor_bapc(cfg, records, records, kind, delta,
                               substream_seed(cfg.seed, "corrector-init"));
}

/// One Monte Carlo repeat: which rows went where and what the shift was.
struct RepeatOutcome {
    int repeat_index = 0;
    double lambda_train = 0.0;
    double lambda_star = 0.0;
    double lambda_prime_star = 0.0;
    double delta_lambda = 0.0;
    double delta_lambda_from_train = 0.0;
};

struct MonteCarloResult {
    std::vector<RepeatOutcome> repeats;

    std::vector<double> shifts() const {
        std::vector<double> out(repeats.size());
        for (std::size_t i = 0; i < repeats.size(); ++i) out[i] = repeats[i].delta_lambda;
        return out;
    }

    double mean_shift() const {
        const auto s = shifts();
        return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
    }

    /// Sample standard deviation; zero when only one repeat exists.
    double std_shift() const {
        const auto s = shifts();
        if (s.size() < 2) return 0.0;
        const double m = mean_shift();
        double acc = 0.0;
        for (double x : s) acc += (x - m) * (x - m);
        return std::sqrt(acc / static_cast<double>(s.size() - 1));
    }
};

/// Stratified Monte Carlo cross-validation of the parameter shift. Each
/// repeat draws a fresh two-fold sample (2 * fold_size months), splits it
/// with equal perturbed counts per fold, trains the corrector on one fold
/// and fits both lambdas on the other. All randomness is keyed by the
/// repeat index alone, so runs at different delta values are paired.
inline MonteCarloResult monte_carlo_cv(const NewsvendorConfig& cfg, CorrectorChoice kind,
                                       double delta) {
    validate(cfg);
    MonteCarloResult result;
    result.repeats.reserve(static_cast<std::size_t>(cfg.mc_repeats));
    const auto n = static_cast<std::size_t>(cfg.fold_size);
    for (int rep = 0; rep < cfg.mc_repeats; ++rep) {
        const auto index = static_cast<std::uint64_t>(rep);
        RandomStream demand_stream(cfg.seed, "demand", index);
        const auto records = detail::make_records(cfg, demand_stream, 2 * cfg.fold_size);

        RandomStream split_stream(cfg.seed, "fold-split", index);
        const auto [train_idx, eval_idx] = detail::stratified_split(n, split_stream);

        std::vector<MonthRecord> train, eval;
        for (std::size_t i : train_idx) train.push_back(records[i]);
        for (std::size_t i : eval_idx) eval.push_back(records[i]);

        const auto run = run_newsvendor_bapc(
            cfg, train, eval, kind, delta, substream_seed(cfg.seed, "corrector-init", index));
        result.repeats.push_back({rep, run.lambda_train, run.lambda_star,
                                  run.lambda_prime_star, run.delta_lambda,
                                  run.delta_lambda_from_train});
    }
    return result;
}

struct DeltaCurvePoint {
    double delta = 0.0;
    double mean_delta_lambda = 0.0;
    double std_delta_lambda = 0.0;
};

struct DeltaOptimization {
    std::vector<DeltaCurvePoint> curve;
    std::size_t best_index = 0;
    double delta_star = 0.0;
};

/// Runs the cross-validation once per delta on the config's grid and picks
/// the delta with the smallest shift dispersion. Ties go to the smaller
/// delta.
inline DeltaOptimization optimize_delta(const NewsvendorConfig& cfg, CorrectorChoice kind) {
    validate(cfg);
    if (cfg.delta_grid.empty()) throw ValidationError("newsvendor: empty delta grid");
    DeltaOptimization out;
    for (double delta : cfg.delta_grid) {
        const auto mc = monte_carlo_cv(cfg, kind, delta);
        out.curve.push_back({delta, mc.mean_shift(), mc.std_shift()});
    }
    for (std::size_t i = 1; i < out.curve.size(); ++i)
        if (out.curve[i].std_delta_lambda < out.curve[out.best_index].std_delta_lambda)
            out.best_index = i;
    out.delta_star = out.curve[out.best_index].delta;
    return out;
}

} // namespace bapc::newsvendor
