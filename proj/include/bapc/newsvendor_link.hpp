#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "bapc/base_model.hpp"
#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/smoothing.hpp"

namespace bapc {

/// pi(q, D) = p * min(D, q) - c * q: revenue on sold stock minus cost of
/// ordered stock.
inline double profit(double price, double cost, double order, double demand) {
    return price * std::min(demand, order) - cost * order;
}

/// Profit-maximizing order under exponential demand with rate p * lambda:
/// q* = log(p/c) / (p * lambda).
inline double parametric_critical_fractile(double lambda, double price, double cost) {
    if (!(lambda > 0.0)) throw ValidationError("critical fractile: lambda must be > 0");
    if (!(price > cost && cost > 0.0))
        throw ValidationError("critical fractile: need price > cost > 0");
    return std::log(price / cost) / (price * lambda);
}

/// Inverse ECDF: the smallest sample value x with F_hat(x) >= frac.
/// The sample must be sorted ascending.
inline double empirical_quantile(const std::vector<double>& sorted_sample, double frac) {
    if (sorted_sample.empty()) throw ValidationError("quantile: empty sample");
    if (!(frac > 0.0 && frac < 1.0))
        throw ValidationError("quantile: frac must lie in (0,1)");
    if (!std::is_sorted(sorted_sample.begin(), sorted_sample.end()))
        throw ValidationError("quantile: sample must be sorted");
    const double n = static_cast<double>(sorted_sample.size());
    // Guard against the product landing a hair above an integer breakpoint.
    const auto idx = static_cast<std::size_t>(std::ceil(n * frac - 1e-9)) - 1;
    return sorted_sample[std::min(idx, sorted_sample.size() - 1)];
}

/// count points, log-spaced, endpoints included.
inline std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi > lo)) throw ValidationError("grid: need 0 < lo < hi");
    if (count < 2) throw ValidationError("grid: need at least two points");
    std::vector<double> grid(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[i] = std::exp(llo + f * (lhi - llo));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

/// One-parameter success-rate link: lambda plus everything the indicator
/// needs (prices, the demand-neighborhood half-width delta, and the sorted
/// demand sample the neighborhoods are formed in).
struct NewsvendorLinkParams {
    double lambda;
    double delta;
    double price;
    double cost;
    std::vector<double> demand_sample;

    NewsvendorLinkParams(double lambda_, double delta_, double price_, double cost_,
                         std::vector<double> demand_sample_)
        : lambda(lambda_),
          delta(delta_),
          price(price_),
          cost(cost_),
          demand_sample(std::move(demand_sample_)) {
        if (!(lambda > 0.0)) throw ValidationError("link params: lambda must be > 0");
        if (!(delta >= 0.0)) throw ValidationError("link params: delta must be >= 0");
        if (!(price > cost && cost > 0.0))
            throw ValidationError("link params: need price > cost > 0");
        if (!std::is_sorted(demand_sample.begin(), demand_sample.end()))
            throw ValidationError("link params: demand sample must be sorted");
    }

    NewsvendorLinkParams with_lambda(double lambda_) const {
        NewsvendorLinkParams copy = *this;
        copy.lambda = lambda_;
        return copy;
    }
};

/// S_hat_i(lambda): fraction of the demand neighborhood
/// {D in sample : |D - D_i| <= delta} with positive profit at the parametric
/// optimal order q*(lambda).
inline double success_indicator(const NewsvendorLinkParams& params, double demand_i) {
    const auto& sample = params.demand_sample;
    const auto lo = std::lower_bound(sample.begin(), sample.end(),
                                     demand_i - params.delta);
    const auto hi = std::upper_bound(sample.begin(), sample.end(),
                                     demand_i + params.delta);
    if (lo == hi)
        throw EmptyNeighborhoodError("success indicator: no demands within delta");
    const double order =
        parametric_critical_fractile(params.lambda, params.price, params.cost);
    std::size_t positive = 0;
    for (auto it = lo; it != hi; ++it)
        if (profit(params.price, params.cost, order, *it) > 0.0) ++positive;
    return static_cast<double>(positive) / static_cast<double>(hi - lo);
}

struct LambdaFitResult {
    double lambda_star = 0.0;
    std::size_t grid_index = 0;
    std::vector<double> grid;
    std::vector<double> objective;
    std::vector<double> smoothed;
};

/// Fits lambda by grid search on the squared-residual objective
/// sum_i (S_i - S_hat_i(lambda))^2, smoothed by local regression in
/// log(lambda). Ties go to the smaller lambda.
inline LambdaFitResult fit_lambda(const std::vector<double>& demands,
                                  const std::vector<double>& targets,
                                  const NewsvendorLinkParams& params_template,
                                  const std::vector<double>& lambda_grid,
                                  double smoothing_span) {
    if (demands.size() != targets.size())
        throw DimensionError("fit_lambda: demands and targets sizes differ");
    if (demands.empty()) throw ValidationError("fit_lambda: empty data");
    if (lambda_grid.empty()) throw ValidationError("fit_lambda: empty grid");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0))
            throw ValidationError("fit_lambda: grid values must be > 0");
        if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
            throw ValidationError("fit_lambda: grid must be strictly increasing");
    }

    LambdaFitResult result;
    result.grid = lambda_grid;
    result.objective.resize(lambda_grid.size());
    std::vector<double> log_grid(lambda_grid.size());
    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
        const auto params = params_template.with_lambda(lambda_grid[g]);
        double obj = 0.0;
        for (std::size_t i = 0; i < demands.size(); ++i) {
            const double r = targets[i] - success_indicator(params, demands[i]);
            obj += r * r;
        }
        if (!std::isfinite(obj))
            throw NonFiniteError("fit_lambda: non-finite objective");
        result.objective[g] = obj;
        log_grid[g] = std::log(lambda_grid[g]);
    }

    result.smoothed = loess_smooth(log_grid, result.objective, smoothing_span);
    result.grid_index = 0;
    for (std::size_t g = 1; g < result.smoothed.size(); ++g)
        if (result.smoothed[g] < result.smoothed[result.grid_index])
            result.grid_index = g;
    result.lambda_star = lambda_grid[result.grid_index];
    return result;
}

/// Base-model adapter: inputs are demands, labels are success values in
/// [0,1], theta is the single entry (lambda). The demand sample backing the
/// indicator neighborhoods is taken from the fitted dataset itself, so a
/// refit on modified labels sees the same neighborhoods.
class NewsvendorLinkModel final : public BaseModelFamily {
public:
    NewsvendorLinkModel(double delta, double price, double cost,
                        std::vector<double> lambda_grid, double smoothing_span)
        : delta_(delta),
          price_(price),
          cost_(cost),
          lambda_grid_(std::move(lambda_grid)),
          smoothing_span_(smoothing_span) {}

    BaseModelKind kind() const override { return BaseModelKind::newsvendor_link; }

    BaseModelFit fit(const LabeledDataset& data) const override {
        if (data.dim() != 1)
            throw DimensionError("newsvendor link: inputs must be scalar demands");
        std::vector<double> demands(data.size()), targets(data.size());
        for (Eigen::Index i = 0; i < data.size(); ++i) {
            demands[static_cast<std::size_t>(i)] = data.inputs()(i, 0);
            const double s = data.label(i);
            if (!(s >= 0.0 && s <= 1.0))
                throw ValidationError("newsvendor link: targets must lie in [0,1]");
            targets[static_cast<std::size_t>(i)] = s;
        }
        std::vector<double> sample = demands;
        std::sort(sample.begin(), sample.end());
        const NewsvendorLinkParams params(1.0, delta_, price_, cost_, std::move(sample));

        const auto fit = fit_lambda(demands, targets, params, lambda_grid_, smoothing_span_);
        const auto fitted = params.with_lambda(fit.lambda_star);

        Eigen::VectorXd theta(1);
        theta << fit.lambda_star;
        auto predict = [fitted](const Eigen::VectorXd& x) {
            return success_indicator(fitted, x(0));
        };
        return BaseModelFit(BaseModelKind::newsvendor_link, theta,
                            fit.objective[fit.grid_index], 1, std::move(predict));
    }

private:
    double delta_;
    double price_;
    double cost_;
    std::vector<double> lambda_grid_;
    double smoothing_span_;
};

} // namespace bapc
