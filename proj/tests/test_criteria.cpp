#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "bapc/criteria.hpp"
#include "bapc/engine.hpp"
#include "bapc/rng.hpp"
#include "support/oracles.hpp"

using bapc::CriteriaParams;
using bapc::LabeledDataset;
using bapc::NeighborhoodSpec;

namespace {

bapc::BaseModelFit affine_fit(double intercept, double slope) {
    Eigen::VectorXd theta(2);
    theta << intercept, slope;
    return bapc::BaseModelFit(bapc::BaseModelKind::ols_linear, theta, 0.0, 1,
                              [=](const Eigen::VectorXd& x) { return intercept + slope * x(0); });
}

} // namespace

TEST_CASE("C1 and C2 are strict inequalities") {
    CHECK(bapc::check_c1(1.0, 0.1, 1.0));
    CHECK_FALSE(bapc::check_c1(1.0, 1.0, 1.0));
    CHECK_FALSE(bapc::check_c1(0.0, 0.1, 1.0));
    CHECK_FALSE(bapc::check_c1(0.0, 0.0, 1.0)); // 0 < 0 fails

    CHECK(bapc::check_c2(0.5, 0.5, 1.0, 0.5));
    CHECK_FALSE(bapc::check_c2(0.5, 0.0, 1.0, 0.5));
    CHECK_FALSE(bapc::check_c2(0.5, 0.2, 0.0, 1.0)); // eps = 0, nonzero left side
}

TEST_CASE("criteria params validate their ranges") {
    CHECK_THROWS_AS(CriteriaParams(0.0, 1.0, 1.0), bapc::ValidationError);
    CHECK_THROWS_AS(CriteriaParams(1.0, 1.1, 1.0), bapc::ValidationError);
    CHECK_THROWS_AS(CriteriaParams(1.0, 1.0, 0.0), bapc::ValidationError);
    CHECK_NOTHROW(CriteriaParams(1.0, 1.0, 3.0));
}

TEST_CASE("estimate_deltas computes hand-checkable fractions") {
    // Base f(x) = 0, refit f'(x) = -0.5: delta_f = 0.5 everywhere.
    const auto fit = affine_fit(0.0, 0.0);
    const auto fit_prime = affine_fit(-0.5, 0.0);
    // eps = labels: (1, 2, 0.1, -1); eps_hat = 0.5 everywhere.
    const auto data =
        LabeledDataset::from_1d({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 0.1, -1.0});
    const bapc::FunctionCorrector half([](const Eigen::VectorXd&) { return 0.5; });

    // C1 with eta1 = 1: |eps - 0.5| < |eps| -> holds for 1 and 2,
    // fails for 0.1 (0.4 > 0.1) and -1 (1.5 > 1). delta1 = 2/4.
    // C2 with eta2 = 1: |0.5 - 0.5| = 0 < |eps| holds everywhere. delta2 = 0.
    const auto report = bapc::estimate_deltas(data, fit, fit_prime, half,
                                              CriteriaParams(1.0, 1.0, 1.0));
    REQUIRE(report.points.size() == 4);
    CHECK(report.delta1_hat == 0.5);
    CHECK(report.delta2_hat == 0.0);
    CHECK_THAT(report.mean_abs_eps, Catch::Matchers::WithinAbs(1.025, 1e-12));
    CHECK(report.points[0].c1_ok);
    CHECK_FALSE(report.points[2].c1_ok);
    CHECK_FALSE(report.points[0].eps_is_zero);

    // Restricting to the first two points via the neighborhood drops the
    // violations.
    const auto local = bapc::estimate_deltas(data, NeighborhoodSpec::interval(0.5, 0.5),
                                             fit, fit_prime, half,
                                             CriteriaParams(1.0, 1.0, 1.0));
    CHECK(local.points.size() == 2);
    CHECK(local.delta1_hat == 0.0);

    CHECK_THROWS_AS(bapc::estimate_deltas(data, NeighborhoodSpec::interval(50.0, 1.0),
                                          fit, fit_prime, half, CriteriaParams()),
                    bapc::EmptyNeighborhoodError);
}

TEST_CASE("points with zero residual are flagged violations") {
    const auto fit = affine_fit(0.0, 1.0);
    const auto data = LabeledDataset::from_1d({1.0, 2.0}, {1.0, 3.0});
    const bapc::FunctionCorrector tiny([](const Eigen::VectorXd&) { return 0.01; });
    const auto report =
        bapc::estimate_deltas(data, fit, fit, tiny, CriteriaParams(1.0, 1.0, 1.0));
    CHECK(report.points[0].eps_is_zero);
    CHECK_FALSE(report.points[0].c1_ok);
    CHECK_FALSE(report.points[0].c2_ok);
    CHECK_FALSE(report.points[1].eps_is_zero);
}

TEST_CASE("delta estimates are nonincreasing in eta") {
    bapc::RandomStream rng(60);
    std::vector<double> x(80), y(80);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(0.0, 3.0);
        y[i] = 1.0 + 0.5 * x[i] + rng.normal();
    }
    const auto data = LabeledDataset::from_1d(x, y);
    const auto fit = bapc::fit_base(bapc::OlsLinearModel(), data);
    const auto fit_prime = affine_fit(0.8, 0.6);
    const bapc::FunctionCorrector noisy_guess(
        [](const Eigen::VectorXd& q) { return 0.3 * std::sin(3.0 * q(0)); });

    double prev1 = -1.0, prev2 = -1.0;
    for (const double eta : {0.1, 0.3, 0.5, 0.75, 1.0}) {
        const auto report = bapc::estimate_deltas(data, fit, fit_prime, noisy_guess,
                                                  CriteriaParams(eta, eta, 1.0));
        if (prev1 >= 0.0) {
            CHECK(report.delta1_hat <= prev1);
            CHECK(report.delta2_hat <= prev2);
        }
        prev1 = report.delta1_hat;
        prev2 = report.delta2_hat;
    }
}

TEST_CASE("radius_sweep keeps delta1 exactly constant") {
    bapc::RandomStream rng(61);
    std::vector<double> x(100), y(100);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(0.0, 3.0);
        y[i] = 2.0 - x[i] + 0.8 * rng.normal();
    }
    const auto data = LabeledDataset::from_1d(x, y);
    const bapc::FunctionCorrector corrector(
        [](const Eigen::VectorXd& q) { return 0.4 * std::cos(2.0 * q(0)); });

    Eigen::VectorXd center(1);
    center << 1.0;
    std::vector<double> radii;
    for (double r = 0.1; r <= 2.0 + 1e-9; r += 0.1) radii.push_back(r);

    const auto rows = bapc::radius_sweep(bapc::OlsLinearModel(), corrector, data,
                                         center, radii, CriteriaParams(0.5, 0.5, 1.0));
    REQUIRE(rows.size() == radii.size());
    bool delta2_varies = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].radius == radii[i]);
        CHECK(rows[i].delta1_hat == rows[0].delta1_hat); // exact equality
        delta2_varies = delta2_varies || rows[i].delta2_hat != rows[0].delta2_hat;
    }
    CHECK(delta2_varies);

    // Consistency with a direct single-radius evaluation on the same set.
    const auto fit = bapc::fit_base(bapc::OlsLinearModel(), data);
    const auto refit = bapc::refit_base(
        bapc::OlsLinearModel(),
        bapc::modified_labels(data, corrector, NeighborhoodSpec(center, radii[4])));
    const auto direct =
        bapc::estimate_deltas(data, NeighborhoodSpec(center, radii.back()), fit, refit,
                              corrector, CriteriaParams(0.5, 0.5, 1.0));
    CHECK(rows[4].delta2_hat == direct.delta2_hat);
}

TEST_CASE("radius_sweep validates the radius grid") {
    const auto data = LabeledDataset::from_1d({0.0, 1.0, 2.0}, {0.0, 1.0, 2.0});
    Eigen::VectorXd center(1);
    center << 1.0;
    const bapc::ZeroCorrector zero;
    CHECK_THROWS_AS(bapc::radius_sweep(bapc::OlsLinearModel(), zero, data, center, {},
                                       CriteriaParams()),
                    bapc::ValidationError);
    CHECK_THROWS_AS(bapc::radius_sweep(bapc::OlsLinearModel(), zero, data, center,
                                       {0.5, 0.5}, CriteriaParams()),
                    bapc::ValidationError);
    CHECK_THROWS_AS(bapc::radius_sweep(bapc::OlsLinearModel(), zero, data, center,
                                       {-1.0, 1.0}, CriteriaParams()),
                    bapc::ValidationError);
}

TEST_CASE("theorem_bound evaluates and orders correctly") {
    CHECK_THAT(bapc::theorem_bound(0.5, 0.5, 0.1, 0.1, 1.0, 1.0),
               Catch::Matchers::WithinAbs(1.21, 1e-12));
    CHECK_THAT(bapc::theorem_bound(0.5, 0.5, 0.1, 0.1, 1e12, 1.0),
               Catch::Matchers::WithinAbs(0.21, 1e-9));
    CHECK_THAT(bapc::theorem_bound(0.3, 0.4, 0.0, 0.0, 2.0, 1.5),
               Catch::Matchers::WithinAbs(0.7 * 1.5 / 2.0, 1e-12));
    CHECK_THROWS_AS(bapc::theorem_bound(0.5, 0.5, 0.1, 0.1, 0.0, 1.0),
                    bapc::ValidationError);
    CHECK_THROWS_AS(bapc::theorem_bound(-0.1, 0.5, 0.1, 0.1, 1.0, 1.0),
                    bapc::ValidationError);

    bapc::RandomStream rng(62);
    for (int i = 0; i < 200; ++i) {
        const double e1 = rng.uniform(), e2 = rng.uniform();
        const double d1 = rng.uniform(), d2 = rng.uniform();
        const double a = rng.uniform(0.1, 5.0), m = rng.uniform(0.0, 3.0);
        const double b = bapc::theorem_bound(e1, e2, d1, d2, a, m);
        CHECK(bapc::theorem_bound(e1, e2, d1, d2, a * 2.0, m) <= b);
        CHECK(bapc::theorem_bound(e1 + 0.1, e2, d1, d2, a, m) >= b);
        CHECK(bapc::theorem_bound(e1, e2, d1 + 0.1, d2, a, m) >= b);
    }
}

TEST_CASE("empirical surrogate tail counts exceedances") {
    const auto fit = affine_fit(0.0, 1.0);
    const auto fit_prime = affine_fit(0.0, 1.0); // reflected model = fit
    const auto data = LabeledDataset::from_1d({0.0, 1.0, 2.0}, {0.5, 1.0, 2.4});
    // Deviations: 0.5, 0.0, 0.4.
    CHECK(bapc::empirical_surrogate_tail(data, fit, fit_prime, 1.0) == 0.0);
    CHECK_THAT(bapc::empirical_surrogate_tail(data, fit, fit_prime, 0.45),
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(bapc::empirical_surrogate_tail(data, fit, fit_prime, 0.0),
               Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
}

TEST_CASE("pointwise C1+C2 with known constants zero out the tail") {
    // The triangle-inequality consequence quantifies over arbitrary fit
    // pairs, so both fits and the corrector are constructed directly:
    // eps = 1 + w with |w| <= 0.05, eps_hat = 0.97 + 0.5 w, delta_f = 0.98.
    bapc::RandomStream rng(63);
    std::vector<double> x(60), y(60), w(60);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(1.0, 4.0);
        w[i] = rng.uniform(-0.05, 0.05);
        y[i] = 2.0 + x[i] + 1.0 + w[i];
    }
    const auto data = LabeledDataset::from_1d(x, y);
    const auto fit = affine_fit(2.0, 1.0);
    const auto fit_prime = affine_fit(2.0 - 0.98, 1.0);

    const bapc::FunctionCorrector corrector([&](const Eigen::VectorXd& q) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] == q(0)) return 0.97 + 0.5 * w[i];
        return 0.97;
    });

    // Per point: |delta_eps| = |0.03 + 0.5 w| <= 0.055 < 0.1 * |eps| >= 0.095
    // and |eps_hat - delta_f| = |0.5 w - 0.01| <= 0.035 < same bound.
    const auto report = bapc::estimate_deltas(data, fit, fit_prime, corrector,
                                              CriteriaParams(0.1, 0.1, 1.0));
    CHECK(report.delta1_hat == 0.0);
    CHECK(report.delta2_hat == 0.0);

    const double max_abs_eps = 1.05;
    const double alpha = (0.1 + 0.1) * max_abs_eps;
    CHECK(bapc::empirical_surrogate_tail(data, fit, fit_prime, alpha) == 0.0);
}
