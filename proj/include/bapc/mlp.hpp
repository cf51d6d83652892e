#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <utility>
#include <vector>

#include "bapc/corrector.hpp"
#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"
#include "bapc/rng.hpp"

namespace bapc {

struct MlpSpec {
    int hidden_units = 32;
    int max_iterations = 1000;
    /// Relative loss-decrease threshold that counts as converged.
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
};

struct MlpDiagnostics {
    bool converged = false;
    int iterations = 0;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    /// Loss after each accepted step, initial loss first; nonincreasing.
    std::vector<double> loss_trace;
};

/// One hidden rectifier layer, trained full-batch on mean squared error by
/// L-BFGS with Armijo backtracking. Inputs are standardized with moments
/// fitted on the training set. Fully deterministic given spec.seed.
class MlpCorrector final : public Corrector {
public:
    MlpCorrector(const MlpSpec& spec, const LabeledDataset& data) : spec_(spec) {
        if (spec.hidden_units < 1)
            throw ValidationError("mlp: hidden_units must be >= 1");
        if (spec.max_iterations < 1)
            throw ValidationError("mlp: max_iterations must be >= 1");
        if (!(spec.tolerance >= 0.0))
            throw ValidationError("mlp: tolerance must be >= 0");

        const Eigen::Index n = data.size(), d = data.dim();
        mean_ = data.inputs().colwise().mean();
        Eigen::VectorXd var =
            (data.inputs().rowwise() - mean_.transpose()).array().square().colwise().sum() /
            static_cast<double>(n);
        scale_ = var.array().sqrt();
        for (Eigen::Index j = 0; j < d; ++j)
            if (scale_(j) < 1e-12) scale_(j) = 1.0;

        const Eigen::MatrixXd xs =
            (data.inputs().rowwise() - mean_.transpose()).array().rowwise() /
            scale_.transpose().array();
        train(xs, data.labels());
    }

    double predict(const Eigen::VectorXd& x) const override {
        if (x.size() != mean_.size())
            throw DimensionError("mlp: input dimension mismatch");
        const Eigen::VectorXd xs = (x - mean_).cwiseQuotient(scale_);
        const Eigen::VectorXd h = (w1_ * xs + b1_).cwiseMax(0.0);
        return w2_.dot(h) + b2_;
    }

    std::string_view name() const override { return "mlp"; }
    const MlpDiagnostics& diagnostics() const { return diagnostics_; }

private:
    // Flat parameter layout: W1 row-major, b1, w2, b2.
    struct Shape {
        Eigen::Index h, d;
        Eigen::Index total() const { return h * d + h + h + 1; }
    };

    void unpack(const Eigen::VectorXd& p, const Shape& s) {
        w1_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>(p.data(), s.h, s.d);
        b1_ = p.segment(s.h * s.d, s.h);
        w2_ = p.segment(s.h * s.d + s.h, s.h);
        b2_ = p(p.size() - 1);
    }

    static double value_and_grad(const Eigen::VectorXd& p, const Shape& s,
                                 const Eigen::MatrixXd& xs, const Eigen::VectorXd& y,
                                 Eigen::VectorXd& grad) {
        const auto w1 = Eigen::Map<const Eigen::Matrix<
            double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), s.h, s.d);
        const auto b1 = p.segment(s.h * s.d, s.h);
        const auto w2 = p.segment(s.h * s.d + s.h, s.h);
        const double b2 = p(p.size() - 1);
        const double n = static_cast<double>(xs.rows());

        const Eigen::MatrixXd z =
            (xs * w1.transpose()).rowwise() + b1.transpose();
        const Eigen::MatrixXd h = z.cwiseMax(0.0);
        Eigen::VectorXd r = h * w2;
        r.array() += b2;
        r -= y;
        const double loss = r.squaredNorm() / n;

        const Eigen::VectorXd dpred = 2.0 / n * r;
        const Eigen::MatrixXd dz =
            (dpred * w2.transpose()).cwiseProduct((z.array() > 0.0).cast<double>().matrix());
        grad.resize(p.size());
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            grad.data(), s.h, s.d) = dz.transpose() * xs;
        grad.segment(s.h * s.d, s.h) = dz.colwise().sum().transpose();
        grad.segment(s.h * s.d + s.h, s.h) = h.transpose() * dpred;
        grad(p.size() - 1) = dpred.sum();
        return loss;
    }

    void train(const Eigen::MatrixXd& xs, const Eigen::VectorXd& y) {
        const Shape shape{spec_.hidden_units, xs.cols()};
        Eigen::VectorXd p(shape.total());
        RandomStream rng(spec_.seed);
        const double hidden_bound = 1.0 / std::sqrt(static_cast<double>(shape.d));
        const double output_bound = 1.0 / std::sqrt(static_cast<double>(shape.h));
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < shape.h * shape.d; ++i)
            p(at++) = rng.uniform(-hidden_bound, hidden_bound);
        for (Eigen::Index i = 0; i < shape.h; ++i)
            p(at++) = rng.uniform(-hidden_bound, hidden_bound);
        for (Eigen::Index i = 0; i < shape.h + 1; ++i)
            p(at++) = rng.uniform(-output_bound, output_bound);

        Eigen::VectorXd grad;
        double loss = value_and_grad(p, shape, xs, y, grad);
        diagnostics_.initial_loss = loss;
        diagnostics_.loss_trace.push_back(loss);

        // L-BFGS history (most recent last).
        std::deque<Eigen::VectorXd> s_hist, y_hist;
        std::deque<double> rho_hist;
        constexpr std::size_t kMemory = 10;
        constexpr double kArmijo = 1e-4;

        int iter = 0;
        bool converged = false;
        for (; iter < spec_.max_iterations; ++iter) {
            // Two-loop recursion for the search direction.
            Eigen::VectorXd q = grad;
            std::vector<double> alpha(s_hist.size());
            for (std::size_t k = s_hist.size(); k-- > 0;) {
                alpha[k] = rho_hist[k] * s_hist[k].dot(q);
                q -= alpha[k] * y_hist[k];
            }
            if (!s_hist.empty()) {
                const auto& sk = s_hist.back();
                const auto& yk = y_hist.back();
                q *= sk.dot(yk) / yk.squaredNorm();
            }
            for (std::size_t k = 0; k < s_hist.size(); ++k) {
                const double beta = rho_hist[k] * y_hist[k].dot(q);
                q += (alpha[k] - beta) * s_hist[k];
            }
            Eigen::VectorXd dir = -q;
            double slope = grad.dot(dir);
            if (!(slope < 0.0)) {
                dir = -grad;
                slope = grad.dot(dir);
                if (!(slope < 0.0)) {
                    converged = true; // zero gradient: stationary
                    break;
                }
            }

            // Armijo backtracking; accepted steps strictly decrease the loss.
            double step = 1.0;
            double new_loss = loss;
            Eigen::VectorXd p_new, grad_new;
            bool accepted = false;
            for (int trial = 0; trial < 60; ++trial) {
                p_new = p + step * dir;
                Eigen::VectorXd g;
                const double f = value_and_grad(p_new, shape, xs, y, g);
                if (f <= loss + kArmijo * step * slope) {
                    new_loss = f;
                    grad_new = std::move(g);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                converged = true; // no descent at double precision
                break;
            }

            Eigen::VectorXd s_vec = p_new - p;
            Eigen::VectorXd y_vec = grad_new - grad;
            const double sy = s_vec.dot(y_vec);
            if (sy > 1e-12 * s_vec.norm() * y_vec.norm()) {
                s_hist.push_back(std::move(s_vec));
                y_hist.push_back(std::move(y_vec));
                rho_hist.push_back(1.0 / sy);
                if (s_hist.size() > kMemory) {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
            }

            const double decrease = loss - new_loss;
            p = std::move(p_new);
            grad = std::move(grad_new);
            loss = new_loss;
            diagnostics_.loss_trace.push_back(loss);
            if (decrease <= spec_.tolerance *
                                std::max(loss, std::numeric_limits<double>::min())) {
                ++iter;
                converged = true;
                break;
            }
        }

        // The loss is an exact least-squares problem in the output layer once
        // the hidden layer is frozen; finish with that block solved in closed
        // form. Accepting only on non-increase preserves the loss trace
        // invariant.
        {
            const auto w1 = Eigen::Map<const Eigen::Matrix<
                double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p.data(), shape.h,
                                                                          shape.d);
            const auto b1 = p.segment(shape.h * shape.d, shape.h);
            Eigen::MatrixXd h(xs.rows(), shape.h + 1);
            h.leftCols(shape.h) =
                ((xs * w1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
            h.col(shape.h).setOnes();
            const Eigen::VectorXd out = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(h).solve(y);
            Eigen::VectorXd p_polished = p;
            p_polished.segment(shape.h * shape.d + shape.h, shape.h) = out.head(shape.h);
            p_polished(p.size() - 1) = out(shape.h);
            Eigen::VectorXd g;
            const double polished_loss = value_and_grad(p_polished, shape, xs, y, g);
            if (polished_loss <= loss) {
                p = std::move(p_polished);
                loss = polished_loss;
                diagnostics_.loss_trace.push_back(loss);
            }
        }

        diagnostics_.iterations = iter;
        diagnostics_.final_loss = loss;
        diagnostics_.converged = converged;
        unpack(p, shape);
    }

    MlpSpec spec_;
    Eigen::VectorXd mean_, scale_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w1_;
    Eigen::VectorXd b1_, w2_;
    double b2_ = 0.0;
    MlpDiagnostics diagnostics_;
};

inline MlpCorrector train_corrector(const MlpSpec& spec, const LabeledDataset& residuals) {
    return MlpCorrector(spec, residuals);
}

} // namespace bapc
