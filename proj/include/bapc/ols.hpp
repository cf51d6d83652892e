#pragma once

#include <Eigen/Dense>
#include <utility>

#include "bapc/dataset.hpp"
#include "bapc/errors.hpp"

namespace bapc {

/// Least-squares design: n x (d+1) matrix whose leading column is the
/// intercept, plus the outcome vector.
struct OlsDesign {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    static OlsDesign from_dataset(const LabeledDataset& data) {
        OlsDesign design;
        design.X.resize(data.size(), data.dim() + 1);
        design.X.col(0).setOnes();
        design.X.rightCols(data.dim()) = data.inputs();
        design.y = data.labels();
        return design;
    }
};

namespace detail {

inline Eigen::ColPivHouseholderQR<Eigen::MatrixXd> full_rank_qr(const Eigen::MatrixXd& X) {
    if (X.rows() < X.cols())
        throw RankDeficientError("ols: fewer rows than columns");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols())
        throw RankDeficientError("ols: design matrix is rank deficient");
    return qr;
}

} // namespace detail

/// theta = (X'X)^{-1} X'Y, computed via a rank-revealing QR of X.
/// Throws RankDeficientError on a singular normal system.
inline Eigen::VectorXd ols_fit(const OlsDesign& design) {
    if (design.X.rows() != design.y.size())
        throw DimensionError("ols: X and y disagree on n");
    if (!design.X.allFinite() || !design.y.allFinite())
        throw NonFiniteError("ols: non-finite value");
    return detail::full_rank_qr(design.X).solve(design.y);
}

/// (X'X)^{-1} X' eps_hat — the closed-form parameter change produced by
/// removing the predicted corrections eps_hat from the labels of the whole
/// sample.
inline Eigen::VectorXd delta_theta_closed_form(const OlsDesign& design,
                                               const Eigen::VectorXd& eps_hat) {
    if (eps_hat.size() != design.X.rows())
        throw DimensionError("delta_theta: eps_hat length differs from n");
    if (!eps_hat.allFinite())
        throw NonFiniteError("delta_theta: non-finite eps_hat");
    return detail::full_rank_qr(design.X).solve(eps_hat);
}

} // namespace bapc
