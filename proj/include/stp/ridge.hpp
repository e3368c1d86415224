#pragma once

// One-sample-vs-all ridge regression for banks of part classifiers.
//
// Given a data matrix D (one descriptor per row, n rows of length k) and a
// target identity matrix, the classifier for row i solves
//
//     (D^T D + lambda I_k) c_i = d_i.
//
// All n classifiers share the same regularized Gram matrix, so the whole bank
// is one closed-form solve. Because n << k here, the bank is computed through
// the matrix inversion lemma as C = D^T (D D^T + lambda I_n)^-1, which only
// factorizes the n x n side. The direct k x k solves are kept as oracles for
// testing, together with the scale factor that maps the unweighted solution
// onto the positively-weighted one (the two differ only in magnitude, never
// in direction).

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "stp/errors.hpp"

namespace stp {

struct ClassifierBank {
    Eigen::MatrixXd columns;  // k x n, column i classifies row i of D
    double lambda = 0.0;
};

namespace detail {

inline void check_training_input(const Eigen::MatrixXd& D, double lambda) {
    if (!(lambda > 0.0)) throw InvalidInput("ridge: lambda must be positive");
    if (D.rows() < 2) throw InvalidInput("ridge: need at least 2 samples");
    if (!D.allFinite()) throw InvalidInput("ridge: non-finite entries in data matrix");
}

}  // namespace detail

// Bank solve through the small-side (n x n) Cholesky factorization.
inline ClassifierBank train_bank(const Eigen::MatrixXd& D, double lambda) {
    detail::check_training_input(D, lambda);
    Eigen::MatrixXd gram = D * D.transpose();
    gram.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    // gram is positive definite for lambda > 0
    Eigen::MatrixXd solved = llt.solve(D);  // (D D^T + lambda I)^-1 D, n x k
    ClassifierBank bank;
    bank.columns = solved.transpose();
    bank.lambda = lambda;
    return bank;
}

// Direct k x k solve of the unweighted system; ground truth for tests.
inline Eigen::VectorXd train_single_oracle(const Eigen::MatrixXd& D, Eigen::Index i, double lambda) {
    detail::check_training_input(D, lambda);
    if (i < 0 || i >= D.rows()) throw InvalidInput("ridge: row index out of range");
    Eigen::MatrixXd normal = D.transpose() * D;
    normal.diagonal().array() += lambda;
    return Eigen::LDLT<Eigen::MatrixXd>(normal).solve(D.row(i).transpose());
}

// Direct solve with the positive sample up-weighted by extra_weight, i.e.
// W = I_n with extra_weight added at diagonal position i.
inline Eigen::VectorXd train_weighted_oracle(const Eigen::MatrixXd& D, Eigen::Index i,
                                             double lambda, double extra_weight) {
    detail::check_training_input(D, lambda);
    if (i < 0 || i >= D.rows()) throw InvalidInput("ridge: row index out of range");
    if (extra_weight < 0.0) throw InvalidInput("ridge: extra weight must be non-negative");
    const Eigen::VectorXd d = D.row(i).transpose();
    Eigen::MatrixXd normal = D.transpose() * D;
    normal.noalias() += extra_weight * d * d.transpose();
    normal.diagonal().array() += lambda;
    return Eigen::LDLT<Eigen::MatrixXd>(normal).solve((1.0 + extra_weight) * d);
}

// Scale factor q with q * c_i solving the weighted system:
// q = (1 + w) / (1 + w * d^T c).
inline double weighted_scale_factor(const Eigen::VectorXd& d, const Eigen::VectorXd& c, double w) {
    if (d.size() != c.size()) throw InvalidInput("weighted_scale_factor: length mismatch");
    const double denom = 1.0 + w * d.dot(c);
    if (std::abs(denom) < 1e-12)
        throw DegenerateGeometry("weighted_scale_factor: vanishing denominator");
    return (1.0 + w) / denom;
}

inline double response(const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
    if (c.size() != d.size()) throw InvalidInput("response: length mismatch");
    return c.dot(d);
}

// Rescales a classifier so its response on its own positive descriptor is 1.
// Returns false when the own-response is too small to calibrate against.
inline bool calibrate_column(Eigen::VectorXd& c, const Eigen::VectorXd& d) {
    const double own = d.dot(c);
    if (!(own > 1e-12)) return false;
    c /= own;
    return true;
}

}  // namespace stp
