#pragma once

// Glue between the oracle types and the library types, used by every test
// binary. Nothing here computes physics.

#include <Eigen/Dense>

#include "oracles.hpp"
#include "tsvf/algebra.hpp"

namespace testsup {

inline Eigen::VectorXcd to_eigen(const oracle::cvec& v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v[i];
    }
    return out;
}

inline oracle::cvec from_eigen(const Eigen::VectorXcd& v) {
    oracle::cvec out(static_cast<std::size_t>(v.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = v(static_cast<Eigen::Index>(i));
    }
    return out;
}

inline Eigen::MatrixXcd to_eigen(const oracle::cmat& m) {
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(m.size()),
                         static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
        }
    }
    return out;
}

inline oracle::cmat from_eigen(const Eigen::MatrixXcd& m) {
    oracle::cmat out = oracle::zeros(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
        }
    }
    return out;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace testsup
