#pragma once

// Test-only helpers. Nothing here calls into the code under test beyond
// building inputs, so the checks stay independent of the implementation.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "pvfsr/design.hpp"

namespace pvfsr::testing {

inline Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = z(rng);
    return m;
}

/// Classical Gram-Schmidt with one re-orthogonalization pass.
struct GramSchmidt {
    Eigen::MatrixXd q;
    Eigen::MatrixXd r;
};

inline GramSchmidt gram_schmidt(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows(), p = a.cols();
    GramSchmidt out{Eigen::MatrixXd::Zero(n, p), Eigen::MatrixXd::Zero(p, p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        Eigen::VectorXd v = a.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < j; ++k) {
                const double c = out.q.col(k).dot(v);
                out.r(k, j) += c;
                v -= c * out.q.col(k);
            }
        }
        out.r(j, j) = v.norm();
        out.q.col(j) = v / out.r(j, j);
    }
    return out;
}

/// max |(1/n) A^T A - (1/n) B^T B|, computed entry by entry.
inline double gram_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double n = static_cast<double>(a.rows());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            double ga = 0.0, gb = 0.0;
            for (Eigen::Index k = 0; k < a.rows(); ++k) {
                ga += a(k, i) * a(k, j);
                gb += b(k, i) * b(k, j);
            }
            worst = std::max(worst, std::abs(ga - gb) / n);
        }
    return worst;
}

}  // namespace pvfsr::testing
