#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr::detail {

/// Standardized copy of a design plus the affine map back to the original scale.
struct Scaled {
    Eigen::MatrixXd x;
    Eigen::VectorXd center;
    Eigen::VectorXd scale;
    std::vector<bool> constant;
};

Scaled prepare(const DesignMatrix& x, bool center);

/// Values within a relative 1e-12 of the threshold map to an exact zero, so the
/// first grid point lambda_max yields the null model despite rounding.
inline double soft_threshold(double z, double g) {
    if (std::abs(z) <= g * (1.0 + 1e-12)) return 0.0;
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

/// Working state of  min (1/2n) sum w_i (z_i - b0 - x_i b)^2 + lambda |b|_1.
struct CdState {
    Eigen::VectorXd beta;
    double b0 = 0.0;
    Eigen::VectorXd resid;  ///< z - b0 - X beta
};

/// Weighted quadratic problem data for one outer iteration.
struct Quadratic {
    const Eigen::MatrixXd* x = nullptr;  ///< standardized design
    Eigen::MatrixXd xw;                  ///< columns of x scaled by w (empty when unit weights)
    Eigen::VectorXd w;                   ///< observation weights
    Eigen::VectorXd xwx;                 ///< (1/n) sum_i w_i x_ij^2
    double wsum = 0.0;
    const std::vector<bool>* constant = nullptr;
};

Quadratic unit_quadratic(const Scaled& s);
Quadratic weighted_quadratic(const Scaled& s, const Eigen::VectorXd& w);

/// Cyclic coordinate descent with an active-set inner loop. Returns the sweeps used.
int coordinate_descent(const Quadratic& q, double lambda, bool intercept, CdState& st, const SolverOptions& opt,
                       int lambda_index, int sweep_budget);

/// Coordinate descent on  min (1/2) b'Qb - c'b + lambda |b|_1  in covariance form.
/// `r` holds c - Qb and is kept current. Returns the sweeps used.
int gram_descent(const Eigen::MatrixXd& q, double lambda, const std::vector<bool>& constant, Eigen::VectorXd& beta,
                 Eigen::VectorXd& r, const SolverOptions& opt, int lambda_index, int sweep_budget);

/// Writes row i of the path from standardized coefficients.
void store_row(LassoPath& path, Index i, const Scaled& s, const Eigen::VectorXd& beta, double b0);

LassoPath empty_path(Family f, const std::vector<double>& lambdas, Index p);
void truncate_path(LassoPath& path, Index rows);
void check_grid(const std::vector<double>& lambdas);

/// Breslow risk-set bookkeeping for a fixed set of survival times.
class CoxRisk {
public:
    CoxRisk(const Eigen::VectorXd& time, const Eigen::VectorXd& status);

    /// Log partial likelihood of eta.
    double loglik(const Eigen::VectorXd& eta) const;
    /// Score d loglik / d eta and the diagonal of -d^2 loglik / d eta^2.
    double derivatives(const Eigen::VectorXd& eta, Eigen::VectorXd& grad, Eigen::VectorXd& hess_diag) const;
    /// X' H X for the full Hessian H = -d^2 loglik / d eta^2, risk-set cross terms included.
    Eigen::MatrixXd hessian_gram(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x) const;

private:
    std::vector<Index> order_;        ///< ascending time
    std::vector<Index> group_start_;  ///< tie groups in `order_`, sentinel at the end
    std::vector<double> group_fail_;
    Eigen::VectorXd status_;
};

}  // namespace pvfsr::detail
