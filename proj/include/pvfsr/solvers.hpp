#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pvfsr/design.hpp"

namespace pvfsr {

enum class Family { linear, logistic, cox };
enum class ResponseKind { continuous, binary, survival };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

/// Outcome vector. `delta` is only used for survival data (1 = failure, 0 = censored).
struct Response {
    ResponseKind kind = ResponseKind::continuous;
    Eigen::VectorXd y;
    Eigen::VectorXd delta;

    static Response continuous(Eigen::VectorXd y);
    static Response binary(Eigen::VectorXd y);
    static Response survival(Eigen::VectorXd time, Eigen::VectorXd status);

    Index n() const { return y.size(); }
    Family family() const;
    /// Rows `rows` only.
    Response subset(const std::vector<Index>& rows) const;
};

/// Throws InvalidResponse / AllCensored when the response violates its kind's invariants.
void validate_response(const Response& y, Index n);

struct SolverOptions {
    bool intercept = true;   ///< ignored for Cox, which never has one
    double tol = 1e-7;       ///< max standardized coefficient change between sweeps
    int max_iter = 100000;   ///< coordinate-descent sweeps per lambda
    double kkt_tol = 1e-4;
    /// Called after every sweep with the value of the quadratic objective being
    /// minimized (the exact objective for the linear family).
    std::function<void(double)> sweep_monitor;
};

enum class PathStatus { complete, separation };

/// Solution path on a decreasing lambda grid. Coefficients are on the original
/// column scale; the penalty acts on the standardized scale.
struct LassoPath {
    Family family = Family::linear;
    std::vector<double> lambdas;
    Eigen::MatrixXd coefs;        ///< m x p
    Eigen::VectorXd intercepts;   ///< m (zeros for Cox)
    std::vector<IndexSet> active_sets;
    PathStatus status = PathStatus::complete;
    std::string warning;

    Index size() const { return static_cast<Index>(lambdas.size()); }
};

/// max_j |(1/n) <x_j, null-model working residual>| on the standardized scale.
double lambda_max(const DesignMatrix& x, const Response& y, const SolverOptions& opt = {});

/// Glmnet-style default ratio: 1e-3 when n > p, 1e-2 otherwise.
double default_lambda_ratio(Index n, Index p);

/// m log-equispaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(const DesignMatrix& x, const Response& y, int m, double ratio,
                                const SolverOptions& opt = {});

LassoPath fit_linear_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                          const SolverOptions& opt = {});
LassoPath fit_logistic_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                            const SolverOptions& opt = {});
LassoPath fit_cox_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                       const SolverOptions& opt = {});

/// Dispatch on the response kind.
LassoPath fit_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                   const SolverOptions& opt = {});

/// Penalized objective of one coefficient vector (original scale), penalty on standardized coefficients.
double penalized_objective(const DesignMatrix& x, const Response& y, const Eigen::VectorXd& beta, double intercept,
                           double lambda, const SolverOptions& opt = {});

/// Largest KKT violation at each path row, recomputed from the data alone.
std::vector<double> kkt_violations(const DesignMatrix& x, const Response& y, const LassoPath& path,
                                   const SolverOptions& opt = {});

/// Log partial likelihood (Breslow) of linear predictor `eta`.
double cox_log_partial_likelihood(const Eigen::VectorXd& time, const Eigen::VectorXd& status,
                                  const Eigen::VectorXd& eta);

struct CvResult {
    Index lambda_index = 0;
    double lambda = 0.0;
    std::vector<double> cv_mean;   ///< per-observation deviance
    std::vector<double> cv_se;
    std::vector<int> fold_of;      ///< fold label of every row
    LassoPath path;                ///< full-data fit on the same grid
};

/// K-fold CV; folds assigned by a seeded shuffle. Ties in mean deviance go to the larger lambda.
/// An empty `lambdas` uses the default grid.
CvResult cv_select_lambda(const DesignMatrix& x, const Response& y, int k, std::uint64_t seed,
                          std::vector<double> lambdas = {}, const SolverOptions& opt = {});

}  // namespace pvfsr
