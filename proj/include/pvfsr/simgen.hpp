#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/fsr.hpp"
#include "pvfsr/metrics.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr {

/// One simulation setting: AR(1) Gaussian design, s coefficients of size A at random positions.
struct Scenario {
    std::string name;
    Family family = Family::linear;
    Index n = 200;
    Index p = 50;
    double rho = 0.5;
    double amplitude = 1.0;
    Index sparsity = 5;
    double alpha = 0.2;
    double intercept_c = 0.0;  ///< logistic offset: P(y = 1) = 1 / (1 + exp(c - x'b))
    int n_beta_draws = 5;
    int n_datasets_per_beta = 20;
    std::uint64_t seed = 1;
};

void validate(const Scenario& sc);

enum class SimMethod { pseudo1, pseudo2 };

std::string to_string(SimMethod m);
SimMethod sim_method_from_string(const std::string& s);

struct BetaDraw {
    Eigen::VectorXd beta;
    IndexSet support;
};

BetaDraw draw_beta(Index p, Index s, double amplitude, std::uint64_t seed);

/// Rows iid N(0, C) with C_ij = rho^|i-j|, via x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j.
DesignMatrix draw_design(Index n, Index p, double rho, std::uint64_t seed);

/// Linear: x'b + N(0,1). Logistic: Bernoulli(1 / (1 + exp(c - x'b))).
/// Cox: exponential event time with rate 0.01 exp(x'b), censored by an
/// independent exponential with mean 1000.
Response draw_response(const DesignMatrix& x, const Eigen::VectorXd& beta, Family family, double intercept_c,
                       std::uint64_t seed);

struct ReplicateOutcome {
    int beta_index = 0;
    int dataset_index = 0;
    bool failed = false;
    std::string error;
    double fsr = 0.0;
    double tsr = 0.0;
    Index selected = 0;
    double censoring = 0.0;  ///< censored fraction (Cox only)
    bool degraded = false;
};

struct SimResult {
    Scenario scenario;
    SimMethod method = SimMethod::pseudo2;
    std::vector<ReplicateOutcome> per_replicate;
    double mean_fsr = 0.0, mean_tsr = 0.0, se_fsr = 0.0, se_tsr = 0.0;
    double mean_selected = 0.0;
    double mean_censoring = 0.0;
    double empty_fraction = 0.0;  ///< share of successful replicates that selected nothing
    int failures = 0;
    double seconds = 0.0;
};

/// Fills the aggregate fields from `per_replicate` (failed replicates excluded).
void aggregate(SimResult& r);

/// Nested loop over beta draws x datasets. `base` supplies B, permutation and
/// solver settings; alpha, screening method, seeds and grid are set per replicate.
SimResult run_scenario(const Scenario& sc, SimMethod method, const FsrConfig& base, unsigned threads = 1);

}  // namespace pvfsr
