#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr {

enum class ScreenMethod { pseudo_screen, cv_lasso };

std::string to_string(ScreenMethod m);
ScreenMethod screen_method_from_string(const std::string& s);

/// Preliminary estimate of the support and how it was obtained.
struct ScreenResult {
    ScreenMethod method = ScreenMethod::cv_lasso;
    IndexSet a0_hat;
    Index r0_hat = 0;                      ///< rank of the screened columns
    std::vector<double> lambdas;           ///< grid the screen was run on
    std::optional<Index> lambda_index;     ///< selected grid point
    std::vector<double> diagnostics;       ///< mean pseudo/real ratio per lambda (pseudo_screen only)
    bool no_feasible_lambda = false;
    std::string warning;
};

/// Support of the full-data lasso at the cross-validated lambda.
ScreenResult screen_cv_lasso(const DesignMatrix& x, const Response& y, int k, std::uint64_t seed,
                             std::vector<double> lambdas = {}, const SolverOptions& opt = {});

/// Permutation-based screen: each replicate appends a row-permuted copy of the
/// whole design, tracks #permuted / max(#real, 1) along the path and averages
/// over `b` replicates; the smallest lambda whose average is at most `alpha_n`
/// is refit on a fresh augmented design and its real columns are kept.
ScreenResult screen_pseudo(const DesignMatrix& x, const Response& y, double alpha_n, int b,
                           std::vector<double> lambdas, std::uint64_t seed, const SolverOptions& opt = {});

/// Per-lambda ratio for one replicate of `screen_pseudo` (exposed for testing).
std::vector<double> screen_pseudo_replicate(const DesignMatrix& x, const Response& y,
                                            const std::vector<double>& lambdas, std::uint64_t seed,
                                            const SolverOptions& opt = {});

/// Rank of the columns in `s` (0 for the empty set).
Index subset_rank(const DesignMatrix& x, const IndexSet& s);

}  // namespace pvfsr
