#pragma once

// False-selection-rate estimation along a lasso path with pseudo-variables.
//
// Each replicate replaces the columns outside the screened set with
// pseudo-variables that share their Gram matrix with the screened block,
// optionally appends a row-permuted copy of the screened block, refits the
// path and records  U / max(I + U, 1)  where I counts selected screened
// columns and U counts selected pseudo or permuted columns.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/screening.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr {

struct FsrConfig {
    int b_replicates = 20;
    bool use_permutation = true;
    std::vector<double> alpha_targets{0.2};
    ScreenMethod screening = ScreenMethod::cv_lasso;
    int cv_folds = 10;
    double screen_alpha = 0.2;   ///< alpha_n of the permutation screen
    int screen_replicates = 20;
    std::vector<double> lambdas;  ///< empty: default grid from the full data
    int lambda_count = 100;
    std::optional<double> lambda_ratio;
    std::uint64_t seed = 1;
    SolverOptions solver;
    unsigned threads = 1;
};

void validate(const FsrConfig& cfg);

struct AlphaSelection {
    double alpha = 0.0;
    bool feasible = false;
    Index lambda_index = -1;
    double lambda = 0.0;
    IndexSet active_set;  ///< full-data fit at the selected lambda
};

struct FsrCurve {
    std::vector<double> lambdas;
    Eigen::MatrixXd per_replicate;  ///< B x m
    std::vector<double> mean;
    std::vector<AlphaSelection> selected;
    ScreenResult screening;
    /// Screening returned nothing and the estimate fell back to permuted copies of every column.
    bool degraded = false;
    LassoPath full_path;
};

/// Column layout and per-lambda selection counts of one augmented fit.
struct ReplicateTrace {
    Index screened_columns = 0;
    Index pseudo_columns = 0;
    Index permuted_columns = 0;
    std::vector<int> selected_screened;  ///< I per lambda
    std::vector<int> selected_null;      ///< U per lambda (pseudo and permuted)
    std::vector<double> p_hat;
    LassoPath path;
};

/// One replicate. With an empty screened set every column is replaced by a
/// row-permuted copy of the design.
ReplicateTrace fsr_replicate_trace(const DesignMatrix& x, const Response& y, const ScreenResult& screened,
                                   const std::vector<double>& lambdas, bool use_permutation, std::uint64_t seed,
                                   const SolverOptions& opt = {}, std::optional<Index> design_rank = std::nullopt);

std::vector<double> fsr_replicate(const DesignMatrix& x, const Response& y, const ScreenResult& screened,
                                  const std::vector<double>& lambdas, bool use_permutation, std::uint64_t seed,
                                  const SolverOptions& opt = {});

/// Smallest grid lambda whose estimated FSR is at most alpha.
AlphaSelection select_lambda(const std::vector<double>& lambdas, const std::vector<double>& fsr, double alpha);

/// Screening, B replicates and selection for every target alpha.
FsrCurve estimate_fsr(const DesignMatrix& x, const Response& y, const FsrConfig& cfg);

/// Same, with a caller-provided screening result.
FsrCurve estimate_fsr(const DesignMatrix& x, const Response& y, const FsrConfig& cfg, const ScreenResult& screened);

}  // namespace pvfsr
