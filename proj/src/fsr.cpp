#include "pvfsr/fsr.hpp"

#include <algorithm>

#include "pvfsr/errors.hpp"
#include "pvfsr/linalg.hpp"
#include "pvfsr/parallel.hpp"
#include "pvfsr/random.hpp"

namespace pvfsr {

void validate(const FsrConfig& cfg) {
    if (cfg.b_replicates < 1) throw DimensionError("B must be at least 1");
    for (double a : cfg.alpha_targets)
        if (!(a > 0.0 && a < 1.0)) throw DimensionError("every alpha must lie in (0, 1)");
    if (cfg.lambda_count < 2 && cfg.lambdas.empty()) throw DimensionError("lambda_count must be at least 2");
}

namespace {

/// Columns are centered whenever the model is invariant to column shifts.
bool location_invariant(const Response& y, const SolverOptions& opt) {
    return y.kind == ResponseKind::survival || opt.intercept;
}

}  // namespace

ReplicateTrace fsr_replicate_trace(const DesignMatrix& x, const Response& y, const ScreenResult& screened,
                                   const std::vector<double>& lambdas, bool use_permutation, std::uint64_t seed,
                                   const SolverOptions& opt, std::optional<Index> design_rank_hint) {
    const bool anchor = location_invariant(y, opt);
    const DesignMatrix xs = standardize(x, anchor).design;
    const IndexSet& s = screened.a0_hat;
    check_index_set(s, x.p());

    ReplicateTrace t;
    Eigen::MatrixXd aug;
    if (s.empty()) {
        IndexSet all(static_cast<std::size_t>(x.p()));
        for (Index j = 0; j < x.p(); ++j) all[static_cast<std::size_t>(j)] = j;
        aug = permuted_copy(xs, all, derive_seed(seed, {0}));
        t.pseudo_columns = x.p();
    } else {
        const Eigen::MatrixXd block = select_columns(xs.values, s);
        Eigen::MatrixXd pseudo(x.n(), 0);
        if (static_cast<Index>(s.size()) < x.p()) {
            PseudoOptions po;
            po.constant_anchor = anchor;
            po.design_rank = design_rank_hint;
            pseudo = generate_pseudo(xs, s, derive_seed(seed, {0}), po).values;
        }
        Eigen::MatrixXd perm(x.n(), 0);
        if (use_permutation) perm = permuted_copy(xs, s, derive_seed(seed, {1}));
        t.screened_columns = block.cols();
        t.pseudo_columns = pseudo.cols();
        t.permuted_columns = perm.cols();
        aug.resize(x.n(), block.cols() + pseudo.cols() + perm.cols());
        aug << block, pseudo, perm;
    }

    DesignMatrix xa;
    xa.values = std::move(aug);
    xa.constant.assign(static_cast<std::size_t>(xa.values.cols()), false);
    t.path = fit_path(xa, y, lambdas, opt);

    const std::size_t m = lambdas.size();
    t.selected_screened.assign(m, 0);
    t.selected_null.assign(m, 0);
    t.p_hat.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<Index>(i) >= t.path.size()) {
            // Truncated fit: hold the last estimate.
            if (i > 0) {
                t.selected_screened[i] = t.selected_screened[i - 1];
                t.selected_null[i] = t.selected_null[i - 1];
                t.p_hat[i] = t.p_hat[i - 1];
            }
            continue;
        }
        int in = 0, un = 0;
        for (Index j : t.path.active_sets[i]) (j < t.screened_columns ? in : un) += 1;
        t.selected_screened[i] = in;
        t.selected_null[i] = un;
        t.p_hat[i] = static_cast<double>(un) / static_cast<double>(std::max(in + un, 1));
    }
    return t;
}

std::vector<double> fsr_replicate(const DesignMatrix& x, const Response& y, const ScreenResult& screened,
                                  const std::vector<double>& lambdas, bool use_permutation, std::uint64_t seed,
                                  const SolverOptions& opt) {
    return fsr_replicate_trace(x, y, screened, lambdas, use_permutation, seed, opt).p_hat;
}

AlphaSelection select_lambda(const std::vector<double>& lambdas, const std::vector<double>& fsr, double alpha) {
    AlphaSelection sel;
    sel.alpha = alpha;
    for (std::size_t i = 0; i < std::min(lambdas.size(), fsr.size()); ++i) {
        if (fsr[i] <= alpha && (!sel.feasible || lambdas[i] < sel.lambda)) {
            sel.feasible = true;
            sel.lambda_index = static_cast<Index>(i);
            sel.lambda = lambdas[i];
        }
    }
    return sel;
}

FsrCurve estimate_fsr(const DesignMatrix& x, const Response& y, const FsrConfig& cfg) {
    validate(cfg);
    validate_response(y, x.n());
    std::vector<double> grid = cfg.lambdas;
    if (grid.empty())
        grid = lambda_grid(x, y, cfg.lambda_count, cfg.lambda_ratio.value_or(default_lambda_ratio(x.n(), x.p())),
                           cfg.solver);
    const std::uint64_t screen_seed = derive_seed(cfg.seed, {0});
    const ScreenResult screened =
        cfg.screening == ScreenMethod::cv_lasso
            ? screen_cv_lasso(x, y, cfg.cv_folds, screen_seed, grid, cfg.solver)
            : screen_pseudo(x, y, cfg.screen_alpha, cfg.screen_replicates, grid, screen_seed, cfg.solver);
    return estimate_fsr(x, y, cfg, screened);
}

FsrCurve estimate_fsr(const DesignMatrix& x, const Response& y, const FsrConfig& cfg, const ScreenResult& screened) {
    validate(cfg);
    validate_response(y, x.n());
    FsrCurve curve;
    curve.screening = screened;
    curve.degraded = screened.a0_hat.empty();

    std::vector<double> grid = cfg.lambdas;
    if (grid.empty())
        grid = lambda_grid(x, y, cfg.lambda_count, cfg.lambda_ratio.value_or(default_lambda_ratio(x.n(), x.p())),
                           cfg.solver);
    curve.full_path = fit_path(x, y, grid, cfg.solver);
    // Labels follow the displayed full-data path, so a truncated fit shortens the grid.
    curve.lambdas = curve.full_path.lambdas;
    const std::size_t m = curve.lambdas.size();

    std::optional<Index> rank;
    if (!screened.a0_hat.empty())
        rank = design_rank(standardize(x, location_invariant(y, cfg.solver)).design,
                           location_invariant(y, cfg.solver));

    const int b = cfg.b_replicates;
    curve.per_replicate = Eigen::MatrixXd::Zero(b, static_cast<Index>(m));
    parallel_for(static_cast<std::size_t>(b), cfg.threads, [&](std::size_t rep) {
        const std::uint64_t seed = derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(rep)});
        const ReplicateTrace t =
            fsr_replicate_trace(x, y, screened, curve.lambdas, cfg.use_permutation, seed, cfg.solver, rank);
        for (std::size_t i = 0; i < m; ++i) curve.per_replicate(static_cast<Index>(rep), static_cast<Index>(i)) = t.p_hat[i];
    });

    curve.mean.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (int rep = 0; rep < b; ++rep) s += curve.per_replicate(rep, static_cast<Index>(i));
        curve.mean[i] = s / static_cast<double>(b);
    }

    for (double alpha : cfg.alpha_targets) {
        AlphaSelection sel = select_lambda(curve.lambdas, curve.mean, alpha);
        if (sel.feasible) sel.active_set = curve.full_path.active_sets[static_cast<std::size_t>(sel.lambda_index)];
        curve.selected.push_back(std::move(sel));
    }
    return curve;
}

}  // namespace pvfsr
