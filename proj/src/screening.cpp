#include "pvfsr/screening.hpp"

#include "pvfsr/errors.hpp"
#include "pvfsr/linalg.hpp"
#include "pvfsr/random.hpp"

namespace pvfsr {

std::string to_string(ScreenMethod m) { return m == ScreenMethod::cv_lasso ? "cv" : "pseudo"; }

ScreenMethod screen_method_from_string(const std::string& s) {
    if (s == "cv" || s == "cv_lasso") return ScreenMethod::cv_lasso;
    if (s == "pseudo" || s == "pseudo_screen") return ScreenMethod::pseudo_screen;
    throw ParseError("unknown screening method '" + s + "' (expected cv or pseudo)");
}

Index subset_rank(const DesignMatrix& x, const IndexSet& s) {
    if (s.empty()) return 0;
    return qr_pivoted(select_columns(x.values, s)).rank;
}

ScreenResult screen_cv_lasso(const DesignMatrix& x, const Response& y, int k, std::uint64_t seed,
                             std::vector<double> lambdas, const SolverOptions& opt) {
    const CvResult cv = cv_select_lambda(x, y, k, seed, std::move(lambdas), opt);
    ScreenResult r;
    r.method = ScreenMethod::cv_lasso;
    r.lambdas = cv.path.lambdas;
    r.lambda_index = cv.lambda_index;
    r.a0_hat = cv.path.active_sets[static_cast<std::size_t>(cv.lambda_index)];
    r.r0_hat = subset_rank(x, r.a0_hat);
    return r;
}

namespace {

DesignMatrix with_permuted_copy(const DesignMatrix& x, std::uint64_t seed) {
    IndexSet all(static_cast<std::size_t>(x.p()));
    for (Index j = 0; j < x.p(); ++j) all[static_cast<std::size_t>(j)] = j;
    DesignMatrix out;
    out.values.resize(x.n(), 2 * x.p());
    out.values << x.values, permuted_copy(x, all, seed);
    out.constant.assign(static_cast<std::size_t>(2 * x.p()), false);
    for (Index j = 0; j < 2 * x.p(); ++j)
        out.column_names.push_back(j < x.p() ? x.column_names[static_cast<std::size_t>(j)]
                                             : "perm_" + x.column_names[static_cast<std::size_t>(j - x.p())]);
    return out;
}

}  // namespace

std::vector<double> screen_pseudo_replicate(const DesignMatrix& x, const Response& y,
                                            const std::vector<double>& lambdas, std::uint64_t seed,
                                            const SolverOptions& opt) {
    const DesignMatrix all = with_permuted_copy(x, seed);
    const LassoPath path = fit_path(all, y, lambdas, opt);
    std::vector<double> ratio(lambdas.size(), 0.0);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (static_cast<Index>(i) >= path.size()) {
            ratio[i] = i > 0 ? ratio[i - 1] : 0.0;
            continue;
        }
        double real = 0.0, fake = 0.0;
        for (Index j : path.active_sets[i]) (j < x.p() ? real : fake) += 1.0;
        ratio[i] = fake / std::max(real, 1.0);
    }
    return ratio;
}

ScreenResult screen_pseudo(const DesignMatrix& x, const Response& y, double alpha_n, int b,
                           std::vector<double> lambdas, std::uint64_t seed, const SolverOptions& opt) {
    if (!(alpha_n > 0.0 && alpha_n < 1.0)) throw DimensionError("screen_pseudo: alpha_n must lie in (0, 1)");
    if (b < 1) throw DimensionError("screen_pseudo: need at least one replicate");
    if (lambdas.empty()) lambdas = lambda_grid(x, y, 100, default_lambda_ratio(x.n(), 2 * x.p()), opt);

    ScreenResult r;
    r.method = ScreenMethod::pseudo_screen;
    r.lambdas = lambdas;
    r.diagnostics.assign(lambdas.size(), 0.0);
    for (int rep = 0; rep < b; ++rep) {
        const auto ratio = screen_pseudo_replicate(x, y, lambdas, derive_seed(seed, {1, static_cast<std::uint64_t>(rep)}), opt);
        for (std::size_t i = 0; i < lambdas.size(); ++i) r.diagnostics[i] += ratio[i];
    }
    for (double& v : r.diagnostics) v /= static_cast<double>(b);

    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        if (r.diagnostics[i] <= alpha_n) pick = i;
    if (!pick) {
        r.no_feasible_lambda = true;
        r.warning = "no lambda met the screening threshold; screened set is empty";
        return r;
    }
    r.lambda_index = static_cast<Index>(*pick);

    const DesignMatrix all = with_permuted_copy(x, derive_seed(seed, {2}));
    const std::vector<double> prefix(lambdas.begin(), lambdas.begin() + static_cast<std::ptrdiff_t>(*pick) + 1);
    const LassoPath path = fit_path(all, y, prefix, opt);
    if (path.size() > 0) {
        for (Index j : path.active_sets[static_cast<std::size_t>(path.size() - 1)])
            if (j < x.p()) r.a0_hat.push_back(j);
    }
    r.r0_hat = subset_rank(x, r.a0_hat);
    return r;
}

}  // namespace pvfsr
