#include <cmath>
#include <limits>
#include <numeric>

#include "pvfsr/errors.hpp"
#include "pvfsr/linalg.hpp"
#include "pvfsr/random.hpp"
#include "pvfsr/solvers.hpp"

namespace pvfsr {
namespace {

DesignMatrix take_rows(const DesignMatrix& x, const std::vector<Index>& rows) {
    DesignMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), x.p());
    for (std::size_t k = 0; k < rows.size(); ++k) out.values.row(static_cast<Index>(k)) = x.values.row(rows[k]);
    out.column_names = x.column_names;
    out.constant.assign(static_cast<std::size_t>(x.p()), false);
    return out;
}

/// Held-out deviance of every path row (summed over the held-out observations).
std::vector<double> fold_deviance(const DesignMatrix& x, const Response& y, const LassoPath& fit,
                                  const std::vector<Index>& train, const std::vector<Index>& test, std::size_t m) {
    std::vector<double> dev(m, std::numeric_limits<double>::infinity());
    const DesignMatrix xt = take_rows(x, test);
    const Response yt = y.subset(test);
    const DesignMatrix xtr = take_rows(x, train);
    const Response ytr = y.subset(train);
    for (Index i = 0; i < fit.size(); ++i) {
        const Eigen::VectorXd beta = fit.coefs.row(i).transpose();
        const double b = fit.intercepts(i);
        double d = 0.0;
        switch (y.kind) {
            case ResponseKind::continuous:
                d = ((yt.y - xt.values * beta).array() - b).matrix().squaredNorm();
                break;
            case ResponseKind::binary: {
                const Eigen::VectorXd eta = (xt.values * beta).array() + b;
                for (Index k = 0; k < yt.n(); ++k) {
                    const double e = eta(k);
                    const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
                    d += 2.0 * (log1pexp - yt.y(k) * e);
                }
                break;
            }
            case ResponseKind::survival: {
                // Grouped partial-likelihood deviance: full-data minus training log likelihood.
                const double full = cox_log_partial_likelihood(y.y, y.delta, x.values * beta);
                const double part = cox_log_partial_likelihood(ytr.y, ytr.delta, xtr.values * beta);
                d = -2.0 * (full - part);
                break;
            }
        }
        dev[static_cast<std::size_t>(i)] = d;
    }
    return dev;
}

}  // namespace

CvResult cv_select_lambda(const DesignMatrix& x, const Response& y, int k, std::uint64_t seed,
                          std::vector<double> lambdas, const SolverOptions& opt) {
    const Index n = x.n();
    if (k < 2) throw DimensionError("cv_select_lambda: need k >= 2 folds");
    if (static_cast<Index>(k) > n) throw DimensionError("cv_select_lambda: more folds than observations");
    if (n < 2 * static_cast<Index>(k) && static_cast<Index>(k) != n)
        throw DimensionError("cv_select_lambda: need n >= 2k (or k = n for leave-one-out)");
    validate_response(y, n);
    if (lambdas.empty()) lambdas = lambda_grid(x, y, 100, default_lambda_ratio(n, x.p()), opt);

    CvResult res;
    res.path = fit_path(x, y, lambdas, opt);
    const std::size_t m = static_cast<std::size_t>(res.path.size());
    if (m == 0) throw NoConvergence("full-data path is empty", 0);

    Rng rng = make_rng(seed);
    const std::vector<Index> perm = random_permutation(n, rng);
    res.fold_of.assign(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) res.fold_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        static_cast<int>(i % k);

    std::vector<std::vector<double>> per_fold;
    std::vector<double> fold_size;
    for (int f = 0; f < k; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < n; ++i) (res.fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        const DesignMatrix xtr = take_rows(x, train);
        const Response ytr = y.subset(train);
        const LassoPath fit = fit_path(xtr, ytr, res.path.lambdas, opt);
        per_fold.push_back(fold_deviance(x, y, fit, train, test, m));
        fold_size.push_back(static_cast<double>(test.size()));
    }

    res.cv_mean.assign(m, 0.0);
    res.cv_se.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double total = 0.0;
        for (const auto& d : per_fold) total += d[i];
        const double mean = total / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t f = 0; f < per_fold.size(); ++f) {
            const double r = per_fold[f][i] / fold_size[f] - mean;
            ss += r * r;
        }
        res.cv_mean[i] = mean;
        res.cv_se[i] = std::isfinite(ss) ? std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k))
                                         : std::numeric_limits<double>::infinity();
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (res.cv_mean[i] < res.cv_mean[best]) best = i;
    res.lambda_index = static_cast<Index>(best);
    res.lambda = res.path.lambdas[best];
    return res;
}

}  // namespace pvfsr
