#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pvfsr/errors.hpp"
#include "pvfsr/solvers.hpp"
#include "solver_detail.hpp"
#include "test_support.hpp"

using namespace pvfsr;
using pvfsr::testing::gaussian;

namespace {

DesignMatrix centered_orthonormal(Index n, Index p, std::uint64_t seed) {
    Eigen::MatrixXd g = gaussian(n, p, seed);
    g.rowwise() -= g.colwise().mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    return make_design(q * std::sqrt(static_cast<double>(n)));
}

double soft(double z, double g) { return z > g ? z - g : (z < -g ? z + g : 0.0); }

Response linear_response(const DesignMatrix& x, const Eigen::VectorXd& beta, std::uint64_t seed, double sigma = 1.0) {
    const Eigen::VectorXd eps = gaussian(x.n(), 1, seed).col(0);
    return Response::continuous(x.values * beta + sigma * eps);
}

Response logistic_response(const DesignMatrix& x, const Eigen::VectorXd& beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u;
    const Eigen::VectorXd eta = x.values * beta;
    Eigen::VectorXd y(x.n());
    for (Index i = 0; i < x.n(); ++i) y(i) = u(rng) < 1.0 / (1.0 + std::exp(-eta(i))) ? 1.0 : 0.0;
    return Response::binary(y);
}

Response cox_response(const DesignMatrix& x, const Eigen::VectorXd& beta, std::uint64_t seed, double censor_rate) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> e(1.0);
    const Eigen::VectorXd eta = x.values * beta;
    Eigen::VectorXd t(x.n()), d(x.n());
    for (Index i = 0; i < x.n(); ++i) {
        const double ti = e(rng) / std::exp(eta(i));
        const double ci = censor_rate > 0 ? e(rng) / censor_rate : std::numeric_limits<double>::infinity();
        t(i) = std::min(ti, ci);
        d(i) = ti <= ci ? 1.0 : 0.0;
    }
    return Response::survival(t, d);
}

Eigen::VectorXd sparse_beta(Index p, std::initializer_list<std::pair<Index, double>> nz) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    for (auto [j, v] : nz) b(j) = v;
    return b;
}

/// Breslow log partial likelihood by direct double loop.
double brute_cox_loglik(const Eigen::VectorXd& t, const Eigen::VectorXd& d, const Eigen::VectorXd& eta) {
    double ll = 0.0;
    for (Index i = 0; i < t.size(); ++i) {
        if (d(i) == 0.0) continue;
        double s = 0.0;
        for (Index j = 0; j < t.size(); ++j)
            if (t(j) >= t(i)) s += std::exp(eta(j));
        ll += eta(i) - std::log(s);
    }
    return ll;
}

double column_sd(const Eigen::VectorXd& c) {
    return std::sqrt((c.array() - c.mean()).square().sum() / static_cast<double>(c.size()));
}

}  // namespace

TEST_CASE("lambda_grid: response orthogonal to every column") {
    const DesignMatrix x = make_design(gaussian(30, 4, 1));
    Eigen::MatrixXd basis(30, 5);
    basis << Eigen::VectorXd::Ones(30), x.values;
    Eigen::VectorXd y = gaussian(30, 1, 2).col(0);
    y -= basis * basis.colPivHouseholderQr().solve(y);
    CHECK_THROWS_AS(lambda_grid(x, Response::continuous(y), 10, 0.01), ZeroVarianceResponse);
}

TEST_CASE("lambda_grid: log spacing") {
    const DesignMatrix x = make_design(gaussian(40, 5, 3));
    const Response y = linear_response(x, sparse_beta(5, {{0, 1.0}}), 4);
    const auto g = lambda_grid(x, y, 3, 0.01);
    REQUIRE(g.size() == 3);
    CHECK(g[1] == doctest::Approx(0.1 * g[0]).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(0.01 * g[0]).epsilon(1e-12));
    CHECK(g[0] == doctest::Approx(lambda_max(x, y)));
    CHECK_THROWS_AS(lambda_grid(x, y, 1, 0.01), DimensionError);
    CHECK_THROWS_AS(lambda_grid(x, y, 5, 1.0), DimensionError);
}

TEST_CASE("first grid point gives the null model in every family") {
    const DesignMatrix x = make_design(gaussian(60, 6, 5));
    const Eigen::VectorXd beta = sparse_beta(6, {{0, 1.0}, {3, -0.7}});
    const Response ys[] = {linear_response(x, beta, 6), logistic_response(x, beta, 7), cox_response(x, beta, 8, 0.3)};
    for (const Response& y : ys) {
        const auto grid = lambda_grid(x, y, 10, 0.05);
        const LassoPath path = fit_path(x, y, grid);
        CHECK(path.coefs.row(0).cwiseAbs().maxCoeff() == 0.0);
        CHECK(path.active_sets[0].empty());
        CHECK(path.active_sets.back().size() > 0);
    }
}

TEST_CASE("linear lasso: orthonormal design matches soft thresholding") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const DesignMatrix x = centered_orthonormal(50, 6, seed);
        const Response y = linear_response(x, sparse_beta(6, {{0, 1.5}, {2, -0.5}}), 100 + seed);
        const auto grid = lambda_grid(x, y, 20, 0.01);
        const LassoPath path = fit_linear_path(x, y, grid);
        const Eigen::VectorXd z = x.values.transpose() * y.y / 50.0;
        for (Index i = 0; i < path.size(); ++i)
            for (Index j = 0; j < 6; ++j) CHECK(std::abs(path.coefs(i, j) - soft(z(j), grid[i])) < 1e-6);
    }
}

TEST_CASE("linear lasso: p = 2 agrees with a brute-force grid search") {
    // Unit-RMS columns without an intercept keep the penalty on the raw scale.
    Eigen::MatrixXd m = gaussian(40, 2, 9);
    m.col(1) = 0.6 * m.col(0) + 0.8 * m.col(1);
    for (Index j = 0; j < 2; ++j) m.col(j) /= std::sqrt(m.col(j).squaredNorm() / 40.0);
    const DesignMatrix x = make_design(m);
    const Response y = linear_response(x, sparse_beta(2, {{0, 1.2}, {1, -0.8}}), 10, 0.5);
    SolverOptions opt;
    opt.intercept = false;
    const auto grid = lambda_grid(x, y, 40, 0.01, opt);
    const LassoPath path = fit_linear_path(x, y, grid, opt);

    const double n = 40.0;
    const Eigen::Matrix2d g = m.transpose() * m / n;
    const Eigen::Vector2d c = m.transpose() * y.y / n;
    const double yy = y.y.squaredNorm() / n;
    for (Index i : {Index{5}, Index{15}, Index{30}}) {
        const double lam = grid[static_cast<std::size_t>(i)];
        auto obj = [&](double b1, double b2) {
            const Eigen::Vector2d b(b1, b2);
            return 0.5 * (yy - 2.0 * c.dot(b) + b.dot(g * b)) + lam * (std::abs(b1) + std::abs(b2));
        };
        double best = std::numeric_limits<double>::infinity();
        for (int a = -3000; a <= 3000; ++a)
            for (int b = -3000; b <= 3000; ++b) best = std::min(best, obj(a * 1e-3, b * 1e-3));
        const double got = obj(path.coefs(i, 0), path.coefs(i, 1));
        CHECK(got <= best + 1e-12);
        CHECK(std::abs(got - best) < 2e-3);
    }
}

TEST_CASE("linear lasso: lambda at or above lambda_max gives zero") {
    const DesignMatrix x = make_design(gaussian(30, 5, 12));
    const Response y = linear_response(x, sparse_beta(5, {{1, 2.0}}), 13);
    const double lmax = lambda_max(x, y);
    const LassoPath path = fit_linear_path(x, y, {3.0 * lmax, lmax});
    CHECK(path.coefs.cwiseAbs().maxCoeff() == 0.0);
    CHECK(path.intercepts(0) == doctest::Approx(y.y.mean()));
}

TEST_CASE("linear lasso: objective never increases between sweeps") {
    const DesignMatrix x = make_design(gaussian(80, 15, 14));
    const Response y = linear_response(x, sparse_beta(15, {{0, 1.0}, {4, 1.0}, {9, -1.0}}), 15);
    std::vector<double> trace;
    SolverOptions opt;
    opt.sweep_monitor = [&](double f) { trace.push_back(f); };
    const double lmax = lambda_max(x, y);
    fit_linear_path(x, y, {0.05 * lmax}, opt);
    REQUIRE(trace.size() > 3);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-14);
}

TEST_CASE("linear lasso: sweep budget exhaustion reports the lambda index") {
    const DesignMatrix x = make_design(gaussian(80, 15, 16));
    const Response y = linear_response(x, sparse_beta(15, {{0, 1.0}, {1, 1.0}}), 17);
    SolverOptions opt;
    opt.max_iter = 1;
    const auto grid = lambda_grid(x, y, 5, 0.01);
    try {
        fit_linear_path(x, y, grid, opt);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK(e.lambda_index() >= 1);
    }
}

TEST_CASE("solvers: KKT conditions along the path for all families") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const DesignMatrix x = make_design(gaussian(70, 12, 200 + seed));
        const Eigen::VectorXd beta = sparse_beta(12, {{0, 1.0}, {5, -1.0}, {7, 0.5}});
        const Response ys[] = {linear_response(x, beta, 300 + seed), logistic_response(x, beta, 400 + seed),
                               cox_response(x, beta, 500 + seed, 0.3)};
        for (const Response& y : ys) {
            const LassoPath path = fit_path(x, y, lambda_grid(x, y, 30, 0.01));
            for (double v : kkt_violations(x, y, path)) CHECK(v <= 1e-4);
        }
    }
}

TEST_CASE("solvers: warm start agrees with a cold fit") {
    const DesignMatrix x = make_design(gaussian(60, 10, 21));
    const Eigen::VectorXd beta = sparse_beta(10, {{0, 1.0}, {3, -0.8}});
    const Response ys[] = {linear_response(x, beta, 22), logistic_response(x, beta, 23), cox_response(x, beta, 24, 0.2)};
    for (const Response& y : ys) {
        const auto grid = lambda_grid(x, y, 40, 0.01);
        const LassoPath path = fit_path(x, y, grid);
        for (std::size_t i : {3u, 11u, 19u, 27u, 35u}) {
            if (static_cast<Index>(i) >= path.size()) continue;
            const LassoPath cold = fit_path(x, y, {grid[i]});
            CHECK((cold.coefs.row(0) - path.coefs.row(static_cast<Index>(i))).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("linear lasso: path continuity improves with a finer grid") {
    const DesignMatrix x = make_design(gaussian(100, 8, 25));
    const Response y = linear_response(x, sparse_beta(8, {{0, 1.0}, {2, 0.5}, {6, -0.7}}), 26);
    auto max_step = [&](int m) {
        const LassoPath path = fit_linear_path(x, y, lambda_grid(x, y, m, 0.01));
        double worst = 0.0;
        for (Index i = 0; i + 1 < path.size(); ++i)
            worst = std::max(worst, (path.coefs.row(i) - path.coefs.row(i + 1)).cwiseAbs().maxCoeff());
        return worst;
    };
    CHECK(max_step(200) < 0.75 * max_step(100));
}

TEST_CASE("linear lasso: no-intercept option leaves the intercept at zero") {
    const DesignMatrix x = make_design(gaussian(50, 4, 27));
    const Response y = linear_response(x, sparse_beta(4, {{0, 1.0}}), 28);
    SolverOptions opt;
    opt.intercept = false;
    const LassoPath path = fit_linear_path(x, y, lambda_grid(x, y, 10, 0.01, opt), opt);
    CHECK(path.intercepts.cwiseAbs().maxCoeff() == 0.0);
    for (double v : kkt_violations(x, y, path, opt)) CHECK(v <= 1e-4);
}

TEST_CASE("logistic lasso: null model above lambda_max") {
    const DesignMatrix x = make_design(gaussian(80, 5, 30));
    const Response y = logistic_response(x, sparse_beta(5, {{0, 1.0}}), 31);
    const double lmax = lambda_max(x, y);
    const LassoPath path = fit_logistic_path(x, y, {10.0 * lmax, 2.0 * lmax});
    const double ybar = y.y.mean();
    CHECK(path.coefs.cwiseAbs().maxCoeff() == 0.0);
    CHECK(path.intercepts(0) == doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-9));
}

TEST_CASE("logistic lasso: pure noise stays empty above the noise level") {
    // Under the null each standardized score is roughly N(0, 1/(4n)); with p = 10
    // the chance any exceeds 3.2 standard deviations is about 1.4%.
    const Index n = 100, p = 10;
    const double level = 3.2 * 0.5 / std::sqrt(static_cast<double>(n));
    int empty = 0, total = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const DesignMatrix x = make_design(gaussian(n, p, 1000 + seed));
        Eigen::VectorXd yv(n);
        for (Index i = 0; i < n; ++i) yv(i) = i < n / 2 ? 1.0 : 0.0;
        std::mt19937_64 rng(2000 + seed);
        std::shuffle(yv.data(), yv.data() + n, rng);
        const Response y = Response::binary(yv);
        const LassoPath path = fit_logistic_path(x, y, {4.0 * level, 2.0 * level, level});
        empty += path.active_sets.back().empty();
        ++total;
    }
    CHECK(empty >= 0.95 * total);
}

TEST_CASE("logistic lasso: sign follows the score at zero") {
    const DesignMatrix x = make_design(gaussian(100, 1, 32));
    const Response y = logistic_response(x, sparse_beta(1, {{0, -2.0}}), 33);
    const double score = x.values.col(0).dot(y.y.array().matrix() - Eigen::VectorXd::Constant(100, y.y.mean()));
    const double lmax = lambda_max(x, y);
    const LassoPath path = fit_logistic_path(x, y, {lmax, 0.5 * lmax, 0.1 * lmax});
    CHECK(path.coefs(2, 0) != 0.0);
    CHECK((path.coefs(2, 0) > 0) == (score > 0));
}

TEST_CASE("logistic lasso: separable data truncates the path") {
    Eigen::MatrixXd m = gaussian(40, 2, 34);
    Eigen::VectorXd y(40);
    for (Index i = 0; i < 40; ++i) y(i) = m(i, 0) > 0 ? 1.0 : 0.0;
    const DesignMatrix x = make_design(m);
    const Response r = Response::binary(y);
    const LassoPath path = fit_logistic_path(x, r, lambda_grid(x, r, 50, 1e-4));
    CHECK(path.status == PathStatus::separation);
    CHECK(path.size() < 50);
    CHECK(!path.warning.empty());
    CHECK(static_cast<Index>(path.lambdas.size()) == path.coefs.rows());
}

TEST_CASE("cox Hessian gram matches finite differences of the score") {
    const DesignMatrix x = make_design(gaussian(25, 4, 71));
    const Response r = cox_response(x, sparse_beta(4, {{0, 0.7}, {2, -0.4}}), 72, 0.3);
    const detail::CoxRisk risk(r.y, r.delta);
    const Eigen::VectorXd b0 = sparse_beta(4, {{0, 0.3}, {1, -0.2}, {3, 0.1}});
    auto score = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd g, h;
        risk.derivatives(x.values * b, g, h);
        return Eigen::VectorXd(x.values.transpose() * g);
    };
    const Eigen::MatrixXd h = risk.hessian_gram(x.values * b0, x.values);
    const double step = 1e-6;
    for (Index j = 0; j < 4; ++j) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(4, j) * step;
        const Eigen::VectorXd col = -(score(b0 + e) - score(b0 - e)) / (2 * step);
        CHECK((h.col(j) - col).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("cox lasso: p > n path converges and satisfies KKT") {
    const DesignMatrix x = make_design(gaussian(40, 55, 73));
    const Response r = cox_response(x, sparse_beta(55, {{0, 0.8}, {1, 0.8}, {2, 0.8}}), 74, 0.3);
    SolverOptions opt;
    opt.max_iter = 20000;
    const LassoPath path = fit_cox_path(x, r, lambda_grid(x, r, 50, 1e-2), opt);
    CHECK(path.size() > 20);
    for (double v : kkt_violations(x, r, path, opt)) CHECK(v <= 1e-4);
}

TEST_CASE("response validation") {
    const DesignMatrix x = make_design(gaussian(10, 2, 35));
    CHECK_THROWS_AS(fit_logistic_path(x, Response::binary(Eigen::VectorXd::Ones(10)), {1.0}), InvalidResponse);
    Eigen::VectorXd half = Eigen::VectorXd::Zero(10);
    half(0) = 0.5;
    half(1) = 1.0;
    CHECK_THROWS_AS(fit_logistic_path(x, Response::binary(half), {1.0}), InvalidResponse);
    CHECK_THROWS_AS(fit_cox_path(x, Response::survival(Eigen::VectorXd::Ones(10), Eigen::VectorXd::Zero(10)), {1.0}),
                    AllCensored);
    CHECK_THROWS_AS(fit_linear_path(x, Response::continuous(Eigen::VectorXd::Ones(9)), {1.0}), DimensionError);
    CHECK_THROWS_AS(fit_linear_path(x, Response::continuous(Eigen::VectorXd::Ones(10)), {1.0, 2.0}),
                    DimensionError);
}

TEST_CASE("Cox lasso: null model above lambda_max") {
    const DesignMatrix x = make_design(gaussian(50, 4, 36));
    const Response y = cox_response(x, sparse_beta(4, {{0, 1.0}}), 37, 0.2);
    const double lmax = lambda_max(x, y);
    const LassoPath path = fit_cox_path(x, y, {5.0 * lmax, lmax});
    CHECK(path.coefs.cwiseAbs().maxCoeff() == 0.0);
    CHECK(path.intercepts.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Cox lasso: sign follows the score at zero") {
    const DesignMatrix x = make_design(gaussian(60, 1, 38));
    const Response y = cox_response(x, sparse_beta(1, {{0, 1.5}}), 39, 0.0);
    CHECK(y.delta.sum() == 60.0);
    // Score at zero: sum over failures of x_i minus the risk-set mean.
    double score = 0.0;
    for (Index i = 0; i < 60; ++i) {
        double s = 0.0, c = 0.0;
        for (Index j = 0; j < 60; ++j)
            if (y.y(j) >= y.y(i)) s += x.values(j, 0), c += 1.0;
        score += x.values(i, 0) - s / c;
    }
    const double lmax = lambda_max(x, y);
    const LassoPath path = fit_cox_path(x, y, {lmax, 0.3 * lmax});
    CHECK(path.coefs(1, 0) != 0.0);
    CHECK((path.coefs(1, 0) > 0) == (score > 0));
}

TEST_CASE("Cox lasso: brute-force partial likelihood grid") {
    const Index n = 30;
    const DesignMatrix x = make_design(gaussian(n, 2, 40));
    const Response y = cox_response(x, sparse_beta(2, {{0, 0.8}, {1, -0.4}}), 41, 0.3);
    const double s0 = column_sd(x.values.col(0)), s1 = column_sd(x.values.col(1));
    const double lmax = lambda_max(x, y);
    for (double frac : {0.5, 0.2, 0.05}) {
        const double lam = frac * lmax;
        auto obj = [&](double b0, double b1) {
            const Eigen::VectorXd eta = x.values * Eigen::Vector2d(b0, b1);
            return -brute_cox_loglik(y.y, y.delta, eta) / n + lam * (s0 * std::abs(b0) + s1 * std::abs(b1));
        };
        double best = std::numeric_limits<double>::infinity();
        for (int a = -100; a <= 100; ++a)
            for (int b = -100; b <= 100; ++b) best = std::min(best, obj(a * 0.02, b * 0.02));
        const LassoPath path = fit_cox_path(x, y, {lmax, lam});
        CHECK(obj(path.coefs(1, 0), path.coefs(1, 1)) <= best + 1e-10);
    }
}

TEST_CASE("Cox partial likelihood handles ties with the Breslow risk set") {
    Eigen::VectorXd t(5), d(5), eta(5);
    t << 1, 2, 2, 3, 4;
    d << 1, 1, 1, 0, 1;
    eta << 0.1, -0.3, 0.5, 0.0, 0.2;
    CHECK(cox_log_partial_likelihood(t, d, eta) == doctest::Approx(brute_cox_loglik(t, d, eta)).epsilon(1e-12));
}

TEST_CASE("cv_select_lambda: pure noise favors heavy penalties") {
    int top = 0;
    const int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        const DesignMatrix x = make_design(gaussian(100, 10, 3000 + s));
        const Response y = Response::continuous(gaussian(100, 1, 4000 + s).col(0));
        const CvResult cv = cv_select_lambda(x, y, 10, 5000 + s);
        top += cv.lambda_index < 25;
    }
    CHECK(top >= 0.8 * seeds);
}

TEST_CASE("cv_select_lambda: deterministic under a fixed seed") {
    const DesignMatrix x = make_design(gaussian(60, 6, 50));
    const Response y = linear_response(x, sparse_beta(6, {{0, 1.0}}), 51);
    const CvResult a = cv_select_lambda(x, y, 5, 52);
    const CvResult b = cv_select_lambda(x, y, 5, 52);
    CHECK(a.fold_of == b.fold_of);
    CHECK(a.cv_mean == b.cv_mean);
    CHECK(a.lambda == b.lambda);
    const CvResult c = cv_select_lambda(x, y, 5, 53);
    CHECK(a.fold_of != c.fold_of);
    for (int f = 0; f < 5; ++f) CHECK(std::count(a.fold_of.begin(), a.fold_of.end(), f) == 12);
}

TEST_CASE("cv_select_lambda: leave-one-out and argument checks") {
    const DesignMatrix x = make_design(gaussian(20, 3, 54));
    const Response y = linear_response(x, sparse_beta(3, {{0, 1.0}}), 55);
    const CvResult cv = cv_select_lambda(x, y, 20, 56);
    CHECK(std::find(cv.path.lambdas.begin(), cv.path.lambdas.end(), cv.lambda) != cv.path.lambdas.end());
    CHECK_THROWS_AS(cv_select_lambda(x, y, 1, 1), DimensionError);
    CHECK_THROWS_AS(cv_select_lambda(x, y, 15, 1), DimensionError);
}

TEST_CASE("cv_select_lambda: logistic and Cox deviances") {
    const DesignMatrix x = make_design(gaussian(80, 5, 57));
    const Eigen::VectorXd beta = sparse_beta(5, {{0, 1.5}, {1, -1.0}});
    const CvResult lg = cv_select_lambda(x, logistic_response(x, beta, 58), 5, 59);
    const CvResult cx = cv_select_lambda(x, cox_response(x, beta, 60, 0.2), 5, 61);
    for (const CvResult* r : {&lg, &cx}) {
        CHECK(r->lambda_index > 0);
        const auto& act = r->path.active_sets[static_cast<std::size_t>(r->lambda_index)];
        CHECK(std::find(act.begin(), act.end(), Index{0}) != act.end());
    }
}
