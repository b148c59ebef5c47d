#include <algorithm>
#include <cmath>
#include <numeric>

#include "pvfsr/errors.hpp"
#include "solver_detail.hpp"

namespace pvfsr::detail {

Scaled prepare(const DesignMatrix& x, bool center) {
    auto st = standardize(x, center);
    return Scaled{std::move(st.design.values), std::move(st.center), std::move(st.scale),
                  std::move(st.design.constant)};
}

Quadratic unit_quadratic(const Scaled& s) {
    Quadratic q;
    q.x = &s.x;
    q.constant = &s.constant;
    const Index n = s.x.rows();
    q.w = Eigen::VectorXd::Ones(n);
    q.wsum = static_cast<double>(n);
    q.xwx = s.x.colwise().squaredNorm().transpose() / static_cast<double>(n);
    return q;
}

Quadratic weighted_quadratic(const Scaled& s, const Eigen::VectorXd& w) {
    Quadratic q;
    q.x = &s.x;
    q.constant = &s.constant;
    const Index n = s.x.rows();
    q.w = w;
    q.wsum = w.sum();
    q.xw = w.asDiagonal() * s.x;
    q.xwx = (q.xw.cwiseProduct(s.x)).colwise().sum().transpose() / static_cast<double>(n);
    return q;
}

namespace {

double sweep(const Quadratic& q, double lambda, bool intercept, CdState& st, const std::vector<Index>* subset) {
    const Eigen::MatrixXd& x = *q.x;
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    const bool weighted = q.xw.size() > 0;
    double dmax = 0.0;
    auto update = [&](Index j) {
        if ((*q.constant)[static_cast<std::size_t>(j)] || q.xwx(j) <= 0.0) return;
        const double g = (weighted ? q.xw.col(j).dot(st.resid) : x.col(j).dot(st.resid)) * inv_n;
        const double old = st.beta(j);
        const double upd = soft_threshold(g + q.xwx(j) * old, lambda) / q.xwx(j);
        if (upd != old) {
            st.resid.noalias() -= (upd - old) * x.col(j);
            dmax = std::max(dmax, std::abs(upd - old));
            st.beta(j) = upd;
        }
    };
    if (subset) {
        for (Index j : *subset) update(j);
    } else {
        for (Index j = 0; j < x.cols(); ++j) update(j);
    }
    if (intercept && q.wsum > 0.0) {
        const double delta = q.w.dot(st.resid) / q.wsum;
        if (delta != 0.0) {
            st.b0 += delta;
            st.resid.array() -= delta;
            dmax = std::max(dmax, std::abs(delta));
        }
    }
    return dmax;
}

}  // namespace

int coordinate_descent(const Quadratic& q, double lambda, bool intercept, CdState& st, const SolverOptions& opt,
                       int lambda_index, int sweep_budget) {
    int sweeps = 0;
    std::vector<Index> active;
    auto report = [&] {
        if (!opt.sweep_monitor) return;
        const double n = static_cast<double>(st.resid.size());
        opt.sweep_monitor(0.5 * q.w.dot(st.resid.cwiseAbs2()) / n + lambda * st.beta.cwiseAbs().sum());
    };
    auto spend = [&] {
        report();
        if (++sweeps > sweep_budget)
            throw NoConvergence("coordinate descent exceeded " + std::to_string(opt.max_iter) + " sweeps",
                                lambda_index);
    };
    for (;;) {
        spend();
        if (sweep(q, lambda, intercept, st, nullptr) < opt.tol) break;
        active.clear();
        for (Index j = 0; j < st.beta.size(); ++j)
            if (st.beta(j) != 0.0) active.push_back(j);
        for (;;) {
            spend();
            if (sweep(q, lambda, intercept, st, &active) < opt.tol) break;
        }
    }
    report();
    return sweeps;
}

int gram_descent(const Eigen::MatrixXd& q, double lambda, const std::vector<bool>& constant, Eigen::VectorXd& beta,
                 Eigen::VectorXd& r, const SolverOptions& opt, int lambda_index, int sweep_budget) {
    int sweeps = 0;
    auto pass = [&](const std::vector<Index>* subset) {
        if (++sweeps > sweep_budget)
            throw NoConvergence("coordinate descent exceeded " + std::to_string(opt.max_iter) + " sweeps",
                                lambda_index);
        double dmax = 0.0;
        auto update = [&](Index j) {
            if (constant[static_cast<std::size_t>(j)] || q(j, j) <= 0.0) return;
            const double old = beta(j);
            const double upd = soft_threshold(r(j) + q(j, j) * old, lambda) / q(j, j);
            if (upd != old) {
                r.noalias() -= (upd - old) * q.col(j);
                dmax = std::max(dmax, std::abs(upd - old));
                beta(j) = upd;
            }
        };
        if (subset) {
            for (Index j : *subset) update(j);
        } else {
            for (Index j = 0; j < beta.size(); ++j) update(j);
        }
        return dmax;
    };
    std::vector<Index> active;
    while (pass(nullptr) >= opt.tol) {
        active.clear();
        for (Index j = 0; j < beta.size(); ++j)
            if (beta(j) != 0.0) active.push_back(j);
        while (pass(&active) >= opt.tol) {
        }
    }
    return sweeps;
}

void store_row(LassoPath& path, Index i, const Scaled& s, const Eigen::VectorXd& beta, double b0) {
    IndexSet act;
    double icpt = b0;
    for (Index j = 0; j < beta.size(); ++j) {
        const double c = beta(j) == 0.0 ? 0.0 : beta(j) / s.scale(j);
        path.coefs(i, j) = c;
        if (c != 0.0) {
            act.push_back(j);
            icpt -= c * s.center(j);
        }
    }
    path.intercepts(i) = path.family == Family::cox ? 0.0 : icpt;
    path.active_sets[static_cast<std::size_t>(i)] = std::move(act);
}

LassoPath empty_path(Family f, const std::vector<double>& lambdas, Index p) {
    LassoPath path;
    path.family = f;
    path.lambdas = lambdas;
    const Index m = static_cast<Index>(lambdas.size());
    path.coefs = Eigen::MatrixXd::Zero(m, p);
    path.intercepts = Eigen::VectorXd::Zero(m);
    path.active_sets.assign(lambdas.size(), IndexSet{});
    return path;
}

void truncate_path(LassoPath& path, Index rows) {
    path.lambdas.resize(static_cast<std::size_t>(rows));
    path.coefs.conservativeResize(rows, Eigen::NoChange);
    path.intercepts.conservativeResize(rows);
    path.active_sets.resize(static_cast<std::size_t>(rows));
}

void check_grid(const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw DimensionError("lambda grid is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) throw DimensionError("lambdas must be positive");
        if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw DimensionError("lambdas must be strictly decreasing");
    }
}

CoxRisk::CoxRisk(const Eigen::VectorXd& time, const Eigen::VectorXd& status) : status_(status) {
    const Index n = time.size();
    order_.resize(static_cast<std::size_t>(n));
    std::iota(order_.begin(), order_.end(), Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Index a, Index b) { return time(a) < time(b); });
    for (Index k = 0; k < n; ++k) {
        const Index i = order_[static_cast<std::size_t>(k)];
        if (k == 0 || time(i) != time(order_[static_cast<std::size_t>(k - 1)])) {
            group_start_.push_back(k);
            group_fail_.push_back(0.0);
        }
        group_fail_.back() += status(i);
    }
    group_start_.push_back(n);
}

double CoxRisk::loglik(const Eigen::VectorXd& eta) const {
    Eigen::VectorXd g, h;
    return derivatives(eta, g, h);
}

double CoxRisk::derivatives(const Eigen::VectorXd& eta, Eigen::VectorXd& grad, Eigen::VectorXd& hess) const {
    const Index n = eta.size();
    const std::size_t groups = group_fail_.size();
    const double shift = eta.maxCoeff();
    Eigen::VectorXd e = (eta.array() - shift).exp();

    std::vector<double> risk(groups);
    double acc = 0.0;
    for (std::size_t g = groups; g-- > 0;) {
        for (Index k = group_start_[g]; k < group_start_[g + 1]; ++k) acc += e(order_[static_cast<std::size_t>(k)]);
        risk[g] = acc;
    }

    double ll = 0.0;
    for (Index i = 0; i < n; ++i)
        if (status_(i) != 0.0) ll += eta(i);
    grad.resize(n);
    hess.resize(n);
    double a = 0.0, b = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (group_fail_[g] > 0.0) {
            ll -= group_fail_[g] * (std::log(risk[g]) + shift);
            a += group_fail_[g] / risk[g];
            b += group_fail_[g] / (risk[g] * risk[g]);
        }
        for (Index k = group_start_[g]; k < group_start_[g + 1]; ++k) {
            const Index i = order_[static_cast<std::size_t>(k)];
            grad(i) = status_(i) - e(i) * a;
            hess(i) = e(i) * a - e(i) * e(i) * b;
        }
    }
    return ll;
}

Eigen::MatrixXd CoxRisk::hessian_gram(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x) const {
    const Index p = x.cols();
    const std::size_t groups = group_fail_.size();
    const Eigen::VectorXd e = (eta.array() - eta.maxCoeff()).exp();

    // Risk-set sums of e and e*x, accumulated from the latest time backwards.
    std::vector<double> risk(groups);
    Eigen::MatrixXd u(static_cast<Index>(groups), p);
    double acc = 0.0;
    Eigen::RowVectorXd accx = Eigen::RowVectorXd::Zero(p);
    for (std::size_t g = groups; g-- > 0;) {
        for (Index k = group_start_[g]; k < group_start_[g + 1]; ++k) {
            const Index i = order_[static_cast<std::size_t>(k)];
            acc += e(i);
            accx += e(i) * x.row(i);
        }
        risk[g] = acc;
        u.row(static_cast<Index>(g)) = accx;
    }

    Eigen::VectorXd d(eta.size());
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Index>(groups));
    double a = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (group_fail_[g] > 0.0) {
            a += group_fail_[g] / risk[g];
            c(static_cast<Index>(g)) = group_fail_[g] / (risk[g] * risk[g]);
        }
        for (Index k = group_start_[g]; k < group_start_[g + 1]; ++k) {
            const Index i = order_[static_cast<std::size_t>(k)];
            d(i) = e(i) * a;
        }
    }
    Eigen::MatrixXd h = x.transpose() * d.asDiagonal() * x;
    h.noalias() -= u.transpose() * c.asDiagonal() * u;
    return h;
}

}  // namespace pvfsr::detail

namespace pvfsr {

std::string to_string(Family f) {
    switch (f) {
        case Family::linear: return "linear";
        case Family::logistic: return "logistic";
        case Family::cox: return "cox";
    }
    return "unknown";
}

Family family_from_string(const std::string& s) {
    if (s == "linear") return Family::linear;
    if (s == "logistic") return Family::logistic;
    if (s == "cox") return Family::cox;
    throw ParseError("unknown family '" + s + "' (expected linear, logistic or cox)");
}

Response Response::continuous(Eigen::VectorXd y) {
    Response r;
    r.kind = ResponseKind::continuous;
    r.y = std::move(y);
    return r;
}

Response Response::binary(Eigen::VectorXd y) {
    Response r;
    r.kind = ResponseKind::binary;
    r.y = std::move(y);
    return r;
}

Response Response::survival(Eigen::VectorXd time, Eigen::VectorXd status) {
    Response r;
    r.kind = ResponseKind::survival;
    r.y = std::move(time);
    r.delta = std::move(status);
    return r;
}

Family Response::family() const {
    switch (kind) {
        case ResponseKind::continuous: return Family::linear;
        case ResponseKind::binary: return Family::logistic;
        case ResponseKind::survival: return Family::cox;
    }
    return Family::linear;
}

Response Response::subset(const std::vector<Index>& rows) const {
    Response r;
    r.kind = kind;
    r.y.resize(static_cast<Index>(rows.size()));
    if (kind == ResponseKind::survival) r.delta.resize(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        r.y(static_cast<Index>(k)) = y(rows[k]);
        if (kind == ResponseKind::survival) r.delta(static_cast<Index>(k)) = delta(rows[k]);
    }
    return r;
}

void validate_response(const Response& r, Index n) {
    if (r.y.size() != n) throw DimensionError("response length does not match design rows");
    if (!all_finite(r.y)) throw NonFiniteInput("response contains NaN or Inf");
    switch (r.kind) {
        case ResponseKind::continuous: break;
        case ResponseKind::binary: {
            for (Index i = 0; i < n; ++i)
                if (r.y(i) != 0.0 && r.y(i) != 1.0) throw InvalidResponse("binary response must be 0/1");
            const double s = r.y.sum();
            if (s == 0.0 || s == static_cast<double>(n))
                throw InvalidResponse("binary response has a single class");
            break;
        }
        case ResponseKind::survival: {
            if (r.delta.size() != n) throw DimensionError("status length does not match design rows");
            for (Index i = 0; i < n; ++i) {
                if (!(r.y(i) > 0.0)) throw InvalidResponse("survival times must be positive");
                if (r.delta(i) != 0.0 && r.delta(i) != 1.0) throw InvalidResponse("status must be 0/1");
            }
            if (r.delta.sum() == 0.0) throw AllCensored("every observation is censored");
            break;
        }
    }
}

namespace {

/// Null-model working residual whose correlation with each column defines lambda_max.
Eigen::VectorXd null_gradient(const Response& y, bool intercept) {
    const Index n = y.n();
    switch (y.kind) {
        case ResponseKind::continuous:
            return intercept ? Eigen::VectorXd(y.y.array() - y.y.mean()) : y.y;
        case ResponseKind::binary:
            return intercept ? Eigen::VectorXd(y.y.array() - y.y.mean()) : Eigen::VectorXd(y.y.array() - 0.5);
        case ResponseKind::survival: {
            detail::CoxRisk risk(y.y, y.delta);
            Eigen::VectorXd g, h;
            risk.derivatives(Eigen::VectorXd::Zero(n), g, h);
            return g;
        }
    }
    return y.y;
}

bool uses_intercept(const Response& y, const SolverOptions& opt) {
    return opt.intercept && y.kind != ResponseKind::survival;
}

}  // namespace

double lambda_max(const DesignMatrix& x, const Response& y, const SolverOptions& opt) {
    validate_response(y, x.n());
    const bool icpt = uses_intercept(y, opt);
    const detail::Scaled s = detail::prepare(x, icpt || y.kind == ResponseKind::survival);
    const Eigen::VectorXd g = null_gradient(y, icpt);
    const double lmax = (s.x.transpose() * g).cwiseAbs().maxCoeff() / static_cast<double>(x.n());
    const double ref = std::max(1.0, g.norm() / std::sqrt(static_cast<double>(x.n())));
    if (!(lmax > 1e-10 * ref)) throw ZeroVarianceResponse("null-model gradient is identically zero");
    return lmax;
}

double default_lambda_ratio(Index n, Index p) { return n > p ? 1e-3 : 1e-2; }

std::vector<double> lambda_grid(const DesignMatrix& x, const Response& y, int m, double ratio,
                                const SolverOptions& opt) {
    if (m < 2) throw DimensionError("lambda_grid: need at least 2 values");
    if (!(ratio > 0.0 && ratio < 1.0)) throw DimensionError("lambda_grid: ratio must lie in (0, 1)");
    const double lmax = lambda_max(x, y, opt);
    std::vector<double> grid(static_cast<std::size_t>(m));
    const double step = std::log(ratio) / static_cast<double>(m - 1);
    for (int i = 0; i < m; ++i) grid[static_cast<std::size_t>(i)] = lmax * std::exp(step * i);
    grid.front() = lmax;
    return grid;
}

LassoPath fit_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                   const SolverOptions& opt) {
    switch (y.kind) {
        case ResponseKind::continuous: return fit_linear_path(x, y, lambdas, opt);
        case ResponseKind::binary: return fit_logistic_path(x, y, lambdas, opt);
        case ResponseKind::survival: return fit_cox_path(x, y, lambdas, opt);
    }
    throw InvalidResponse("unknown response kind");
}

namespace {

double smooth_loss(const Response& y, const Eigen::VectorXd& eta) {
    const double n = static_cast<double>(y.n());
    switch (y.kind) {
        case ResponseKind::continuous: return 0.5 * (y.y - eta).squaredNorm() / n;
        case ResponseKind::binary: {
            double s = 0.0;
            for (Index i = 0; i < y.n(); ++i) {
                const double e = eta(i);
                const double log1pexp = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
                s += log1pexp - y.y(i) * e;
            }
            return s / n;
        }
        case ResponseKind::survival: return -cox_log_partial_likelihood(y.y, y.delta, eta) / n;
    }
    return 0.0;
}

/// d loss / d eta.
Eigen::VectorXd loss_gradient(const Response& y, const Eigen::VectorXd& eta) {
    const double n = static_cast<double>(y.n());
    switch (y.kind) {
        case ResponseKind::continuous: return (eta - y.y) / n;
        case ResponseKind::binary: {
            Eigen::VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
            return (p - y.y) / n;
        }
        case ResponseKind::survival: {
            detail::CoxRisk risk(y.y, y.delta);
            Eigen::VectorXd g, h;
            risk.derivatives(eta, g, h);
            return -g / n;
        }
    }
    return eta;
}

}  // namespace

double cox_log_partial_likelihood(const Eigen::VectorXd& time, const Eigen::VectorXd& status,
                                  const Eigen::VectorXd& eta) {
    return detail::CoxRisk(time, status).loglik(eta);
}

double penalized_objective(const DesignMatrix& x, const Response& y, const Eigen::VectorXd& beta, double intercept,
                           double lambda, const SolverOptions& opt) {
    const bool icpt = uses_intercept(y, opt);
    const auto st = standardize(x, icpt || y.kind == ResponseKind::survival);
    Eigen::VectorXd eta = x.values * beta;
    if (icpt) eta.array() += intercept;
    double pen = 0.0;
    for (Index j = 0; j < x.p(); ++j) pen += st.scale(j) * std::abs(beta(j));
    return smooth_loss(y, eta) + lambda * pen;
}

std::vector<double> kkt_violations(const DesignMatrix& x, const Response& y, const LassoPath& path,
                                   const SolverOptions& opt) {
    const bool icpt = uses_intercept(y, opt);
    const auto st = standardize(x, icpt || y.kind == ResponseKind::survival);
    std::vector<double> out;
    out.reserve(path.lambdas.size());
    for (Index i = 0; i < path.size(); ++i) {
        const Eigen::VectorXd beta = path.coefs.row(i).transpose();
        Eigen::VectorXd eta = x.values * beta;
        if (icpt) eta.array() += path.intercepts(i);
        const Eigen::VectorXd d = loss_gradient(y, eta);
        const Eigen::VectorXd g = st.design.values.transpose() * d;
        const double lam = path.lambdas[static_cast<std::size_t>(i)];
        double worst = icpt ? std::abs(d.sum()) : 0.0;
        for (Index j = 0; j < x.p(); ++j) {
            if (st.design.constant[static_cast<std::size_t>(j)]) continue;
            const double v = beta(j) != 0.0 ? std::abs(g(j) + lam * (beta(j) > 0 ? 1.0 : -1.0))
                                            : std::max(0.0, std::abs(g(j)) - lam);
            worst = std::max(worst, v);
        }
        out.push_back(worst);
    }
    return out;
}

}  // namespace pvfsr
