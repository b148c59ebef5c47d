// Logistic and Cox lasso paths by proximal Newton: a weighted least-squares
// approximation of the loss is minimized by coordinate descent, and the step
// is halved until the penalized objective decreases. Cox uses the full
// partial-likelihood Hessian; logistic uses the diagonal IRLS weights.

#include <algorithm>
#include <cmath>

#include "pvfsr/errors.hpp"
#include "solver_detail.hpp"

namespace pvfsr {
namespace {

constexpr double kEtaLimit = 30.0;
constexpr int kMaxOuter = 2000;

/// Loss-specific pieces for one family.
struct GlmModel {
    virtual ~GlmModel() = default;
    virtual double loss(const Eigen::VectorXd& eta) const = 0;
    /// Fills working weights and working residual (z - eta).
    virtual void working(const Eigen::VectorXd& eta, Eigen::VectorXd& w, Eigen::VectorXd& resid) const = 0;
    /// Exact Newton model in coefficient space: score (1/n) X'g and Hessian (1/n) X'HX.
    /// Families that return false use the diagonal working weights instead.
    virtual bool newton(const Eigen::VectorXd&, const Eigen::MatrixXd&, Eigen::VectorXd&, Eigen::MatrixXd&) const {
        return false;
    }
};

struct LogisticModel final : GlmModel {
    const Eigen::VectorXd& y;
    explicit LogisticModel(const Eigen::VectorXd& y_) : y(y_) {}

    double loss(const Eigen::VectorXd& eta) const override {
        double s = 0.0;
        for (Index i = 0; i < eta.size(); ++i) {
            const double e = eta(i);
            s += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) - y(i) * e;
        }
        return s / static_cast<double>(eta.size());
    }

    void working(const Eigen::VectorXd& eta, Eigen::VectorXd& w, Eigen::VectorXd& resid) const override {
        const Index n = eta.size();
        w.resize(n);
        resid.resize(n);
        for (Index i = 0; i < n; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-eta(i)));
            w(i) = std::max(p * (1.0 - p), 1e-5);
            resid(i) = (y(i) - p) / w(i);
        }
    }
};

struct CoxModel final : GlmModel {
    detail::CoxRisk risk;
    CoxModel(const Eigen::VectorXd& time, const Eigen::VectorXd& status) : risk(time, status) {}

    double loss(const Eigen::VectorXd& eta) const override {
        return -risk.loglik(eta) / static_cast<double>(eta.size());
    }

    void working(const Eigen::VectorXd& eta, Eigen::VectorXd& w, Eigen::VectorXd& resid) const override {
        Eigen::VectorXd g;
        risk.derivatives(eta, g, w);
        resid.resize(eta.size());
        for (Index i = 0; i < eta.size(); ++i) {
            if (w(i) > 1e-12) {
                resid(i) = g(i) / w(i);
            } else {
                w(i) = 0.0;
                resid(i) = 0.0;
            }
        }
    }

    bool newton(const Eigen::VectorXd& eta, const Eigen::MatrixXd& x, Eigen::VectorXd& score,
                Eigen::MatrixXd& q) const override {
        Eigen::VectorXd g, h;
        risk.derivatives(eta, g, h);
        const double n = static_cast<double>(eta.size());
        score = x.transpose() * g / n;
        q = risk.hessian_gram(eta, x) / n;
        return true;
    }
};

LassoPath fit_glm_path(Family family, const GlmModel& model, const DesignMatrix& x, bool icpt, bool center, double b0_init,
                       const std::vector<double>& lambdas, const SolverOptions& opt) {
    detail::check_grid(lambdas);
    const detail::Scaled s = detail::prepare(x, center);
    const Index p = x.p();

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double b0 = b0_init;
    LassoPath path = detail::empty_path(family, lambdas, p);

    auto objective = [&](const Eigen::VectorXd& b, double c, double lam) {
        Eigen::VectorXd eta = s.x * b;
        eta.array() += c;
        return model.loss(eta) + lam * b.cwiseAbs().sum();
    };

    Eigen::VectorXd w, score;
    Eigen::MatrixXd hess;
    auto diverged = [&](const Eigen::VectorXd& b, double c) {
        Eigen::VectorXd eta = s.x * b;
        eta.array() += c;
        return eta.cwiseAbs().maxCoeff() > kEtaLimit;
    };
    auto truncate_at = [&](std::size_t i) {
        detail::truncate_path(path, static_cast<Index>(i));
        path.status = PathStatus::separation;
        path.warning = "linear predictor exceeded " + std::to_string(static_cast<int>(kEtaLimit)) +
                       " in magnitude at lambda index " + std::to_string(i) + "; path truncated";
    };
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double lam = lambdas[i];
        int budget = opt.max_iter;
        for (int outer = 0;; ++outer) {
            if (outer >= kMaxOuter)
                throw NoConvergence("proximal Newton exceeded outer iteration limit", static_cast<int>(i));
            Eigen::VectorXd eta = s.x * beta;
            eta.array() += b0;
            detail::CdState st{beta, b0, {}};
            try {
                if (model.newton(eta, s.x, score, hess)) {
                    budget -= detail::gram_descent(hess, lam, s.constant, st.beta, score, opt, static_cast<int>(i), budget);
                } else {
                    model.working(eta, w, st.resid);
                    const detail::Quadratic q = detail::weighted_quadratic(s, w);
                    budget -= detail::coordinate_descent(q, lam, icpt, st, opt, static_cast<int>(i), budget);
                }
            } catch (const NoConvergence&) {
                if (!diverged(st.beta, st.b0)) throw;
                truncate_at(i);
                return path;
            }

            const double f_old = objective(beta, b0, lam);
            Eigen::VectorXd cand = st.beta;
            double cand_b0 = st.b0;
            double f_new = objective(cand, cand_b0, lam);
            for (double t = 0.5; f_new > f_old + 1e-15 * std::max(1.0, std::abs(f_old)) && t > 1e-10; t *= 0.5) {
                cand = beta + t * (st.beta - beta);
                cand_b0 = b0 + t * (st.b0 - b0);
                f_new = objective(cand, cand_b0, lam);
            }
            const double dmax = std::max((cand - beta).cwiseAbs().maxCoeff(), std::abs(cand_b0 - b0));
            beta = cand;
            b0 = cand_b0;
            if (diverged(beta, b0)) {
                truncate_at(i);
                return path;
            }
            if (dmax < opt.tol) break;
        }
        detail::store_row(path, static_cast<Index>(i), s, beta, b0);
    }
    return path;
}

}  // namespace

LassoPath fit_logistic_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                            const SolverOptions& opt) {
    if (y.kind != ResponseKind::binary) throw InvalidResponse("logistic lasso needs a binary response");
    validate_response(y, x.n());
    const double ybar = y.y.mean();
    const double b0 = opt.intercept ? std::log(ybar / (1.0 - ybar)) : 0.0;
    LogisticModel model(y.y);
    return fit_glm_path(Family::logistic, model, x, opt.intercept, opt.intercept, b0, lambdas, opt);
}

LassoPath fit_cox_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                       const SolverOptions& opt) {
    if (y.kind != ResponseKind::survival) throw InvalidResponse("Cox lasso needs a survival response");
    validate_response(y, x.n());
    CoxModel model(y.y, y.delta);
    return fit_glm_path(Family::cox, model, x, false, true, 0.0, lambdas, opt);
}

}  // namespace pvfsr
