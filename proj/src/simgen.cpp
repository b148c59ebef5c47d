#include "pvfsr/simgen.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "pvfsr/errors.hpp"
#include "pvfsr/parallel.hpp"
#include "pvfsr/random.hpp"

namespace pvfsr {

void validate(const Scenario& sc) {
    if (sc.n < 10) throw DimensionError("scenario: n must be at least 10");
    if (sc.p < 1) throw DimensionError("scenario: p must be at least 1");
    if (sc.sparsity < 0 || sc.sparsity > sc.p) throw DimensionError("scenario: need 0 <= s <= p");
    if (!(sc.rho >= 0.0 && sc.rho < 1.0)) throw DimensionError("scenario: rho must lie in [0, 1)");
    if (!(sc.alpha > 0.0 && sc.alpha < 1.0)) throw DimensionError("scenario: alpha must lie in (0, 1)");
    if (sc.n_beta_draws < 1 || sc.n_datasets_per_beta < 1) throw DimensionError("scenario: replicate counts must be positive");
}

std::string to_string(SimMethod m) { return m == SimMethod::pseudo1 ? "pseudo1" : "pseudo2"; }

SimMethod sim_method_from_string(const std::string& s) {
    if (s == "pseudo1" || s == "pseudo-1") return SimMethod::pseudo1;
    if (s == "pseudo2" || s == "pseudo-2") return SimMethod::pseudo2;
    throw ParseError("unknown method '" + s + "' (expected pseudo1 or pseudo2)");
}

BetaDraw draw_beta(Index p, Index s, double amplitude, std::uint64_t seed) {
    if (s < 0 || s > p) throw DimensionError("draw_beta: need 0 <= s <= p");
    Rng rng = make_rng(seed);
    std::vector<Index> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), Index{0});
    // Partial Fisher-Yates: the first s entries are a uniform sample without replacement.
    for (Index k = 0; k < s; ++k) {
        std::uniform_int_distribution<Index> pick(k, p - 1);
        std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    BetaDraw d;
    d.beta = Eigen::VectorXd::Zero(p);
    d.support.assign(idx.begin(), idx.begin() + s);
    std::sort(d.support.begin(), d.support.end());
    for (Index j : d.support) d.beta(j) = amplitude;
    return d;
}

DesignMatrix draw_design(Index n, Index p, double rho, std::uint64_t seed) {
    if (!(std::abs(rho) < 1.0)) throw DimensionError("draw_design: |rho| must be below 1");
    Rng rng = make_rng(seed);
    std::normal_distribution<double> z;
    const double innov = std::sqrt(1.0 - rho * rho);
    Eigen::MatrixXd m(n, p);
    for (Index i = 0; i < n; ++i) {
        double prev = z(rng);
        m(i, 0) = prev;
        for (Index j = 1; j < p; ++j) {
            prev = rho * prev + innov * z(rng);
            m(i, j) = prev;
        }
    }
    return make_design(m);
}

Response draw_response(const DesignMatrix& x, const Eigen::VectorXd& beta, Family family, double intercept_c,
                       std::uint64_t seed) {
    if (beta.size() != x.p()) throw DimensionError("draw_response: beta length differs from column count");
    Rng rng = make_rng(seed);
    const Eigen::VectorXd eta = x.values * beta;
    const Index n = x.n();
    switch (family) {
        case Family::linear: {
            std::normal_distribution<double> z;
            Eigen::VectorXd y(n);
            for (Index i = 0; i < n; ++i) y(i) = eta(i) + z(rng);
            return Response::continuous(y);
        }
        case Family::logistic: {
            std::uniform_real_distribution<double> u;
            Eigen::VectorXd y(n);
            for (Index i = 0; i < n; ++i) y(i) = u(rng) < 1.0 / (1.0 + std::exp(intercept_c - eta(i))) ? 1.0 : 0.0;
            return Response::binary(y);
        }
        case Family::cox: {
            std::exponential_distribution<double> unit(1.0);
            Eigen::VectorXd t(n), d(n);
            for (Index i = 0; i < n; ++i) {
                const double event = unit(rng) / (0.01 * std::exp(eta(i)));
                const double censor = unit(rng) * 1000.0;
                t(i) = std::min(event, censor);
                d(i) = event <= censor ? 1.0 : 0.0;
            }
            return Response::survival(t, d);
        }
    }
    throw DimensionError("draw_response: unknown family");
}

void aggregate(SimResult& r) {
    std::vector<double> f, t;
    double sel = 0.0, cens = 0.0, empty = 0.0;
    r.failures = 0;
    for (const auto& o : r.per_replicate) {
        if (o.failed) {
            ++r.failures;
            continue;
        }
        f.push_back(o.fsr);
        t.push_back(o.tsr);
        sel += static_cast<double>(o.selected);
        cens += o.censoring;
        empty += o.selected == 0 ? 1.0 : 0.0;
    }
    const MeanSe mf = mean_se(f), mt = mean_se(t);
    r.mean_fsr = mf.mean;
    r.se_fsr = mf.se;
    r.mean_tsr = mt.mean;
    r.se_tsr = mt.se;
    const double ok = std::max<double>(1.0, static_cast<double>(f.size()));
    r.mean_selected = sel / ok;
    r.mean_censoring = cens / ok;
    r.empty_fraction = f.empty() ? 0.0 : empty / ok;
}

SimResult run_scenario(const Scenario& sc, SimMethod method, const FsrConfig& base, unsigned threads) {
    validate(sc);
    const auto start = std::chrono::steady_clock::now();
    SimResult res;
    res.scenario = sc;
    res.method = method;
    const int per_beta = sc.n_datasets_per_beta;
    const std::size_t total = static_cast<std::size_t>(sc.n_beta_draws) * static_cast<std::size_t>(per_beta);
    res.per_replicate.resize(total);

    parallel_for(total, threads, [&](std::size_t k) {
        ReplicateOutcome& o = res.per_replicate[k];
        o.beta_index = static_cast<int>(k / static_cast<std::size_t>(per_beta));
        o.dataset_index = static_cast<int>(k % static_cast<std::size_t>(per_beta));
        const auto bi = static_cast<std::uint64_t>(o.beta_index), di = static_cast<std::uint64_t>(o.dataset_index);
        try {
            const BetaDraw beta = draw_beta(sc.p, sc.sparsity, sc.amplitude, derive_seed(sc.seed, {bi}));
            const DesignMatrix x = draw_design(sc.n, sc.p, sc.rho, derive_seed(sc.seed, {bi, di, 0}));
            const Response y = draw_response(x, beta.beta, sc.family, sc.intercept_c, derive_seed(sc.seed, {bi, di, 1}));
            if (sc.family == Family::cox) o.censoring = 1.0 - y.delta.mean();

            FsrConfig cfg = base;
            cfg.alpha_targets = {sc.alpha};
            cfg.screening = method == SimMethod::pseudo1 ? ScreenMethod::pseudo_screen : ScreenMethod::cv_lasso;
            cfg.seed = derive_seed(sc.seed, {bi, di, 2});
            cfg.lambdas.clear();
            cfg.threads = 1;
            const FsrCurve curve = estimate_fsr(x, y, cfg);
            const AlphaSelection& sel = curve.selected.front();
            const SelectionOutcome out{sel.feasible ? sel.active_set : IndexSet{}, beta.support};
            o.fsr = fsr_of(out);
            o.tsr = tsr_of(out);
            o.selected = static_cast<Index>(out.selected.size());
            o.degraded = curve.degraded;
        } catch (const std::exception& e) {
            o.failed = true;
            o.error = e.what();
        }
    });

    aggregate(res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace pvfsr
