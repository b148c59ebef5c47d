#include "pvfsr/errors.hpp"
#include "solver_detail.hpp"

namespace pvfsr {

LassoPath fit_linear_path(const DesignMatrix& x, const Response& y, const std::vector<double>& lambdas,
                          const SolverOptions& opt) {
    if (y.kind != ResponseKind::continuous) throw InvalidResponse("linear lasso needs a continuous response");
    validate_response(y, x.n());
    detail::check_grid(lambdas);

    const bool icpt = opt.intercept;
    const detail::Scaled s = detail::prepare(x, icpt);
    const detail::Quadratic q = detail::unit_quadratic(s);

    detail::CdState st;
    st.beta = Eigen::VectorXd::Zero(x.p());
    st.b0 = icpt ? y.y.mean() : 0.0;
    st.resid = y.y.array() - st.b0;

    LassoPath path = detail::empty_path(Family::linear, lambdas, x.p());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        detail::coordinate_descent(q, lambdas[i], icpt, st, opt, static_cast<int>(i), opt.max_iter);
        detail::store_row(path, static_cast<Index>(i), s, st.beta, st.b0);
    }
    return path;
}

}  // namespace pvfsr
