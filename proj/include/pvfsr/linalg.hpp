#pragma once

// Dense kernels behind pseudo-variable generation: rank-revealing QR,
// null-space bases, Haar-distributed orthonormal frames and the
// Gram-preserving pseudo-variable constructor.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "pvfsr/design.hpp"
#include "pvfsr/errors.hpp"
#include "pvfsr/random.hpp"

namespace pvfsr {

inline constexpr double kDefaultRankTol = 1e-8;

/// Column-pivoted QR, m * P = q * r_mat, truncated at the detected rank.
template <typename Scalar>
struct QrFactors {
    MatrixX<Scalar> q;           ///< n x rank, orthonormal columns
    MatrixX<Scalar> r_mat;       ///< rank x p, upper trapezoidal in pivoted order
    Index rank = 0;
    std::vector<Index> pivot;    ///< pivoted column k is m.col(pivot[k])
    MatrixX<Scalar> complement;  ///< n x (n - rank), orthonormal basis of range(m)^perp
};

/// Rank is the number of |r_kk| > rank_tol * |r_11|.
template <typename Derived>
QrFactors<typename Derived::Scalar> qr_pivoted(const Eigen::MatrixBase<Derived>& m,
                                               double rank_tol = kDefaultRankTol) {
    using Scalar = typename Derived::Scalar;
    if (!all_finite(m)) throw NonFiniteInput("qr_pivoted: input contains NaN or Inf");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw DimensionError("qr_pivoted: rank_tol must lie in (0, 1)");

    const Index n = m.rows(), p = m.cols();
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(m.derived());
    qr.setThreshold(static_cast<Scalar>(rank_tol));

    QrFactors<Scalar> f;
    const Index k = std::min(n, p);
    Index rank = 0;
    if (k > 0) {
        const Scalar lead = std::abs(qr.matrixQR()(0, 0));
        for (Index i = 0; i < k; ++i)
            if (std::abs(qr.matrixQR()(i, i)) > static_cast<Scalar>(rank_tol) * lead) ++rank;
    }
    f.rank = rank;

    MatrixX<Scalar> full = qr.householderQ();
    f.q = full.leftCols(rank);
    f.complement = full.rightCols(n - rank);
    f.r_mat = qr.matrixQR().topRows(rank).template triangularView<Eigen::Upper>();
    f.pivot.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) f.pivot[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()(j);
    return f;
}

/// Orthonormal basis of the orthogonal complement of the factored matrix's column space.
template <typename Scalar>
MatrixX<Scalar> null_space_basis(const QrFactors<Scalar>& qr, Index n) {
    if (qr.q.rows() != n) throw DimensionError("null_space_basis: factorization row count differs from n");
    return qr.complement;
}

/// First `cols` columns of a Haar-distributed dim x dim orthogonal matrix.
///
/// QR of a standard Gaussian matrix, with each column of Q multiplied by the
/// sign of the matching diagonal entry of R so the law is exactly Haar.
template <typename Scalar = double>
MatrixX<Scalar> haar_orthonormal(Index dim, Index cols, Rng& rng) {
    if (cols < 1 || dim < 1 || cols > dim) throw DimensionError("haar_orthonormal: need 1 <= cols <= dim");
    std::normal_distribution<double> normal;
    MatrixX<Scalar> g(dim, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < dim; ++i) g(i, j) = static_cast<Scalar>(normal(rng));
    Eigen::HouseholderQR<MatrixX<Scalar>> qr(g);
    MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(dim, cols);
    for (Index j = 0; j < cols; ++j)
        if (qr.matrixQR()(j, j) < Scalar(0)) q.col(j) = -q.col(j);
    return q;
}

template <typename Scalar = double>
MatrixX<Scalar> haar_orthonormal(Index dim, Index cols, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    return haar_orthonormal<Scalar>(dim, cols, rng);
}

/// Pseudo-variables for the columns outside `source_set`.
template <typename Scalar>
struct PseudoMatrix {
    MatrixX<Scalar> values;  ///< n x (p - |source_set|), same column order as complement(source_set)
    IndexSet source_set;
    std::uint64_t seed = 0;
    Index residual_rank = 0;  ///< r - r(S); zero means the construction was deterministic
};

struct PseudoOptions {
    double rank_tol = kDefaultRankTol;
    /// Rank of the full design (with the constant column if anchored); computed when absent.
    std::optional<Index> design_rank;
    /// Treat the all-ones vector as part of the source block, so pseudo-variables
    /// also reproduce column means (needed when the model has an intercept).
    bool constant_anchor = false;
};

namespace detail {

template <typename Derived>
MatrixX<typename Derived::Scalar> source_block(const Eigen::MatrixBase<Derived>& x, const IndexSet& s,
                                               bool constant_anchor) {
    using Scalar = typename Derived::Scalar;
    const Index off = constant_anchor ? 1 : 0;
    MatrixX<Scalar> out(x.rows(), static_cast<Index>(s.size()) + off);
    if (constant_anchor) out.col(0).setOnes();
    for (std::size_t k = 0; k < s.size(); ++k) out.col(static_cast<Index>(k) + off) = x.col(s[k]);
    return out;
}

}  // namespace detail

/// Rank of the design as used by `generate_pseudo`.
template <typename Scalar>
Index design_rank(const BasicDesignMatrix<Scalar>& x, bool constant_anchor, double rank_tol = kDefaultRankTol) {
    if (!constant_anchor) return qr_pivoted(x.values, rank_tol).rank;
    MatrixX<Scalar> aug(x.n(), x.p() + 1);
    aug << MatrixX<Scalar>::Ones(x.n(), 1), x.values;
    return qr_pivoted(aug, rank_tol).rank;
}

/// X_pseudo = P_S X_{S^c} + sqrt(n) V Omega, where V = V1 V2 spans a random
/// (r - r(S))-dimensional subspace of range(X_S)^perp and Omega^T Omega equals
/// the Schur complement (1/n) X_{S^c}^T (I - P_S) X_{S^c}.
template <typename Scalar>
PseudoMatrix<Scalar> generate_pseudo(const BasicDesignMatrix<Scalar>& x, const IndexSet& source_set,
                                     std::uint64_t seed, const PseudoOptions& opt = {}) {
    const Index n = x.n(), p = x.p();
    if (source_set.empty()) throw DimensionError("generate_pseudo: source set must be nonempty");
    check_index_set(source_set, p);
    if (static_cast<Index>(source_set.size()) == p)
        throw EmptyComplement("generate_pseudo: source set covers every column");

    const IndexSet rest = complement(source_set, p);
    const MatrixX<Scalar> xs = detail::source_block(x.values, source_set, opt.constant_anchor);
    const MatrixX<Scalar> xr = select_columns(x.values, rest);

    const Index r = opt.design_rank ? *opt.design_rank : design_rank(x, opt.constant_anchor, opt.rank_tol);
    const QrFactors<Scalar> qs = qr_pivoted(xs, opt.rank_tol);

    PseudoMatrix<Scalar> out;
    out.source_set = source_set;
    out.seed = seed;
    out.values = qs.q * (qs.q.transpose() * xr);

    const Index d = std::clamp<Index>(r - qs.rank, 0, n - qs.rank);
    out.residual_rank = d;
    if (d == 0) return out;

    const MatrixX<Scalar> resid = xr - out.values;
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qe(resid);
    const auto& packed = qe.matrixQR();
    const auto& perm = qe.colsPermutation().indices();
    const Index rows = std::min<Index>(d, packed.rows());
    MatrixX<Scalar> omega = MatrixX<Scalar>::Zero(d, xr.cols());
    for (Index k = 0; k < xr.cols(); ++k)
        for (Index i = 0; i < std::min<Index>(rows, k + 1); ++i) omega(i, perm(k)) = packed(i, k);
    omega /= std::sqrt(static_cast<Scalar>(n));

    const MatrixX<Scalar> rotation = haar_orthonormal<Scalar>(n - qs.rank, d, seed);
    out.values.noalias() += std::sqrt(static_cast<Scalar>(n)) * (qs.complement * (rotation * omega));
    return out;
}

/// Uniformly random permutation of 0..n-1.
inline std::vector<Index> random_permutation(Index n, Rng& rng) {
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

/// Rows of x.values restricted to `cols`, shuffled by one uniform row permutation.
template <typename Scalar>
MatrixX<Scalar> permuted_copy(const BasicDesignMatrix<Scalar>& x, const IndexSet& cols, std::uint64_t seed) {
    if (cols.empty()) throw DimensionError("permuted_copy: column set must be nonempty");
    check_index_set(cols, x.p());
    Rng rng = make_rng(seed);
    const std::vector<Index> perm = random_permutation(x.n(), rng);
    MatrixX<Scalar> out(x.n(), static_cast<Index>(cols.size()));
    for (Index i = 0; i < x.n(); ++i)
        for (std::size_t k = 0; k < cols.size(); ++k)
            out(i, static_cast<Index>(k)) = x.values(perm[static_cast<std::size_t>(i)], cols[k]);
    return out;
}

}  // namespace pvfsr
