#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pvfsr/errors.hpp"

namespace pvfsr {

using Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Sorted, duplicate-free, 0-based column indices.
using IndexSet = std::vector<Index>;

/// n x p design with column labels. Columns flagged constant are never penalized.
template <typename Scalar>
struct BasicDesignMatrix {
    MatrixX<Scalar> values;
    std::vector<std::string> column_names;
    bool standardized = false;
    std::vector<bool> constant;

    Index n() const { return values.rows(); }
    Index p() const { return values.cols(); }
};

using DesignMatrix = BasicDesignMatrix<double>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
    return m.derived().array().isFinite().all();
}

/// Build a validated design. Missing names default to x1..xp.
template <typename Derived>
BasicDesignMatrix<typename Derived::Scalar> make_design(const Eigen::MatrixBase<Derived>& values,
                                                        std::vector<std::string> names = {}) {
    using Scalar = typename Derived::Scalar;
    if (values.rows() < 2) throw DimensionError("design needs at least 2 rows");
    if (values.cols() < 1) throw DimensionError("design needs at least 1 column");
    if (!all_finite(values)) throw NonFiniteInput("design contains NaN or Inf");
    if (names.empty()) {
        for (Index j = 0; j < values.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<Index>(names.size()) != values.cols())
        throw DimensionError("column_names size does not match column count");
    BasicDesignMatrix<Scalar> d;
    d.values = values;
    d.column_names = std::move(names);
    d.constant.assign(static_cast<std::size_t>(values.cols()), false);
    return d;
}

/// Per-column centering and scaling applied by `standardize`.
template <typename Scalar>
struct Standardization {
    BasicDesignMatrix<Scalar> design;
    VectorX<Scalar> center;
    VectorX<Scalar> scale;
};

/// Center (optional) and scale each column to (1/n) sum x^2 = 1.
///
/// Columns whose spread falls below `constant_tol` are flagged constant,
/// zeroed and given scale 1.
template <typename Scalar>
Standardization<Scalar> standardize(const BasicDesignMatrix<Scalar>& x, bool center,
                                    Scalar constant_tol = Scalar(1e-10)) {
    const Index n = x.n(), p = x.p();
    Standardization<Scalar> out;
    out.design = x;
    out.design.constant.assign(static_cast<std::size_t>(p), false);
    out.center = VectorX<Scalar>::Zero(p);
    out.scale = VectorX<Scalar>::Ones(p);
    for (Index j = 0; j < p; ++j) {
        auto col = out.design.values.col(j);
        if (center) {
            out.center(j) = col.mean();
            col.array() -= out.center(j);
        }
        const Scalar s = std::sqrt(col.squaredNorm() / Scalar(n));
        const Scalar ref = std::max(Scalar(1), x.values.col(j).cwiseAbs().maxCoeff());
        if (!(s > constant_tol * ref)) {
            out.design.constant[static_cast<std::size_t>(j)] = true;
            col.setZero();
        } else {
            out.scale(j) = s;
            col /= s;
        }
    }
    out.design.standardized = center;
    return out;
}

inline void check_index_set(const IndexSet& s, Index p) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] < 0 || s[i] >= p) throw DimensionError("index out of range in index set");
        if (i > 0 && s[i] <= s[i - 1]) throw DimensionError("index set must be sorted and unique");
    }
}

inline IndexSet complement(const IndexSet& s, Index p) {
    IndexSet out;
    out.reserve(static_cast<std::size_t>(p) - std::min<std::size_t>(s.size(), static_cast<std::size_t>(p)));
    std::size_t k = 0;
    for (Index j = 0; j < p; ++j) {
        if (k < s.size() && s[k] == j) {
            ++k;
            continue;
        }
        out.push_back(j);
    }
    return out;
}

template <typename Derived>
MatrixX<typename Derived::Scalar> select_columns(const Eigen::MatrixBase<Derived>& m, const IndexSet& cols) {
    MatrixX<typename Derived::Scalar> out(m.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
    return out;
}

}  // namespace pvfsr
