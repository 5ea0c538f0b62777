// Copyright 2026 The mixchan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIXCHAN_QMATH_HPP
#define MIXCHAN_QMATH_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mixchan {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when operand shapes or tensor layouts are inconsistent.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operand is outside an operation's mathematical domain
/// (non-Hermitian input to a spectral routine, negative time, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

namespace tol {
inline constexpr double exact = 1e-12;     // identities that hold in exact arithmetic
inline constexpr double spectral = 1e-10;  // eigen/singular value outputs
inline constexpr double psd = 1e-10;       // smallest admissible eigenvalue of a state is -psd
}  // namespace tol

// ---------------------------------------------------------------------------
// elementary matrices

inline CMatrix identity(Index dim) { return CMatrix::Identity(dim, dim); }

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}

inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// |j><j| on a `dim`-dimensional space.
inline CMatrix basis_projector(Index dim, Index j) {
  CMatrix p = CMatrix::Zero(dim, dim);
  p(j, j) = 1.0;
  return p;
}

/// |j><k| on a `dim`-dimensional space.
inline CMatrix matrix_unit(Index dim, Index j, Index k) {
  CMatrix e = CMatrix::Zero(dim, dim);
  e(j, k) = 1.0;
  return e;
}

inline double max_abs(const CMatrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

inline double hermiticity_residual(const CMatrix& x) {
  if (x.rows() != x.cols()) {
    throw DimensionError("hermiticity_residual: matrix is not square");
  }
  return max_abs(x - x.adjoint());
}

inline bool is_hermitian(const CMatrix& x, double tolerance = tol::spectral) {
  return x.rows() == x.cols() && hermiticity_residual(x) <= tolerance;
}

inline bool all_finite(const CMatrix& x) {
  return x.allFinite();
}

inline void require_square(const CMatrix& x, const char* what) {
  if (x.rows() != x.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

inline void require_finite(const CMatrix& x, const char* what) {
  if (!all_finite(x)) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

// ---------------------------------------------------------------------------
// QState

/// Density matrix on a finite-dimensional Hilbert space. Construction checks
/// Hermiticity, unit trace and positivity; a QState is immutable afterwards.
class QState {
 public:
  explicit QState(CMatrix matrix) : matrix_(std::move(matrix)) { validate(); }

  static QState pure(const CVector& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) {
      throw DomainError("QState::pure: zero vector");
    }
    const CVector v = psi / norm;
    return QState(v * v.adjoint());
  }

  /// Qubit state (I + x X + y Y + z Z) / 2.
  static QState from_bloch(double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1.0 + tol::exact) {
      throw DomainError("QState::from_bloch: Bloch vector norm exceeds 1");
    }
    const CMatrix m = 0.5 * (identity(2) + x * pauli_x() + y * pauli_y() + z * pauli_z());
    return QState(m);
  }

  static QState maximally_mixed(Index dim) { return QState(identity(dim) / static_cast<double>(dim)); }

  static QState basis(Index dim, Index j) { return QState(basis_projector(dim, j)); }

  Index dim() const { return matrix_.rows(); }
  const CMatrix& matrix() const { return matrix_; }

 private:
  void validate() const {
    if (matrix_.rows() == 0) {
      throw DimensionError("QState: empty matrix");
    }
    require_square(matrix_, "QState");
    require_finite(matrix_, "QState");
    if (hermiticity_residual(matrix_) > tol::exact) {
      throw DomainError("QState: matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > tol::exact) {
      throw DomainError("QState: trace differs from 1");
    }
    const CMatrix herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::psd) {
      throw DomainError("QState: matrix is not positive semidefinite");
    }
  }

  CMatrix matrix_;
};

// ---------------------------------------------------------------------------
// TensorLayout

/// Ordered tensor factor dimensions. The library-wide ordering is
/// S, E_1, ..., E_n, A with the left factor varying slowest.
class TensorLayout {
 public:
  explicit TensorLayout(std::vector<Index> factor_dims) : dims_(std::move(factor_dims)) {
    if (dims_.empty()) {
      throw DimensionError("TensorLayout: no factors");
    }
    for (Index d : dims_) {
      if (d <= 0) {
        throw DimensionError("TensorLayout: factor dimensions must be positive");
      }
    }
  }

  const std::vector<Index>& factor_dims() const { return dims_; }
  std::size_t size() const { return dims_.size(); }

  Index total() const {
    return std::accumulate(dims_.begin(), dims_.end(), Index{1}, std::multiplies<>());
  }

  /// Splits a flat index into per-factor digits.
  std::vector<Index> digits(Index flat) const {
    std::vector<Index> out(dims_.size());
    for (std::size_t k = dims_.size(); k-- > 0;) {
      out[k] = flat % dims_[k];
      flat /= dims_[k];
    }
    return out;
  }

 private:
  std::vector<Index> dims_;
};

namespace detail {

// For every flat index of `layout`, the flat index within the sub-layout
// formed by `selected` factors and the flat index within the complement.
struct SplitIndex {
  std::vector<Index> selected;
  std::vector<Index> rest;
  Index selected_dim = 1;
  Index rest_dim = 1;
};

inline SplitIndex split_index(const TensorLayout& layout, const std::vector<std::size_t>& factors) {
  const auto& dims = layout.factor_dims();
  std::vector<bool> chosen(dims.size(), false);
  for (std::size_t f : factors) {
    if (f >= dims.size()) {
      throw DimensionError("tensor factor index " + std::to_string(f) + " out of range");
    }
    if (chosen[f]) {
      throw DimensionError("tensor factor index " + std::to_string(f) + " repeated");
    }
    chosen[f] = true;
  }
  SplitIndex s;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (chosen[k] ? s.selected_dim : s.rest_dim) *= dims[k];
  }
  const Index total = layout.total();
  s.selected.resize(static_cast<std::size_t>(total));
  s.rest.resize(static_cast<std::size_t>(total));
  for (Index flat = 0; flat < total; ++flat) {
    const auto dig = layout.digits(flat);
    Index sel = 0;
    Index rst = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (chosen[k]) {
        sel = sel * dims[k] + dig[k];
      } else {
        rst = rst * dims[k] + dig[k];
      }
    }
    s.selected[static_cast<std::size_t>(flat)] = sel;
    s.rest[static_cast<std::size_t>(flat)] = rst;
  }
  return s;
}

inline void require_layout(const CMatrix& x, const TensorLayout& layout, const char* what) {
  require_square(x, what);
  if (x.rows() != layout.total()) {
    throw DimensionError(std::string(what) + ": layout total dimension " + std::to_string(layout.total()) +
                         " does not match matrix dimension " + std::to_string(x.rows()));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// operations

/// Kronecker product, left factor varying slowest.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CMatrix kron(const std::vector<CMatrix>& factors) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (const auto& f : factors) {
    out = kron(out, f);
  }
  return out;
}

/// Traces out `traced_factors`; the remaining factors keep their order.
inline CMatrix partial_trace(const CMatrix& x, const TensorLayout& layout,
                             const std::vector<std::size_t>& traced_factors) {
  detail::require_layout(x, layout, "partial_trace");
  const auto split = detail::split_index(layout, traced_factors);
  // index_of[kept * traced_dim + traced] = flat index
  std::vector<Index> index_of(static_cast<std::size_t>(layout.total()));
  for (Index flat = 0; flat < layout.total(); ++flat) {
    const auto f = static_cast<std::size_t>(flat);
    index_of[static_cast<std::size_t>(split.rest[f] * split.selected_dim + split.selected[f])] = flat;
  }
  const Index kept = split.rest_dim;
  const Index traced = split.selected_dim;
  CMatrix out = CMatrix::Zero(kept, kept);
  for (Index r = 0; r < kept; ++r) {
    for (Index c = 0; c < kept; ++c) {
      Complex acc{0.0, 0.0};
      for (Index tau = 0; tau < traced; ++tau) {
        acc += x(index_of[static_cast<std::size_t>(r * traced + tau)],
                 index_of[static_cast<std::size_t>(c * traced + tau)]);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

/// Places `op`, acting on `acting_factors` (strictly increasing), into the
/// full space of `layout` with identities on every other factor.
inline CMatrix embed(const CMatrix& op, const TensorLayout& layout, const std::vector<std::size_t>& acting_factors) {
  if (!std::is_sorted(acting_factors.begin(), acting_factors.end())) {
    throw DimensionError("embed: acting factors must be listed in increasing order");
  }
  const auto split = detail::split_index(layout, acting_factors);
  if (op.rows() != split.selected_dim || op.cols() != split.selected_dim) {
    throw DimensionError("embed: operator dimension does not match the acting factors");
  }
  const Index total = layout.total();
  CMatrix out = CMatrix::Zero(total, total);
  for (Index r = 0; r < total; ++r) {
    for (Index c = 0; c < total; ++c) {
      const auto ur = static_cast<std::size_t>(r);
      const auto uc = static_cast<std::size_t>(c);
      if (split.rest[ur] == split.rest[uc]) {
        out(r, c) = op(split.selected[ur], split.selected[uc]);
      }
    }
  }
  return out;
}

struct EigenSystem {
  std::vector<double> values;  // descending
  CMatrix vectors;             // column k belongs to values[k]
};

inline EigenSystem hermitian_eig(const CMatrix& x) {
  require_square(x, "hermitian_eig");
  require_finite(x, "hermitian_eig");
  if (hermiticity_residual(x) > tol::spectral) {
    throw DomainError("hermitian_eig: matrix is not Hermitian");
  }
  const CMatrix herm = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const Index n = x.rows();
  EigenSystem out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values[static_cast<std::size_t>(k)] = es.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const CMatrix& x) {
  require_square(x, "hermitian_eigenvalues");
  const CMatrix herm = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(out.begin(), out.end());
  return out;
}

/// Sum of singular values. Hermitian inputs (within 1e-10) use |eigenvalues|.
inline double trace_norm(const CMatrix& x) {
  require_square(x, "trace_norm");
  require_finite(x, "trace_norm");
  if (x.rows() == 0) {
    return 0.0;
  }
  if (hermiticity_residual(x) <= tol::spectral) {
    if (x.rows() == 1) {
      return std::abs(x(0, 0).real());
    }
    if (x.rows() == 2) {
      const double a = x(0, 0).real();
      const double d = x(1, 1).real();
      const Complex b = 0.5 * (x(0, 1) + std::conj(x(1, 0)));
      const double mean = 0.5 * (a + d);
      const double radius = std::hypot(0.5 * (a - d), std::abs(b));
      return 2.0 * std::max(std::abs(mean), radius);
    }
    const CMatrix herm = 0.5 * (x + x.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues().sum();
}

/// exp(-i H t) through the eigendecomposition of H.
inline CMatrix unitary_exp(const CMatrix& h, double t) {
  const auto eig = hermitian_eig(h);
  const Index n = h.rows();
  CVector phases(n);
  for (Index k = 0; k < n; ++k) {
    phases(k) = std::exp(Complex(0.0, -eig.values[static_cast<std::size_t>(k)] * t));
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace mixchan

#endif  // MIXCHAN_QMATH_HPP
