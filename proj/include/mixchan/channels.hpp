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


#ifndef MIXCHAN_CHANNELS_HPP
#define MIXCHAN_CHANNELS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "mixchan/qmath.hpp"

namespace mixchan {

class ChannelFamily;
class MixtureSpec;
struct MicroscopicModel;

/// Pure dephasing of a qubit: populations in the sigma_z basis are kept and
/// <1|rho|0> is multiplied by exp(-(gamma + i lambda) t).
struct DephasingSemigroup {
  double gamma = 0.0;
  double lambda = 0.0;

  Complex multiplier(double t) const { return std::exp(-Complex(gamma, lambda) * t); }
};

/// t -> Tr_E[U_t (rho (x) rho_E) U_t^dag] with U_t = exp(-i H t) on S (x) E.
/// A one-dimensional environment gives a plain unitary family.
struct UnitaryFamily {
  CMatrix hamiltonian;
  CMatrix env_state;
  Index system_dim = 0;
  EigenSystem spectrum;
};

struct KrausFamily {
  Index input_dim = 0;
  Index output_dim = 0;
  std::function<std::vector<CMatrix>(double)> operators;
};

/// exp(L t) acting on column-stacked density matrices.
struct LiouvilleFamily {
  CMatrix generator;
  Index dim = 0;
};

struct MixtureFamily {
  std::vector<double> weights;
  std::vector<ChannelFamily> components;
};

/// rho -> sum_i q_i Phi_i[rho] (x) |i><i| on S (x) A.
struct DilatedFamily {
  std::vector<double> weights;
  std::vector<ChannelFamily> components;
};

/// rho_S -> Tr_{E_1..E_n}[U_t rho_S (x) rho_E1 (x) ... (x) rho_A U_t^dag].
struct MicroscopicFamily {
  Index system_dim = 0;
  std::vector<Index> env_dims;
  Index ancilla_dim = 0;
  CMatrix env_ancilla_state;
  EigenSystem spectrum;
};

/// A time-parameterized CPT map t -> Phi_t. Immutable; `apply` is a pure
/// function of (operator, t) and is linear in the operator.
class ChannelFamily {
 public:
  using Representation = std::variant<DephasingSemigroup, UnitaryFamily, KrausFamily, LiouvilleFamily,
                                      MixtureFamily, DilatedFamily, MicroscopicFamily>;

  static ChannelFamily dephasing(double gamma, double lambda) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma) || !std::isfinite(lambda)) {
      throw DomainError("dephasing: gamma must be finite and non-negative, lambda finite");
    }
    return ChannelFamily(DephasingSemigroup{gamma, lambda}, 2, 2);
  }

  static ChannelFamily unitary(const CMatrix& hamiltonian) {
    return reduced_unitary(hamiltonian, hamiltonian.rows(), QState(CMatrix::Identity(1, 1)));
  }

  /// Hamiltonian on S (x) E, environment started in `env_state`.
  static ChannelFamily reduced_unitary(const CMatrix& hamiltonian, Index system_dim, const QState& env_state) {
    require_square(hamiltonian, "reduced_unitary");
    if (system_dim <= 0 || hamiltonian.rows() != system_dim * env_state.dim()) {
      throw DimensionError("reduced_unitary: Hamiltonian dimension must equal system_dim * env_dim");
    }
    UnitaryFamily rep{hamiltonian, env_state.matrix(), system_dim, hermitian_eig(hamiltonian)};
    return ChannelFamily(std::move(rep), system_dim, system_dim);
  }

  static ChannelFamily identity(Index dim) { return unitary(CMatrix::Zero(dim, dim)); }

  static ChannelFamily kraus(Index input_dim, Index output_dim,
                             std::function<std::vector<CMatrix>(double)> operators) {
    if (input_dim <= 0 || output_dim <= 0 || !operators) {
      throw DimensionError("kraus: invalid dimensions or empty operator function");
    }
    return ChannelFamily(KrausFamily{input_dim, output_dim, std::move(operators)}, input_dim, output_dim);
  }

  static ChannelFamily liouville(const CMatrix& generator) {
    require_square(generator, "liouville");
    require_finite(generator, "liouville");
    const auto dim = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(generator.rows()))));
    if (dim * dim != generator.rows()) {
      throw DimensionError("liouville: generator dimension is not a perfect square");
    }
    return ChannelFamily(LiouvilleFamily{generator, dim}, dim, dim);
  }

  Index input_dim() const { return input_dim_; }
  Index output_dim() const { return output_dim_; }
  const Representation& representation() const { return rep_; }

  std::string kind() const {
    return std::visit(
        [](const auto& r) -> std::string {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, DephasingSemigroup>) return "dephasing";
          else if constexpr (std::is_same_v<R, UnitaryFamily>) return "unitary";
          else if constexpr (std::is_same_v<R, KrausFamily>) return "kraus";
          else if constexpr (std::is_same_v<R, LiouvilleFamily>) return "liouville";
          else if constexpr (std::is_same_v<R, MixtureFamily>) return "mixture";
          else if constexpr (std::is_same_v<R, DilatedFamily>) return "dilated";
          else return "microscopic";
        },
        rep_);
  }

  /// Phi_t[x] for an arbitrary (not necessarily positive) operator x.
  CMatrix apply(const CMatrix& x, double t) const {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw DomainError("ChannelFamily::apply: time must be finite and non-negative");
    }
    if (x.rows() != input_dim_ || x.cols() != input_dim_) {
      throw DimensionError("ChannelFamily::apply: operator is " + std::to_string(x.rows()) + "x" +
                           std::to_string(x.cols()) + ", family expects dimension " + std::to_string(input_dim_));
    }
    return std::visit([&](const auto& r) { return evaluate(r, x, t); }, rep_);
  }

  QState apply(const QState& rho, double t) const {
    const CMatrix out = apply(rho.matrix(), t);
    if (hermiticity_residual(out) > tol::spectral) {
      throw DomainError("ChannelFamily::apply: output lost Hermiticity");
    }
    return QState(0.5 * (out + out.adjoint()));
  }

 private:
  friend ChannelFamily mix(const MixtureSpec& spec);
  friend ChannelFamily dilate(const MixtureSpec& spec);
  friend ChannelFamily microscopic_family(const MicroscopicModel& model, Index dimension_cap);

  ChannelFamily(Representation rep, Index input_dim, Index output_dim)
      : rep_(std::move(rep)), input_dim_(input_dim), output_dim_(output_dim) {}

  static CMatrix evaluate(const DephasingSemigroup& r, const CMatrix& x, double t) {
    const Complex mu = r.multiplier(t);
    CMatrix out = x;
    out(1, 0) *= mu;
    out(0, 1) *= std::conj(mu);
    return out;
  }

  static CMatrix propagator(const EigenSystem& spectrum, double t) {
    const Index n = spectrum.vectors.rows();
    CVector phases(n);
    for (Index k = 0; k < n; ++k) {
      phases(k) = std::exp(Complex(0.0, -spectrum.values[static_cast<std::size_t>(k)] * t));
    }
    return spectrum.vectors * phases.asDiagonal() * spectrum.vectors.adjoint();
  }

  static CMatrix evaluate(const UnitaryFamily& r, const CMatrix& x, double t) {
    const CMatrix u = propagator(r.spectrum, t);
    if (r.env_state.rows() == 1) {
      return u * x * u.adjoint();
    }
    const CMatrix evolved = u * kron(x, r.env_state) * u.adjoint();
    return partial_trace(evolved, TensorLayout({r.system_dim, r.env_state.rows()}), {1});
  }

  static CMatrix evaluate(const KrausFamily& r, const CMatrix& x, double t) {
    CMatrix out = CMatrix::Zero(r.output_dim, r.output_dim);
    for (const auto& k : r.operators(t)) {
      if (k.rows() != r.output_dim || k.cols() != r.input_dim) {
        throw DimensionError("KrausFamily: operator has wrong shape");
      }
      out += k * x * k.adjoint();
    }
    return out;
  }

  static CMatrix evaluate(const LiouvilleFamily& r, const CMatrix& x, double t) {
    const CMatrix propagator = (r.generator * Complex(t)).exp();
    const CVector vec = Eigen::Map<const CVector>(x.data(), x.size());
    const CVector out = propagator * vec;
    return Eigen::Map<const CMatrix>(out.data(), r.dim, r.dim);
  }

  static CMatrix evaluate(const MixtureFamily& r, const CMatrix& x, double t) {
    CMatrix out = CMatrix::Zero(r.components.front().output_dim(), r.components.front().output_dim());
    for (std::size_t i = 0; i < r.components.size(); ++i) {
      out += r.weights[i] * r.components[i].apply(x, t);
    }
    return out;
  }

  static CMatrix evaluate(const DilatedFamily& r, const CMatrix& x, double t) {
    const Index d = r.components.front().output_dim();
    const auto n = static_cast<Index>(r.components.size());
    CMatrix out = CMatrix::Zero(d * n, d * n);
    for (Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const CMatrix block = r.weights[ui] * r.components[ui].apply(x, t);
      for (Index s = 0; s < d; ++s) {
        for (Index s2 = 0; s2 < d; ++s2) {
          out(s * n + i, s2 * n + i) = block(s, s2);
        }
      }
    }
    return out;
  }

  static CMatrix evaluate(const MicroscopicFamily& r, const CMatrix& x, double t) {
    const CMatrix u = propagator(r.spectrum, t);
    const CMatrix evolved = u * kron(x, r.env_ancilla_state) * u.adjoint();
    std::vector<Index> dims{r.system_dim};
    dims.insert(dims.end(), r.env_dims.begin(), r.env_dims.end());
    dims.push_back(r.ancilla_dim);
    std::vector<std::size_t> envs;
    for (std::size_t k = 1; k <= r.env_dims.size(); ++k) {
      envs.push_back(k);
    }
    return partial_trace(evolved, TensorLayout(dims), envs);
  }

  Representation rep_;
  Index input_dim_;
  Index output_dim_;
};

// ---------------------------------------------------------------------------
// alternative representations of the dephasing semigroup

/// Lindblad generator in the column-stacking convention:
/// L = -i[H, .] + sum_k r_k (J_k . J_k^dag - 1/2 {J_k^dag J_k, .}).
inline CMatrix lindblad_generator(const CMatrix& hamiltonian, const std::vector<std::pair<double, CMatrix>>& jumps) {
  require_square(hamiltonian, "lindblad_generator");
  const Index d = hamiltonian.rows();
  const CMatrix id = identity(d);
  CMatrix gen = Complex(0.0, -1.0) * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  for (const auto& [rate, jump] : jumps) {
    const CMatrix jj = jump.adjoint() * jump;
    gen += rate * (kron(jump.conjugate(), jump) - 0.5 * kron(id, jj) - 0.5 * kron(jj.transpose(), id));
  }
  return gen;
}

/// Same map as ChannelFamily::dephasing, generated by H = -(lambda/2) sigma_z
/// and a sigma_z jump at rate gamma/2.
inline ChannelFamily dephasing_liouville(double gamma, double lambda) {
  const CMatrix h = -0.5 * lambda * pauli_z();
  return ChannelFamily::liouville(lindblad_generator(h, {{0.5 * gamma, pauli_z()}}));
}

inline ChannelFamily dephasing_kraus(double gamma, double lambda) {
  return ChannelFamily::kraus(2, 2, [gamma, lambda](double t) {
    const double decay = std::exp(-gamma * t);
    const CMatrix u = unitary_exp(-0.5 * lambda * pauli_z(), t);
    return std::vector<CMatrix>{std::sqrt(0.5 * (1.0 + decay)) * u, std::sqrt(0.5 * (1.0 - decay)) * pauli_z() * u};
  });
}

// ---------------------------------------------------------------------------
// mixtures and dilation

/// Probability weights q_i with component families of a common input and
/// output dimension.
class MixtureSpec {
 public:
  MixtureSpec(std::vector<double> weights, std::vector<ChannelFamily> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) {
      throw std::invalid_argument("MixtureSpec: empty component list");
    }
    if (weights_.size() != components_.size()) {
      throw std::invalid_argument("MixtureSpec: weight count differs from component count");
    }
    double sum = 0.0;
    for (double q : weights_) {
      if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("MixtureSpec: weights must be finite and non-negative");
      }
      sum += q;
    }
    if (std::abs(sum - 1.0) > tol::exact) {
      throw std::invalid_argument("MixtureSpec: weights must sum to 1");
    }
    for (const auto& c : components_) {
      if (c.input_dim() != components_.front().input_dim() || c.output_dim() != components_.front().output_dim()) {
        throw DimensionError("MixtureSpec: components have different dimensions");
      }
    }
  }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<ChannelFamily>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  Index system_dim() const { return components_.front().input_dim(); }

  /// rho_A = sum_i q_i |i><i|.
  QState ancilla_state() const {
    CMatrix rho = CMatrix::Zero(static_cast<Index>(size()), static_cast<Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
      rho(static_cast<Index>(i), static_cast<Index>(i)) = weights_[i];
    }
    return QState(rho);
  }

 private:
  std::vector<double> weights_;
  std::vector<ChannelFamily> components_;
};

inline ChannelFamily mix(const MixtureSpec& spec) {
  if (spec.size() == 1) {
    return spec.components().front();
  }
  const Index out = spec.components().front().output_dim();
  return ChannelFamily(MixtureFamily{spec.weights(), spec.components()}, spec.system_dim(), out);
}

inline ChannelFamily dilate(const MixtureSpec& spec) {
  const Index out = spec.components().front().output_dim() * static_cast<Index>(spec.size());
  return ChannelFamily(DilatedFamily{spec.weights(), spec.components()}, spec.system_dim(), out);
}

// ---------------------------------------------------------------------------
// microscopic model

/// System coupled to n environments through H = sum_i H_i (x) Pi_i, where
/// H_i acts on S (x) E_i and Pi_i projects the ancilla onto |i>. The ancilla
/// starts in sum_i q_i Pi_i.
struct MicroscopicModel {
  Index system_dim = 0;
  std::vector<Index> env_dims;
  std::vector<CMatrix> hamiltonians;
  std::vector<QState> env_states;
  std::vector<double> weights;

  std::size_t components() const { return hamiltonians.size(); }

  void validate() const {
    const std::size_t n = hamiltonians.size();
    if (n == 0) {
      throw std::invalid_argument("MicroscopicModel: no components");
    }
    if (env_dims.size() != n || env_states.size() != n || weights.size() != n) {
      throw DimensionError("MicroscopicModel: per-component lists have different lengths");
    }
    if (system_dim <= 0) {
      throw DimensionError("MicroscopicModel: system_dim must be positive");
    }
    for (std::size_t i = 0; i < n; ++i) {
      require_square(hamiltonians[i], "MicroscopicModel");
      if (hamiltonians[i].rows() != system_dim * env_dims[i]) {
        throw DimensionError("MicroscopicModel: H_" + std::to_string(i + 1) + " must act on S (x) E_" +
                             std::to_string(i + 1));
      }
      if (!is_hermitian(hamiltonians[i])) {
        throw DomainError("MicroscopicModel: H_" + std::to_string(i + 1) + " is not Hermitian");
      }
      if (env_states[i].dim() != env_dims[i]) {
        throw DimensionError("MicroscopicModel: environment state dimension mismatch");
      }
    }
    // MixtureSpec performs the weight checks.
    (void)component_spec();
  }

  /// S, E_1, ..., E_n, A.
  TensorLayout layout() const {
    std::vector<Index> dims{system_dim};
    dims.insert(dims.end(), env_dims.begin(), env_dims.end());
    dims.push_back(static_cast<Index>(components()));
    return TensorLayout(dims);
  }

  /// H_i (x) Pi_i embedded in the full space.
  CMatrix coupling_term(std::size_t i) const {
    const auto n = static_cast<Index>(components());
    const TensorLayout full = layout();
    const CMatrix local = kron(hamiltonians.at(i), basis_projector(n, static_cast<Index>(i)));
    return embed(local, full, {0, i + 1, components() + 1});
  }

  CMatrix total_hamiltonian() const {
    const Index dim = layout().total();
    CMatrix h = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < components(); ++i) {
      h += coupling_term(i);
    }
    return h;
  }

  /// The component maps Phi_i[rho] = Tr_{E_i}[U_i (rho (x) rho_Ei) U_i^dag].
  MixtureSpec component_spec() const {
    std::vector<ChannelFamily> fams;
    for (std::size_t i = 0; i < components(); ++i) {
      fams.push_back(ChannelFamily::reduced_unitary(hamiltonians[i], system_dim, env_states[i]));
    }
    return MixtureSpec(weights, std::move(fams));
  }
};

inline constexpr Index default_dimension_cap = 256;

inline ChannelFamily microscopic_family(const MicroscopicModel& model, Index dimension_cap = default_dimension_cap) {
  model.validate();
  const Index total = model.layout().total();
  if (total > dimension_cap) {
    throw DimensionError("microscopic_family: total dimension " + std::to_string(total) + " exceeds cap " +
                         std::to_string(dimension_cap));
  }
  std::vector<CMatrix> env_factors;
  for (const auto& s : model.env_states) {
    env_factors.push_back(s.matrix());
  }
  env_factors.push_back(model.component_spec().ancilla_state().matrix());
  MicroscopicFamily rep{model.system_dim, model.env_dims, static_cast<Index>(model.components()), kron(env_factors),
                        hermitian_eig(model.total_hamiltonian())};
  const Index out = model.system_dim * static_cast<Index>(model.components());
  return ChannelFamily(std::move(rep), model.system_dim, out);
}

/// prod_i exp(-i H_i (x) Pi_i t); equals exp(-i H t) because the terms commute.
inline CMatrix factorized_propagator(const MicroscopicModel& model, double t) {
  const Index dim = model.layout().total();
  CMatrix u = identity(dim);
  for (std::size_t i = 0; i < model.components(); ++i) {
    u = u * unitary_exp(model.coupling_term(i), t);
  }
  return u;
}

// ---------------------------------------------------------------------------
// complete positivity check

struct CptSample {
  double t = 0.0;
  double trace_residual = 0.0;
  double min_choi_eigenvalue = 0.0;
};

struct CptReport {
  std::vector<CptSample> samples;
  double worst_trace_residual = 0.0;
  double worst_min_eigenvalue = 0.0;

  bool passed(double eigen_tolerance = 1e-9, double trace_tolerance = tol::spectral) const {
    return worst_min_eigenvalue >= -eigen_tolerance && worst_trace_residual <= trace_tolerance;
  }
};

/// Choi matrix sum_jk |j><k| (x) Phi_t[|j><k|].
inline CMatrix choi_matrix(const ChannelFamily& family, double t) {
  const Index d = family.input_dim();
  const Index out = family.output_dim();
  CMatrix choi = CMatrix::Zero(d * out, d * out);
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      choi.block(j * out, k * out, out, out) = family.apply(matrix_unit(d, j, k), t);
    }
  }
  return choi;
}

inline CptReport verify_cpt(const ChannelFamily& family, const std::vector<double>& times) {
  CptReport report;
  report.worst_min_eigenvalue = std::numeric_limits<double>::infinity();
  const Index d = family.input_dim();
  for (double t : times) {
    CptSample s{t, 0.0, 0.0};
    for (Index j = 0; j < d; ++j) {
      for (Index k = 0; k < d; ++k) {
        const Complex tr = family.apply(matrix_unit(d, j, k), t).trace();
        s.trace_residual = std::max(s.trace_residual, std::abs(tr - Complex(j == k ? 1.0 : 0.0)));
      }
    }
    const CMatrix choi = choi_matrix(family, t);
    s.min_choi_eigenvalue = hermitian_eigenvalues(choi).back();
    report.worst_trace_residual = std::max(report.worst_trace_residual, s.trace_residual);
    report.worst_min_eigenvalue = std::min(report.worst_min_eigenvalue, s.min_choi_eigenvalue);
    report.samples.push_back(s);
  }
  if (report.samples.empty()) {
    report.worst_min_eigenvalue = 0.0;
  }
  return report;
}

}  // namespace mixchan

#endif  // MIXCHAN_CHANNELS_HPP
