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


#ifndef MIXCHAN_INFOFLOW_HPP
#define MIXCHAN_INFOFLOW_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mixchan/channels.hpp"
#include "mixchan/distinguish.hpp"
#include "mixchan/nonmarkov.hpp"
#include "mixchan/parallel.hpp"
#include "mixchan/qmath.hpp"

namespace mixchan {

/// Internal, external and total information with the system-ancilla
/// correlation bound, sampled on a grid.
struct InfoFlowSeries {
  TimeGrid grid;
  std::vector<double> i_int;
  std::vector<double> i_ext;
  std::vector<double> i_tot;
  std::vector<double> corr_bound;
};

inline void require_spec_dim(const MixtureSpec& spec, Index dim, const char* what) {
  if (spec.system_dim() != dim) {
    throw DimensionError(std::string(what) + ": state dimension differs from the mixture's system dimension");
  }
}

/// ||Lambda_t[rho] - Phi_t[rho] (x) rho_A||: distance of the dilated state
/// from the product of its marginals, unnormalized.
inline double correlation_norm(const ChannelFamily& mixed, const ChannelFamily& dilated, const CMatrix& rho_a,
                               const CMatrix& rho, double t) {
  return trace_norm(dilated.apply(rho, t) - kron(mixed.apply(rho, t), rho_a));
}

/// D(Lambda_t[rho], Phi_t[rho] (x) rho_A).
inline double correlation_bound(const MixtureSpec& spec, const QState& rho, double t) {
  require_spec_dim(spec, rho.dim(), "correlation_bound");
  return 0.5 * correlation_norm(mix(spec), dilate(spec), spec.ancilla_state().matrix(), rho.matrix(), t);
}

/// I_int = ||Phi_t[Delta]||, I_tot = ||Lambda_t[Delta]||, I_ext = I_tot - I_int
/// and the bound p1 ||Lambda rho1 - Phi rho1 (x) rho_A|| + p2 (same for rho2).
/// With p1 = p2 = 1/2 these are the trace-distance quantities and the bound
/// is the sum of the two correlation distances.
inline InfoFlowSeries info_flow(const MixtureSpec& spec, const HelstromEnsemble& ensemble, const TimeGrid& grid,
                                Parallelism par = {}) {
  require_spec_dim(spec, ensemble.dim(), "info_flow");
  const ChannelFamily mixed = mix(spec);
  const ChannelFamily dilated = dilate(spec);
  const CMatrix rho_a = spec.ancilla_state().matrix();
  const CMatrix delta = ensemble.helstrom_matrix();
  InfoFlowSeries s{grid, {}, {}, {}, {}};
  const std::size_t n = grid.size();
  s.i_int.resize(n);
  s.i_ext.resize(n);
  s.i_tot.resize(n);
  s.corr_bound.resize(n);
  parallel_for(n, par, [&](std::size_t k) {
    const double t = grid[k];
    s.i_int[k] = trace_norm(mixed.apply(delta, t));
    s.i_tot[k] = trace_norm(dilated.apply(delta, t));
    s.i_ext[k] = s.i_tot[k] - s.i_int[k];
    s.corr_bound[k] = ensemble.p1() * correlation_norm(mixed, dilated, rho_a, ensemble.rho1().matrix(), t) +
                      ensemble.p2() * correlation_norm(mixed, dilated, rho_a, ensemble.rho2().matrix(), t);
  });
  return s;
}

inline InfoFlowSeries info_flow(const MixtureSpec& spec, const QState& rho1, const QState& rho2,
                                const TimeGrid& grid, Parallelism par = {}) {
  return info_flow(spec, HelstromEnsemble::equal(rho1, rho2), grid, par);
}

struct InfoFlowInvariants {
  double max_ext_negativity = 0.0;   // max(-i_ext)
  double ext_at_start = 0.0;         // |i_ext[0]|
  double max_bound_violation = 0.0;  // max(i_ext - corr_bound)

  bool passed() const {
    return max_ext_negativity <= tol::exact && ext_at_start <= tol::exact && max_bound_violation <= tol::spectral;
  }
};

inline InfoFlowInvariants check_invariants(const InfoFlowSeries& s) {
  InfoFlowInvariants inv;
  inv.ext_at_start = std::abs(s.i_ext.front());
  for (std::size_t k = 0; k < s.i_ext.size(); ++k) {
    inv.max_ext_negativity = std::max(inv.max_ext_negativity, -s.i_ext[k]);
    inv.max_bound_violation = std::max(inv.max_bound_violation, s.i_ext[k] - s.corr_bound[k]);
  }
  return inv;
}

// ---------------------------------------------------------------------------
// marginals lemma

struct LemmaReport {
  double lhs = 0.0;  // D(rho_SA, rho_S (x) rho_A)
  double rhs = 0.0;  // 2 sum_{i>j} q_i q_j D(rho_i, rho_j)
  bool bound_holds = false;
  /// |lhs - rhs|; the two agree for two components.
  double equality_residual = 0.0;
  bool equality_expected = false;

  bool passed(double tolerance = tol::exact) const {
    return bound_holds && (!equality_expected || equality_residual <= tolerance);
  }
};

/// Builds rho_SA = sum_i q_i rho_i (x) Pi_i and compares its distance from
/// the product of marginals with the pairwise bound.
inline LemmaReport marginals_lemma_check(const std::vector<double>& weights, const std::vector<QState>& states) {
  if (weights.empty() || weights.size() != states.size()) {
    throw std::invalid_argument("marginals_lemma_check: need one weight per state");
  }
  double sum = 0.0;
  for (double q : weights) {
    if (!(q >= 0.0)) {
      throw std::invalid_argument("marginals_lemma_check: weights must be non-negative");
    }
    sum += q;
  }
  if (std::abs(sum - 1.0) > tol::exact) {
    throw std::invalid_argument("marginals_lemma_check: weights must sum to 1");
  }
  const Index d = states.front().dim();
  const auto n = static_cast<Index>(states.size());
  CMatrix rho_sa = CMatrix::Zero(d * n, d * n);
  CMatrix rho_s = CMatrix::Zero(d, d);
  CMatrix rho_a = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (states[ui].dim() != d) {
      throw DimensionError("marginals_lemma_check: states have different dimensions");
    }
    rho_sa += weights[ui] * kron(states[ui].matrix(), basis_projector(n, i));
    rho_s += weights[ui] * states[ui].matrix();
    rho_a(i, i) = weights[ui];
  }
  LemmaReport r;
  r.lhs = trace_distance(rho_sa, kron(rho_s, rho_a));
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      r.rhs += 2.0 * weights[i] * weights[j] * trace_distance(states[i], states[j]);
    }
  }
  r.bound_holds = r.lhs <= r.rhs + tol::exact;
  r.equality_expected = states.size() == 2;
  r.equality_residual = std::abs(r.lhs - r.rhs);
  return r;
}

// ---------------------------------------------------------------------------
// flow balance

struct FlowBalanceReport {
  bool precondition_met = false;  // every component monotone on the grid
  std::vector<bool> component_monotone;
  bool unitary_case = false;      // all components dephasing with gamma = 0
  double max_total_rate = 0.0;    // max over interior points of d/dt (I_int + I_ext)
  double max_abs_total_rate = 0.0;
  double total_variation = 0.0;   // max |I_tot(t) - I_tot(t_0)|
  std::size_t backflow_points = 0;          // interior points with dI_int/dt > 0
  std::size_t backflow_with_ext_loss = 0;   // ... of which dI_ext/dt < 0
  bool passed = false;
  std::vector<std::string> messages;
};

/// For Markovian components, d/dt (I_int + I_ext) <= 0 and every backflow of
/// internal information is paid for by external information. For unitary
/// components I_tot is constant and the two rates cancel.
inline FlowBalanceReport flow_balance_check(const MixtureSpec& spec, const HelstromEnsemble& ensemble,
                                            const TimeGrid& grid, Parallelism par = {}) {
  FlowBalanceReport r;
  const TimeGrid g = kink_aware(grid, mix(spec));
  if (g.size() < 3) {
    r.messages.emplace_back("grid needs at least three points");
    return r;
  }
  r.precondition_met = true;
  for (const auto& c : spec.components()) {
    const auto d = distinguishability_series(c, ensemble, g, par);
    bool monotone = true;
    for (std::size_t k = 1; k < d.size(); ++k) {
      monotone = monotone && d[k] <= d[k - 1] + tol::exact;
    }
    r.component_monotone.push_back(monotone);
    r.precondition_met = r.precondition_met && monotone;
  }
  if (!r.precondition_met) {
    r.messages.emplace_back("precondition violated: a component is not monotone on the grid");
  }
  r.unitary_case = std::all_of(spec.components().begin(), spec.components().end(), [](const ChannelFamily& c) {
    const auto* dep = std::get_if<DephasingSemigroup>(&c.representation());
    return (dep != nullptr && dep->gamma == 0.0) || std::holds_alternative<UnitaryFamily>(c.representation());
  });

  const auto s = info_flow(spec, ensemble, g, par);
  std::vector<double> total(s.i_tot.size());
  for (std::size_t k = 0; k < total.size(); ++k) {
    total[k] = s.i_int[k] + s.i_ext[k];
    r.total_variation = std::max(r.total_variation, std::abs(s.i_tot[k] - s.i_tot.front()));
  }
  const auto rate_total = finite_difference(total, g);
  const auto rate_int = finite_difference(s.i_int, g);
  const auto rate_ext = finite_difference(s.i_ext, g);
  r.max_total_rate = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < g.size(); ++k) {
    r.max_total_rate = std::max(r.max_total_rate, rate_total[k]);
    r.max_abs_total_rate = std::max(r.max_abs_total_rate, std::abs(rate_total[k]));
    if (rate_int[k] > 1e-8) {
      ++r.backflow_points;
      if (rate_ext[k] < 0.0) {
        ++r.backflow_with_ext_loss;
      }
    }
  }
  bool ok = r.precondition_met;
  if (r.max_total_rate > 1e-8) {
    ok = false;
    r.messages.emplace_back("total information increases somewhere on the grid");
  }
  if (r.backflow_with_ext_loss != r.backflow_points) {
    ok = false;
    r.messages.emplace_back("internal backflow without matching external loss");
  }
  if (r.unitary_case) {
    if (r.total_variation > tol::spectral) {
      ok = false;
      r.messages.emplace_back("unitary components but total information is not constant");
    }
    if (r.max_abs_total_rate > 1e-8) {
      ok = false;
      r.messages.emplace_back("unitary components but internal and external rates do not cancel");
    }
  }
  r.passed = ok;
  return r;
}

}  // namespace mixchan

#endif  // MIXCHAN_INFOFLOW_HPP
