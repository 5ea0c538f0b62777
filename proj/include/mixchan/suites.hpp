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


#ifndef MIXCHAN_SUITES_HPP
#define MIXCHAN_SUITES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "mixchan/channels.hpp"
#include "mixchan/distinguish.hpp"
#include "mixchan/infoflow.hpp"
#include "mixchan/nonmarkov.hpp"
#include "mixchan/parallel.hpp"
#include "mixchan/qmath.hpp"
#include "mixchan/random.hpp"
#include "mixchan/scenario.hpp"

namespace mixchan {

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed violation measure
  double tolerance = 0.0;

  bool passed() const { return failures == 0 && instances > 0; }

  void observe(double value, bool ok) {
    ++instances;
    worst = std::max(worst, value);
    if (!ok) {
      ++failures;
    }
  }
  void observe(double value) { observe(value, value <= tolerance); }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }
  std::size_t failed_checks() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed(); }));
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"cpt",    "additivity", "subadditivity", "lemma",
                                              "bounds", "microscopic", "montecarlo"};
  return names;
}

// ---------------------------------------------------------------------------
// random instances

/// Weights from normalized exponentials; n components.
inline std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) {
    x = e(rng);
    sum += x;
  }
  for (auto& x : w) {
    x /= sum;
  }
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    rest -= w[i];
  }
  w.back() = rest;
  return w;
}

/// Mixture of n dephasing semigroups, gamma in [0, 1], lambda in [-2 pi, 2 pi].
inline MixtureSpec random_dephasing_mixture(std::size_t n, Rng& rng) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<ChannelFamily> comps;
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = uniform01(rng);
    const double lambda = two_pi * (2.0 * uniform01(rng) - 1.0);
    comps.push_back(ChannelFamily::dephasing(gamma, lambda));
  }
  return MixtureSpec(random_weights(n, rng), std::move(comps));
}

/// Qubit coupled to a qubit environment by a random Hamiltonian; usually
/// non-Markovian.
inline ChannelFamily random_reduced_unitary(Rng& rng) {
  return ChannelFamily::reduced_unitary(random_hermitian(4, rng), 2, random_pure_state(2, rng));
}

inline MicroscopicModel random_microscopic_model(Rng& rng) {
  MicroscopicModel m;
  m.system_dim = 2;
  const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 2.0);  // 2 or 3
  for (std::size_t i = 0; i < n; ++i) {
    const Index e = uniform01(rng) < 0.5 ? 1 : 2;
    m.env_dims.push_back(e);
    m.hamiltonians.push_back(random_hermitian(m.system_dim * e, rng));
    m.env_states.push_back(random_mixed_state(e, rng));
  }
  m.weights = random_weights(n, rng);
  return m;
}

inline std::vector<double> sample_times(double start, double end, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) {
    t[k] = start + (end - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return t;
}

// ---------------------------------------------------------------------------
// suites

inline SuiteReport suite_cpt(std::uint64_t seed) {
  SuiteReport rep{"cpt", {}};
  const auto times = sample_times(0.0, 10.0, 20);
  CheckResult positivity{"choi-positivity", 0, 0, 0.0, 1e-9};
  CheckResult trace{"trace-preservation", 0, 0, 0.0, tol::spectral};
  const auto record = [&](const ChannelFamily& f) {
    const auto r = verify_cpt(f, times);
    positivity.observe(std::max(0.0, -r.worst_min_eigenvalue));
    trace.observe(r.worst_trace_residual);
  };
  for (const auto& p : presets()) {
    const Scenario sc = scenario_from_json(p.config);
    for (const auto& c : sc.mixture.components()) {
      record(c);
    }
    record(mix(sc.mixture));
    record(dilate(sc.mixture));
  }
  record(dephasing_kraus(1.0 / 3.0, std::numbers::pi / 2.0));
  record(dephasing_liouville(1.0 / 3.0, std::numbers::pi / 2.0));
  Rng rng = stream_engine(seed, 0);
  for (int k = 0; k < 5; ++k) {
    record(microscopic_family(random_microscopic_model(rng)));
  }
  rep.checks = {positivity, trace};
  return rep;
}

/// ||Lambda_t[X]|| = sum_i q_i ||Phi_i,t[X]|| for traceless Hermitian X.
inline SuiteReport suite_additivity(std::uint64_t seed, std::size_t cases = 200) {
  SuiteReport rep{"additivity", {}};
  CheckResult c{"dilated-norm-equals-weighted-norms", 0, 0, 0.0, 1e-10};
  Rng rng = stream_engine(seed, 1);
  for (std::size_t k = 0; k < cases; ++k) {
    const std::size_t n = 2 + k % 3;
    const MixtureSpec spec = random_dephasing_mixture(n, rng);
    CMatrix x = random_hermitian(2, rng);
    x -= (x.trace() / 2.0) * identity(2);
    x /= trace_norm(x);
    const double t = 10.0 * uniform01(rng);
    const double lhs = trace_norm(dilate(spec).apply(x, t));
    double rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      rhs += spec.weights()[i] * trace_norm(spec.components()[i].apply(x, t));
    }
    c.observe(std::abs(lhs - rhs));
  }
  rep.checks = {c};
  return rep;
}

/// Half the cases mix dephasing semigroups (Markovian components), the
/// other half mix random system-environment unitaries.
inline SuiteReport suite_subadditivity(std::uint64_t seed, Parallelism par = {}, std::size_t cases = 20,
                                       double step = 2e-2, double horizon = 12.0) {
  SuiteReport rep{"subadditivity", {}};
  CheckResult holds{"dilated-at-most-weighted-sum", 0, 0, 0.0, 1e-6};
  CheckResult markov{"markovian-components-give-zero", 0, 0, 0.0, 1e-6};
  Rng rng = stream_engine(seed, 2);
  const TimeGrid grid = TimeGrid::uniform(0.0, horizon, step);
  SearchConfig cfg;
  cfg.seed = seed;
  cfg.par = par;
  cfg.polar_points = 5;
  cfg.azimuth_points = 6;
  cfg.refine_rounds = 1;
  cfg.golden_iterations = 25;
  for (std::size_t k = 0; k < cases; ++k) {
    const std::size_t n = 2 + k % 2;
    std::vector<ChannelFamily> comps;
    const bool markovian = k % 2 == 0;
    if (markovian) {
      comps = random_dephasing_mixture(n, rng).components();
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        comps.push_back(random_reduced_unitary(rng));
      }
    }
    const MixtureSpec spec(random_weights(n, rng), comps);
    const auto r = verify_subadditivity(spec, grid, cfg);
    holds.observe(std::max(0.0, r.dilated_value - r.weighted_sum), r.holds);
    if (r.components_markovian) {
      markov.observe(r.dilated_value);
    }
  }
  rep.checks = {holds, markov};
  return rep;
}

inline SuiteReport suite_lemma(std::uint64_t seed, std::size_t cases = 500) {
  SuiteReport rep{"lemma", {}};
  CheckResult equality{"two-component-equality", 0, 0, 0.0, tol::exact};
  CheckResult bound{"many-component-bound", 0, 0, 0.0, tol::exact};
  Rng rng = stream_engine(seed, 3);
  for (std::size_t k = 0; k < cases; ++k) {
    const Index d = 2 + static_cast<Index>(k % 2);
    const std::vector<QState> states{random_mixed_state(d, rng), random_mixed_state(d, rng)};
    const auto r = marginals_lemma_check(random_weights(2, rng), states);
    equality.observe(r.equality_residual);
  }
  for (std::size_t k = 0; k < cases; ++k) {
    const std::size_t n = 3 + k % 2;
    std::vector<QState> states;
    for (std::size_t i = 0; i < n; ++i) {
      states.push_back(random_mixed_state(2, rng));
    }
    const auto r = marginals_lemma_check(random_weights(n, rng), states);
    bound.observe(std::max(0.0, r.lhs - r.rhs), r.bound_holds);
  }
  rep.checks = {equality, bound};
  return rep;
}

inline SuiteReport suite_bounds(std::uint64_t seed, Parallelism par = {}, std::size_t cases = 100) {
  SuiteReport rep{"bounds", {}};
  CheckResult ext{"external-information-non-negative", 0, 0, 0.0, tol::exact};
  CheckResult start{"external-information-zero-at-start", 0, 0, 0.0, tol::exact};
  CheckResult corr{"external-below-correlation-bound", 0, 0, 0.0, tol::spectral};
  CheckResult success{"dilation-success-at-least-mixture", 0, 0, 0.0, tol::exact};
  Rng rng = stream_engine(seed, 4);
  const TimeGrid grid = TimeGrid::uniform(0.0, 10.0, 0.05);
  for (std::size_t k = 0; k < cases; ++k) {
    const std::size_t n = 2 + k % 3;
    const MixtureSpec spec = k % 2 == 0 ? random_dephasing_mixture(n, rng)
                                        : MixtureSpec(random_weights(n, rng), [&] {
                                            std::vector<ChannelFamily> c;
                                            for (std::size_t i = 0; i < n; ++i) c.push_back(random_reduced_unitary(rng));
                                            return c;
                                          }());
    const HelstromEnsemble ens(uniform01(rng), random_mixed_state(2, rng), random_mixed_state(2, rng));
    const auto s = info_flow(spec, ens, grid, par);
    const auto inv = check_invariants(s);
    ext.observe(inv.max_ext_negativity);
    start.observe(inv.ext_at_start);
    corr.observe(std::max(0.0, inv.max_bound_violation));
    const ChannelFamily m = mix(spec);
    const ChannelFamily l = dilate(spec);
    const CMatrix delta = ens.helstrom_matrix();
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); j += 20) {
      const double pm = 0.5 * (1.0 + trace_norm(m.apply(delta, grid[j])));
      const double pl = 0.5 * (1.0 + trace_norm(l.apply(delta, grid[j])));
      worst = std::max(worst, pm - pl);
    }
    success.observe(std::max(0.0, worst));
  }
  rep.checks = {ext, start, corr, success};
  return rep;
}

inline SuiteReport suite_microscopic(std::uint64_t seed, std::size_t models = 50) {
  SuiteReport rep{"microscopic", {}};
  CheckResult dil{"reduced-dynamics-equals-dilation", 0, 0, 0.0, 1e-10};
  CheckResult marg{"ancilla-trace-equals-mixture", 0, 0, 0.0, 1e-10};
  CheckResult fac{"propagator-factorizes", 0, 0, 0.0, 1e-10};
  Rng rng = stream_engine(seed, 5);
  const auto times = sample_times(0.0, 10.0, 20);
  for (std::size_t k = 0; k < models; ++k) {
    const MicroscopicModel model = random_microscopic_model(rng);
    const MixtureSpec spec = model.component_spec();
    const ChannelFamily micro = microscopic_family(model);
    const ChannelFamily lam = dilate(spec);
    const ChannelFamily phi = mix(spec);
    const QState rho = random_mixed_state(2, rng);
    const TensorLayout sa({2, static_cast<Index>(spec.size())});
    const CMatrix h = model.total_hamiltonian();
    double w_dil = 0.0;
    double w_marg = 0.0;
    double w_fac = 0.0;
    for (double t : times) {
      const CMatrix out = micro.apply(rho.matrix(), t);
      w_dil = std::max(w_dil, max_abs(out - lam.apply(rho.matrix(), t)));
      w_marg = std::max(w_marg, max_abs(partial_trace(out, sa, {1}) - phi.apply(rho.matrix(), t)));
      w_fac = std::max(w_fac, max_abs(unitary_exp(h, t) - factorized_propagator(model, t)));
    }
    dil.observe(w_dil);
    marg.observe(w_marg);
    fac.observe(w_fac);
  }
  rep.checks = {dil, marg, fac};
  return rep;
}

inline SuiteReport suite_montecarlo(std::uint64_t seed, Parallelism par = {}, std::uint64_t trials = 100000) {
  SuiteReport rep{"montecarlo", {}};
  CheckResult c{"empirical-rate-within-4-sigma", 0, 0, 0.0, 4.0};
  const Scenario sc = scenario_from_json(find_preset("appendix-worked-example").config);
  const ChannelFamily m = mix(sc.mixture);
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    const auto r = monte_carlo_discriminate(sc.ensemble, m, t, trials, seed, par);
    const double sd = std::sqrt(r.analytic_pmax * (1.0 - r.analytic_pmax) / static_cast<double>(trials));
    const double dev = std::abs(r.empirical_rate - r.analytic_pmax);
    // deviation in units of the binomial standard deviation
    c.observe(sd > 0.0 ? dev / sd : (dev == 0.0 ? 0.0 : INFINITY), sd > 0.0 ? dev <= 4.0 * sd : dev == 0.0);
  }
  rep.checks = {c};
  return rep;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed, Parallelism par = {}) {
  if (name == "cpt") return suite_cpt(seed);
  if (name == "additivity") return suite_additivity(seed);
  if (name == "subadditivity") return suite_subadditivity(seed, par);
  if (name == "lemma") return suite_lemma(seed);
  if (name == "bounds") return suite_bounds(seed, par);
  if (name == "microscopic") return suite_microscopic(seed);
  if (name == "montecarlo") return suite_montecarlo(seed, par);
  throw ConfigError("unknown suite '" + name + "'");
}

inline void print_report(std::ostream& os, const SuiteReport& rep) {
  char buf[256];
  for (const auto& c : rep.checks) {
    std::snprintf(buf, sizeof buf, "[%s] %s/%s  instances=%zu failures=%zu worst=%.3e tolerance=%.1e\n",
                  c.passed() ? "PASS" : "FAIL", rep.suite.c_str(), c.name.c_str(), c.instances, c.failures, c.worst,
                  c.tolerance);
    os << buf;
  }
  os << rep.suite << ": " << rep.checks.size() - rep.failed_checks() << "/" << rep.checks.size()
     << " checks passed\n";
}

}  // namespace mixchan

#endif  // MIXCHAN_SUITES_HPP
