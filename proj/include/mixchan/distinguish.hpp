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


#ifndef MIXCHAN_DISTINGUISH_HPP
#define MIXCHAN_DISTINGUISH_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mixchan/channels.hpp"
#include "mixchan/parallel.hpp"
#include "mixchan/qmath.hpp"
#include "mixchan/random.hpp"

namespace mixchan {

/// Two states prepared with probabilities p1 and p2 = 1 - p1. The Helstrom
/// matrix p1 rho1 - p2 rho2 governs optimal discrimination.
class HelstromEnsemble {
 public:
  HelstromEnsemble(double p1, QState rho1, QState rho2) : p1_(p1), rho1_(std::move(rho1)), rho2_(std::move(rho2)) {
    if (!(p1 >= 0.0 && p1 <= 1.0)) {
      throw std::invalid_argument("HelstromEnsemble: p1 must lie in [0, 1]");
    }
    if (rho1_.dim() != rho2_.dim()) {
      throw DimensionError("HelstromEnsemble: states have different dimensions");
    }
  }

  static HelstromEnsemble equal(QState rho1, QState rho2) { return {0.5, std::move(rho1), std::move(rho2)}; }

  double p1() const { return p1_; }
  double p2() const { return 1.0 - p1_; }
  const QState& rho1() const { return rho1_; }
  const QState& rho2() const { return rho2_; }
  Index dim() const { return rho1_.dim(); }

  CMatrix helstrom_matrix() const { return p1() * rho1_.matrix() - p2() * rho2_.matrix(); }

  HelstromEnsemble swapped() const { return {p2(), rho2_, rho1_}; }

 private:
  double p1_;
  QState rho1_;
  QState rho2_;
};

namespace detail {

// Lexicographic order on entries; used to make D(a, b) and D(b, a) bitwise
// equal by always differencing in the same order.
inline bool entrywise_less(const CMatrix& a, const CMatrix& b) {
  for (Index k = 0; k < a.size(); ++k) {
    const Complex x = a.data()[k];
    const Complex y = b.data()[k];
    if (x.real() != y.real()) {
      return x.real() < y.real();
    }
    if (x.imag() != y.imag()) {
      return x.imag() < y.imag();
    }
  }
  return false;
}

}  // namespace detail

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace_distance: operands have different dimensions");
  }
  return detail::entrywise_less(a, b) ? 0.5 * trace_norm(b - a) : 0.5 * trace_norm(a - b);
}

inline double trace_distance(const QState& rho1, const QState& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw DimensionError("trace_distance: states have different dimensions");
  }
  return trace_distance(rho1.matrix(), rho2.matrix());
}

/// ||p1 rho1 - p2 rho2||_1.
inline double helstrom_norm(const HelstromEnsemble& ensemble) { return trace_norm(ensemble.helstrom_matrix()); }

inline void require_family_dim(const ChannelFamily& family, const HelstromEnsemble& ensemble, const char* what) {
  if (family.input_dim() != ensemble.dim()) {
    throw DimensionError(std::string(what) + ": family input dimension differs from the ensemble dimension");
  }
}

/// Optimal guessing probability 1/2 (1 + ||Phi_t[Delta]||) after the states
/// passed through the family.
inline double p_max(const HelstromEnsemble& ensemble, const ChannelFamily& family, double t) {
  require_family_dim(family, ensemble, "p_max");
  return 0.5 * (1.0 + trace_norm(family.apply(ensemble.helstrom_matrix(), t)));
}

/// Projector onto the strictly positive eigenspace of `delta`: measuring it
/// and guessing state 1 on the positive outcome is optimal. Eigenvalues within
/// 1e-12 of zero go to the complement (guess state 2).
inline CMatrix optimal_measurement(const CMatrix& delta) {
  const auto eig = hermitian_eig(delta);
  const Index n = delta.rows();
  CMatrix projector = CMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    if (eig.values[static_cast<std::size_t>(k)] > tol::exact) {
      projector += eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    }
  }
  return projector;
}

struct DiscriminationResult {
  double analytic_pmax = 0.0;
  double empirical_rate = 0.0;
  std::uint64_t trials = 0;
  double std_error = 0.0;
};

/// Simulated discrimination game: each trial draws a preparation label,
/// measures the Helstrom projector on the evolved state with exact Born
/// probabilities, and records whether the guess was right. Trials are cut into
/// fixed blocks of 4096; block b draws from stream (seed, b), so every trial's
/// randomness is a function of (seed, trial index) alone and the result does
/// not depend on the worker count.
inline DiscriminationResult monte_carlo_discriminate(const HelstromEnsemble& ensemble, const ChannelFamily& family,
                                                     double t, std::uint64_t trials, std::uint64_t seed,
                                                     Parallelism par = {}) {
  if (trials < 1) {
    throw std::invalid_argument("monte_carlo_discriminate: trials must be at least 1");
  }
  require_family_dim(family, ensemble, "monte_carlo_discriminate");
  const CMatrix out1 = family.apply(ensemble.rho1().matrix(), t);
  const CMatrix out2 = family.apply(ensemble.rho2().matrix(), t);
  const CMatrix projector = optimal_measurement(ensemble.p1() * out1 - ensemble.p2() * out2);
  const double guess1_given1 = std::clamp((projector * out1).trace().real(), 0.0, 1.0);
  const double guess1_given2 = std::clamp((projector * out2).trace().real(), 0.0, 1.0);

  constexpr std::uint64_t block = 4096;
  const std::uint64_t blocks = (trials + block - 1) / block;
  std::vector<std::uint64_t> successes(blocks, 0);
  parallel_for(static_cast<std::size_t>(blocks), par, [&](std::size_t b) {
    const std::uint64_t lo = b * block;
    const std::uint64_t hi = std::min(trials, lo + block);
    std::uint64_t hits = 0;
    Rng rng = stream_engine(seed, b);
    for (std::uint64_t k = lo; k < hi; ++k) {
      const bool label1 = uniform01(rng) < ensemble.p1();
      const bool guess1 = uniform01(rng) < (label1 ? guess1_given1 : guess1_given2);
      hits += (label1 == guess1) ? 1 : 0;
    }
    successes[b] = hits;
  });
  std::uint64_t total = 0;
  for (auto s : successes) {
    total += s;
  }
  DiscriminationResult r;
  r.analytic_pmax = p_max(ensemble, family, t);
  r.trials = trials;
  r.empirical_rate = static_cast<double>(total) / static_cast<double>(trials);
  r.std_error = std::sqrt(r.empirical_rate * (1.0 - r.empirical_rate) / static_cast<double>(trials));
  return r;
}

}  // namespace mixchan

#endif  // MIXCHAN_DISTINGUISH_HPP
