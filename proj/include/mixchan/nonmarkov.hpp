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


#ifndef MIXCHAN_NONMARKOV_HPP
#define MIXCHAN_NONMARKOV_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mixchan/channels.hpp"
#include "mixchan/distinguish.hpp"
#include "mixchan/parallel.hpp"
#include "mixchan/qmath.hpp"
#include "mixchan/random.hpp"

namespace mixchan {

/// Strictly increasing sample times, starting at t >= 0.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
      throw std::invalid_argument("TimeGrid: at least two points are required");
    }
    if (!(points_.front() >= 0.0)) {
      throw std::invalid_argument("TimeGrid: grid must start at t >= 0");
    }
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (!std::isfinite(points_[k]) || (k > 0 && !(points_[k] > points_[k - 1]))) {
        throw std::invalid_argument("TimeGrid: points must be finite and strictly increasing");
      }
    }
  }

  /// Uniform grid from `start` to `end`; the step is adjusted so that `end`
  /// is hit exactly. Points are start + (end - start) k / n.
  static TimeGrid uniform(double start, double end, double step) {
    if (!(step > 0.0) || !(end > start) || !std::isfinite(end)) {
      throw std::invalid_argument("TimeGrid::uniform: need start < end and step > 0");
    }
    const auto n = std::max<long long>(1, std::llround((end - start) / step));
    std::vector<double> pts(static_cast<std::size_t>(n) + 1);
    for (long long k = 0; k <= n; ++k) {
      pts[static_cast<std::size_t>(k)] = start + (end - start) * static_cast<double>(k) / static_cast<double>(n);
    }
    pts.back() = end;
    return TimeGrid(std::move(pts));
  }

  /// Adds the `extra` times lying strictly inside the grid, skipping any
  /// within 1e-12 of an existing point.
  TimeGrid augmented(const std::vector<double>& extra) const {
    std::vector<double> pts = points_;
    for (double t : extra) {
      if (t > start() && t < end()) {
        pts.push_back(t);
      }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> merged;
    merged.reserve(pts.size());
    for (double t : pts) {
      if (merged.empty() || t - merged.back() > 1e-12) {
        merged.push_back(t);
      }
    }
    return TimeGrid(std::move(merged));
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double start() const { return points_.front(); }
  double end() const { return points_.back(); }
  double operator[](std::size_t k) const { return points_[k]; }

 private:
  std::vector<double> points_;
};

/// ||Phi_t[Delta]|| at every grid point. For p1 = p2 = 1/2 this is the
/// trace distance of the evolved pair.
inline std::vector<double> distinguishability_series(const ChannelFamily& family, const HelstromEnsemble& ensemble,
                                                     const TimeGrid& grid, Parallelism par = {}) {
  require_family_dim(family, ensemble, "distinguishability_series");
  const CMatrix delta = ensemble.helstrom_matrix();
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), par, [&](std::size_t k) { out[k] = trace_norm(family.apply(delta, grid[k])); });
  return out;
}

/// Finite-difference derivative: central in the interior, one-sided at the
/// ends.
inline std::vector<double> finite_difference(const std::vector<double>& values, const TimeGrid& grid) {
  if (values.size() != grid.size()) {
    throw DimensionError("finite_difference: series and grid lengths differ");
  }
  if (grid.size() < 3) {
    throw std::invalid_argument("finite_difference: at least three grid points are required");
  }
  const std::size_t n = grid.size();
  std::vector<double> d(n);
  d[0] = (values[1] - values[0]) / (grid[1] - grid[0]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    d[k] = (values[k + 1] - values[k - 1]) / (grid[k + 1] - grid[k - 1]);
  }
  d[n - 1] = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
  return d;
}

/// Rate of change sigma(t) of the distinguishability.
inline std::vector<double> sigma_series(const ChannelFamily& family, const HelstromEnsemble& ensemble,
                                        const TimeGrid& grid, Parallelism par = {}) {
  if (grid.size() < 3) {
    throw std::invalid_argument("sigma_series: at least three grid points are required");
  }
  return finite_difference(distinguishability_series(family, ensemble, grid, par), grid);
}

/// sum_k max(0, D_{k+1} - D_k): the integral of sigma over sigma > 0.
inline double positive_increment_sum(const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    total += std::max(0.0, values[k] - values[k - 1]);
  }
  return total;
}

/// Maximal runs of grid points with sigma > threshold, as (t_lo, t_hi).
inline std::vector<std::pair<double, double>> positive_intervals(const std::vector<double>& sigma,
                                                                 const TimeGrid& grid, double threshold = 1e-10) {
  std::vector<std::pair<double, double>> out;
  std::optional<std::size_t> open;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    const bool positive = sigma[k] > threshold;
    if (positive && !open) {
      open = k;
    } else if (!positive && open) {
      out.emplace_back(grid[*open], grid[k - 1]);
      open.reset();
    }
  }
  if (open) {
    out.emplace_back(grid[*open], grid.end());
  }
  return out;
}

struct NMEstimate {
  double value = 0.0;
  HelstromEnsemble ensemble;
  std::vector<std::pair<double, double>> positive_intervals;
  TimeGrid grid;
  /// Distinguishability at the horizon; backflow after t_end cannot exceed
  /// what decays away from this level.
  double horizon_distinguishability = 0.0;
  /// Best value of the coarse unrestricted pair search, when it was run.
  std::optional<double> unrestricted_value;
};

/// Non-Markovianity of `family` for one preparation, as the sum of positive
/// increments of the distinguishability series.
inline NMEstimate nm_measure(const ChannelFamily& family, const HelstromEnsemble& ensemble, const TimeGrid& grid,
                             Parallelism par = {}) {
  const auto series = distinguishability_series(family, ensemble, grid, par);
  NMEstimate est{positive_increment_sum(series), ensemble, {}, grid, series.back(), std::nullopt};
  if (grid.size() >= 3) {
    est.positive_intervals = positive_intervals(finite_difference(series, grid), grid);
  }
  return est;
}

namespace detail {

inline void collect_kinks(const ChannelFamily& family, double t_start, double t_end, std::vector<double>& out) {
  const auto& rep = family.representation();
  const std::vector<ChannelFamily>* components = nullptr;
  if (const auto* m = std::get_if<MixtureFamily>(&rep)) {
    components = &m->components;
  } else if (const auto* d = std::get_if<DilatedFamily>(&rep)) {
    components = &d->components;
  }
  if (components == nullptr) {
    return;
  }
  const bool mixes_coherences = std::holds_alternative<MixtureFamily>(rep);
  for (std::size_t i = 0; i < components->size(); ++i) {
    collect_kinks((*components)[i], t_start, t_end, out);
    if (!mixes_coherences) {
      continue;
    }
    const auto* a = std::get_if<DephasingSemigroup>(&(*components)[i].representation());
    for (std::size_t j = i + 1; a != nullptr && j < components->size(); ++j) {
      const auto* b = std::get_if<DephasingSemigroup>(&(*components)[j].representation());
      if (b == nullptr) {
        continue;
      }
      const double dl = std::abs(a->lambda - b->lambda);
      if (dl < 1e-14) {
        continue;
      }
      // cos(dl t) = -1
      for (long long m = 0;; ++m) {
        const double t = (2.0 * static_cast<double>(m) + 1.0) * std::numbers::pi / dl;
        if (t > t_end) {
          break;
        }
        if (t > t_start) {
          out.push_back(t);
        }
      }
    }
  }
}

}  // namespace detail

/// Times where the coherence multipliers of two dephasing components inside
/// a mixture are in antiphase. The mixed coherence has its minima (zeros,
/// for equal rates) there, which is where |k(t)| has kinks.
inline std::vector<double> kink_times(const ChannelFamily& family, double t_start, double t_end) {
  std::vector<double> out;
  detail::collect_kinks(family, t_start, t_end, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline TimeGrid kink_aware(const TimeGrid& grid, const ChannelFamily& family) {
  return grid.augmented(kink_times(family, grid.start(), grid.end()));
}

struct SearchConfig {
  std::size_t polar_points = 9;    // theta in [0, pi/2]
  std::size_t azimuth_points = 8;  // phi in [0, 2 pi)
  std::size_t refine_rounds = 2;
  std::size_t golden_iterations = 40;
  std::size_t random_restarts = 24;  // generic (dim > 2) path
  std::uint64_t seed = 1;
  bool validate_unrestricted = false;
  std::size_t coarse_polar_points = 5;  // theta in [0, pi]
  std::size_t coarse_azimuth_points = 8;
  bool optimize_probability = false;
  std::size_t probability_points = 9;
  Parallelism par;

  void validate() const {
    if (polar_points < 2 || azimuth_points < 1 || coarse_polar_points < 2 || coarse_azimuth_points < 1) {
      throw std::invalid_argument("SearchConfig: angle grids need at least 2 polar and 1 azimuthal point");
    }
    if (random_restarts < 1) {
      throw std::invalid_argument("SearchConfig: random_restarts must be at least 1");
    }
    if (optimize_probability && probability_points < 1) {
      throw std::invalid_argument("SearchConfig: probability_points must be at least 1");
    }
  }
};

namespace detail {

inline double measure_value(const ChannelFamily& family, const CMatrix& delta, const TimeGrid& grid) {
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = trace_norm(family.apply(delta, grid[k]));
    if (k > 0) {
      total += std::max(0.0, d - prev);
    }
    prev = d;
  }
  return total;
}

inline std::pair<QState, QState> antipodal_pair(double theta, double phi) {
  const double x = std::sin(theta) * std::cos(phi);
  const double y = std::sin(theta) * std::sin(phi);
  const double z = std::cos(theta);
  return {QState::from_bloch(x, y, z), QState::from_bloch(-x, -y, -z)};
}

inline double pair_value(const ChannelFamily& family, const TimeGrid& grid, double p1, const QState& a,
                         const QState& b) {
  return measure_value(family, p1 * a.matrix() - (1.0 - p1) * b.matrix(), grid);
}

// Golden-section maximization of f over [lo, hi]; returns (argmax, max),
// never worse than the best endpoint-free sample it evaluated.
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, std::size_t iterations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (std::size_t it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
      if (fc > best_f) {
        best_f = fc;
        best_x = c;
      }
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
      if (fd > best_f) {
        best_f = fd;
        best_x = d;
      }
    }
  }
  return {best_x, best_f};
}

// argmax with ties resolved to the smallest index
inline std::size_t first_argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[best]) {
      best = k;
    }
  }
  return best;
}

struct PairSearchResult {
  double value;
  QState rho1;
  QState rho2;
};

inline PairSearchResult qubit_pair_search(const ChannelFamily& family, const TimeGrid& grid,
                                          const SearchConfig& cfg) {
  const double pi = std::numbers::pi;
  std::vector<std::pair<double, double>> cand;
  for (std::size_t i = 0; i < cfg.polar_points; ++i) {
    const double theta = 0.5 * pi * static_cast<double>(i) / static_cast<double>(cfg.polar_points - 1);
    const std::size_t nphi = (i == 0) ? 1 : cfg.azimuth_points;
    for (std::size_t j = 0; j < nphi; ++j) {
      cand.emplace_back(theta, 2.0 * pi * static_cast<double>(j) / static_cast<double>(cfg.azimuth_points));
    }
  }
  std::vector<double> values(cand.size());
  parallel_for(cand.size(), cfg.par, [&](std::size_t k) {
    const auto [a, b] = antipodal_pair(cand[k].first, cand[k].second);
    values[k] = pair_value(family, grid, 0.5, a, b);
  });
  const std::size_t best = first_argmax(values);
  double theta = cand[best].first;
  double phi = cand[best].second;
  double best_value = values[best];

  double dtheta = 0.5 * pi / static_cast<double>(cfg.polar_points - 1);
  double dphi = 2.0 * pi / static_cast<double>(cfg.azimuth_points);
  auto objective = [&](double th, double ph) {
    const auto [a, b] = antipodal_pair(th, ph);
    return pair_value(family, grid, 0.5, a, b);
  };
  for (std::size_t round = 0; round < cfg.refine_rounds; ++round) {
    const auto [th, fth] = golden_max([&](double x) { return objective(x, phi); }, std::max(0.0, theta - dtheta),
                                      std::min(pi, theta + dtheta), cfg.golden_iterations);
    if (fth > best_value) {
      best_value = fth;
      theta = th;
    }
    const auto [ph, fph] = golden_max([&](double x) { return objective(theta, x); }, phi - dphi, phi + dphi,
                                      cfg.golden_iterations);
    if (fph > best_value) {
      best_value = fph;
      phi = ph;
    }
    dtheta *= 0.5;
    dphi *= 0.5;
  }
  const auto [a, b] = antipodal_pair(theta, phi);
  return {best_value, a, b};
}

// Hermitian basis: diagonal units, then symmetric and antisymmetric
// off-diagonal pairs.
inline std::vector<CMatrix> hermitian_basis(Index d) {
  std::vector<CMatrix> basis;
  for (Index j = 0; j < d; ++j) {
    basis.push_back(basis_projector(d, j));
  }
  for (Index j = 0; j < d; ++j) {
    for (Index k = j + 1; k < d; ++k) {
      basis.push_back(matrix_unit(d, j, k) + matrix_unit(d, k, j));
      basis.push_back(Complex(0.0, -1.0) * matrix_unit(d, j, k) + Complex(0.0, 1.0) * matrix_unit(d, k, j));
    }
  }
  return basis;
}

inline std::pair<QState, QState> orthogonal_pair(const CMatrix& u) {
  return {QState::pure(u.col(0)), QState::pure(u.col(1))};
}

inline PairSearchResult generic_pair_search(const ChannelFamily& family, const TimeGrid& grid,
                                            const SearchConfig& cfg) {
  const Index d = family.input_dim();
  std::vector<CMatrix> starts(cfg.random_restarts);
  for (std::size_t k = 0; k < starts.size(); ++k) {
    Rng rng = stream_engine(cfg.seed, k);
    starts[k] = random_unitary(d, rng);
  }
  std::vector<double> values(starts.size());
  parallel_for(starts.size(), cfg.par, [&](std::size_t k) {
    const auto [a, b] = orthogonal_pair(starts[k]);
    values[k] = pair_value(family, grid, 0.5, a, b);
  });
  const std::size_t best = first_argmax(values);
  CMatrix u = starts[best];
  double best_value = values[best];
  const auto basis = hermitian_basis(d);
  double step = 0.2;
  for (std::size_t level = 0; level < 3 * cfg.refine_rounds; ++level, step *= 0.5) {
    for (const auto& g : basis) {
      for (double sign : {1.0, -1.0}) {
        const CMatrix trial = unitary_exp(g, sign * step) * u;
        const auto [a, b] = orthogonal_pair(trial);
        const double v = pair_value(family, grid, 0.5, a, b);
        if (v > best_value) {
          best_value = v;
          u = trial;
        }
      }
    }
  }
  const auto [a, b] = orthogonal_pair(u);
  return {best_value, a, b};
}

}  // namespace detail

/// Best value over all pure-state pairs on a coarse Bloch-sphere grid,
/// antipodal or not. Qubit families only.
inline NMEstimate coarse_unrestricted_search(const ChannelFamily& family, const TimeGrid& grid,
                                             const SearchConfig& cfg = {}) {
  if (family.input_dim() != 2) {
    throw DimensionError("coarse_unrestricted_search: qubit families only");
  }
  cfg.validate();
  const TimeGrid g = kink_aware(grid, family);
  const double pi = std::numbers::pi;
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < cfg.coarse_polar_points; ++i) {
    const double theta = pi * static_cast<double>(i) / static_cast<double>(cfg.coarse_polar_points - 1);
    const bool pole = (i == 0 || i + 1 == cfg.coarse_polar_points);
    const std::size_t nphi = pole ? 1 : cfg.coarse_azimuth_points;
    for (std::size_t j = 0; j < nphi; ++j) {
      points.emplace_back(theta, 2.0 * pi * static_cast<double>(j) / static_cast<double>(cfg.coarse_azimuth_points));
    }
  }
  std::vector<QState> states;
  for (const auto& [th, ph] : points) {
    states.push_back(detail::antipodal_pair(th, ph).first);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      pairs.emplace_back(i, j);
    }
  }
  std::vector<double> values(pairs.size());
  parallel_for(pairs.size(), cfg.par, [&](std::size_t k) {
    values[k] = detail::pair_value(family, g, 0.5, states[pairs[k].first], states[pairs[k].second]);
  });
  const std::size_t best = detail::first_argmax(values);
  auto est = nm_measure(family, HelstromEnsemble::equal(states[pairs[best].first], states[pairs[best].second]), g);
  est.value = values[best];
  return est;
}

/// Maximizes the measure over preparations. Qubit families search antipodal
/// Bloch pairs (polar/azimuth grid plus golden-section refinement); larger
/// systems use random orthogonal pure pairs plus coordinate refinement.
/// With `optimize_probability`, the preparation probability p1 is scanned
/// afterwards at the best pair.
inline NMEstimate nm_measure_optimized(const ChannelFamily& family, const TimeGrid& grid,
                                       const SearchConfig& cfg = {}) {
  cfg.validate();
  const TimeGrid g = kink_aware(grid, family);
  auto found = family.input_dim() == 2 ? detail::qubit_pair_search(family, g, cfg)
                                       : detail::generic_pair_search(family, g, cfg);
  double p1 = 0.5;
  double value = found.value;
  if (cfg.optimize_probability) {
    const std::size_t m = cfg.probability_points;
    std::vector<double> probs{0.5};
    for (std::size_t k = 1; k <= m; ++k) {
      probs.push_back(static_cast<double>(k) / static_cast<double>(m + 1));
    }
    std::vector<double> values(probs.size());
    parallel_for(probs.size(), cfg.par, [&](std::size_t k) {
      values[k] = detail::pair_value(family, g, probs[k], found.rho1, found.rho2);
    });
    const std::size_t best = detail::first_argmax(values);
    p1 = probs[best];
    value = values[best];
    const double width = 1.0 / static_cast<double>(m + 1);
    const auto [p, v] = detail::golden_max(
        [&](double x) { return detail::pair_value(family, g, x, found.rho1, found.rho2); },
        std::max(0.0, p1 - width), std::min(1.0, p1 + width), cfg.golden_iterations);
    if (v > value) {
      value = v;
      p1 = p;
    }
  }
  NMEstimate est = nm_measure(family, HelstromEnsemble(p1, found.rho1, found.rho2), g, cfg.par);
  est.value = value;
  if (cfg.validate_unrestricted && family.input_dim() == 2) {
    const double coarse = coarse_unrestricted_search(family, grid, cfg).value;
    est.unrestricted_value = coarse;
    if (coarse > value * (1.0 + 1e-6) + 1e-12) {
      throw std::runtime_error("nm_measure_optimized: coarse unrestricted search found a better pair (" +
                               std::to_string(coarse) + " > " + std::to_string(value) +
                               "); the antipodal restriction is not valid for this family");
    }
  }
  return est;
}

struct SubadditivityReport {
  double dilated_value = 0.0;
  std::vector<double> component_values;
  double weighted_sum = 0.0;
  bool holds = false;
  /// Every component has measure <= tolerance.
  bool components_markovian = false;
  double tolerance = 1e-6;
};

/// N(Lambda) <= sum_i q_i N(Phi_i), each side optimized independently.
/// Zero-weight components are not evaluated.
inline SubadditivityReport verify_subadditivity(const MixtureSpec& spec, const TimeGrid& grid,
                                                const SearchConfig& cfg = {}) {
  SubadditivityReport r;
  r.dilated_value = nm_measure_optimized(dilate(spec), grid, cfg).value;
  r.components_markovian = true;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double q = spec.weights()[i];
    const double v = q > 0.0 ? nm_measure_optimized(spec.components()[i], grid, cfg).value : 0.0;
    r.component_values.push_back(v);
    r.weighted_sum += q * v;
    r.components_markovian = r.components_markovian && v <= r.tolerance;
  }
  r.holds = r.dilated_value <= r.weighted_sum + r.tolerance;
  return r;
}

}  // namespace mixchan

#endif  // MIXCHAN_NONMARKOV_HPP
