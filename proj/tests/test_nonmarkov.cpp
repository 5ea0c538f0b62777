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


#include <gtest/gtest.h>

#include <numbers>

#include "mixchan/nonmarkov.hpp"
#include "oracles.hpp"

using namespace mixchan;

namespace {

constexpr double pi = std::numbers::pi;

const QState y_up = QState::from_bloch(0.0, 1.0, 0.0);
const QState y_down = QState::from_bloch(0.0, -1.0, 0.0);
const HelstromEnsemble y_pair = HelstromEnsemble::equal(y_up, y_down);

MixtureSpec two_dephasing(double q1, double g1, double l1, double g2, double l2) {
  return MixtureSpec({q1, 1.0 - q1}, {ChannelFamily::dephasing(g1, l1), ChannelFamily::dephasing(g2, l2)});
}

MixtureSpec worked_mixture() { return two_dephasing(0.5, 1.0 / 3.0, pi / 2.0, 1.0 / 3.0, 0.0); }
MixtureSpec random_unitary_mixture() { return two_dephasing(0.5, 0.0, 2.0 * pi, 0.0, 0.0); }

SearchConfig fast_search() {
  SearchConfig cfg;
  cfg.polar_points = 5;
  cfg.azimuth_points = 4;
  cfg.golden_iterations = 25;
  return cfg;
}

}  // namespace

TEST(TimeGrid, UniformHitsEndpointsAndIntegerTimes) {
  const auto g = TimeGrid::uniform(0.0, 6.0, 1e-3);
  EXPECT_EQ(g.size(), 6001U);
  EXPECT_EQ(g.start(), 0.0);
  EXPECT_EQ(g.end(), 6.0);
  EXPECT_EQ(g[2000], 2.0);
  EXPECT_EQ(g[4000], 4.0);
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW(TimeGrid({1.0}), std::invalid_argument);
  EXPECT_THROW(TimeGrid({-1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(TimeGrid({0.0, 1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(TimeGrid::uniform(1.0, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(TimeGrid::uniform(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(TimeGrid, AugmentedMergesInteriorPoints) {
  const auto g = TimeGrid::uniform(0.0, 1.0, 0.25).augmented({0.3, 0.5, 0.5 + 1e-14, 2.0, -1.0});
  EXPECT_EQ(g.points(), (std::vector<double>{0.0, 0.25, 0.3, 0.5, 0.75, 1.0}));
}

TEST(KinkTimes, WorkedMixtureZeros) {
  EXPECT_EQ(kink_times(mix(worked_mixture()), 0.0, 12.0), (std::vector<double>{2.0, 6.0, 10.0}));
  EXPECT_TRUE(kink_times(dilate(worked_mixture()), 0.0, 12.0).empty());
  EXPECT_TRUE(kink_times(ChannelFamily::dephasing(0.1, 1.0), 0.0, 12.0).empty());
}

TEST(DistinguishabilitySeries, IdentityIsConstant) {
  Rng rng(1);
  const HelstromEnsemble ens(0.3, random_mixed_state(2, rng), random_mixed_state(2, rng));
  const auto grid = TimeGrid::uniform(0.0, 2.0, 0.1);
  for (double d : distinguishability_series(ChannelFamily::identity(2), ens, grid)) {
    EXPECT_NEAR(d, helstrom_norm(ens), 1e-14);
  }
}

TEST(DistinguishabilitySeries, WorkedMixtureFollowsCoherenceModulus) {
  const auto grid = TimeGrid::uniform(0.0, 6.0, 1e-2);
  const auto d = distinguishability_series(mix(worked_mixture()), y_pair, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(d[k], oracle::worked_internal(grid[k]), 1e-12);
  }
}

TEST(DistinguishabilitySeries, SingleSemigroupDecays) {
  const auto grid = TimeGrid::uniform(0.0, 6.0, 1e-2);
  const auto d = distinguishability_series(ChannelFamily::dephasing(0.25, 1.0), y_pair, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(d[k], std::exp(-0.25 * grid[k]), 1e-12);
  }
}

TEST(DistinguishabilitySeries, DimensionMismatch) {
  EXPECT_THROW(distinguishability_series(ChannelFamily::identity(3), y_pair, TimeGrid({0.0, 1.0})), DimensionError);
}

TEST(SigmaSeries, Examples) {
  const auto grid = TimeGrid::uniform(0.0, 6.0, 1e-3);
  for (double s : sigma_series(ChannelFamily::identity(2), y_pair, grid)) {
    EXPECT_EQ(s, 0.0);
  }
  for (double s : sigma_series(ChannelFamily::dephasing(1.0 / 3.0, pi / 2.0), y_pair, grid)) {
    EXPECT_LE(s, 1e-8);
  }
  const auto s = sigma_series(mix(worked_mixture()), y_pair, grid);
  EXPECT_LT(s[1990], 0.0);
  EXPECT_GT(s[2010], 0.0);
  EXPECT_THROW(sigma_series(ChannelFamily::identity(2), y_pair, TimeGrid({0.0, 1.0})), std::invalid_argument);
}

TEST(NmMeasure, MonotoneSeriesGivesZero) {
  const auto grid = TimeGrid::uniform(0.0, 12.0, 1e-2);
  const auto est = nm_measure(ChannelFamily::dephasing(0.5, 3.0), y_pair, grid);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_TRUE(est.positive_intervals.empty());
  const auto dil = nm_measure(dilate(worked_mixture()), y_pair, grid);
  EXPECT_EQ(dil.value, 0.0);
}

TEST(NmMeasure, WorkedMixtureMatchesDenseOracle) {
  const auto grid = TimeGrid::uniform(0.0, 12.0, 1e-3);
  const auto est = nm_measure(mix(worked_mixture()), y_pair, grid);
  EXPECT_NEAR(est.value, oracle::worked_measure_horizon12, 1e-6);
  const double dense = oracle::dense_positive_variation(oracle::worked_internal, 12.0, 1e-4);
  EXPECT_NEAR(dense, oracle::worked_measure_horizon12, 1e-8);
  ASSERT_EQ(est.positive_intervals.size(), 3U);
  EXPECT_NEAR(est.positive_intervals[0].first, 2.0, 2e-3);
  EXPECT_NEAR(est.positive_intervals[0].second, 3.489, 2e-3);
  EXPECT_NEAR(est.horizon_distinguishability, oracle::worked_internal(12.0), 1e-12);
}

TEST(NmMeasure, RandomUnitaryMixtureIsNonMarkovian) {
  const auto grid = TimeGrid::uniform(0.0, 12.0, 1e-3);
  const auto est = nm_measure(mix(random_unitary_mixture()), y_pair, grid);
  EXPECT_GT(est.value, 0.01);
  EXPECT_NEAR(est.value, oracle::random_unitary_measure_horizon12, 1e-9);
}

TEST(NmMeasure, GridRefinementStability) {
  for (const auto& spec : {worked_mixture(), random_unitary_mixture(), two_dephasing(0.5, 0.1, 2.0 * pi, 0.3, 0.0)}) {
    const auto fam = mix(spec);
    const double coarse = nm_measure(fam, y_pair, kink_aware(TimeGrid::uniform(0.0, 12.0, 1e-3), fam)).value;
    const double fine = nm_measure(fam, y_pair, kink_aware(TimeGrid::uniform(0.0, 12.0, 5e-4), fam)).value;
    EXPECT_LT(std::abs(coarse - fine), 1e-4);
  }
}

TEST(NmMeasure, InvariantUnderRelabelingAndGlobalPhase) {
  Rng rng(3);
  const auto fam = mix(two_dephasing(0.4, 0.2, 3.0, 0.1, 0.5));
  const auto grid = TimeGrid::uniform(0.0, 8.0, 1e-2);
  for (int rep = 0; rep < 10; ++rep) {
    const CVector psi = random_pure_vector(2, rng);
    const CVector phi = random_pure_vector(2, rng);
    const auto a = HelstromEnsemble::equal(QState::pure(psi), QState::pure(phi));
    const auto b = HelstromEnsemble::equal(QState::pure(phi), QState::pure(std::exp(Complex(0.0, 1.234)) * psi));
    EXPECT_NEAR(nm_measure(fam, a, grid).value, nm_measure(fam, b, grid).value, 1e-12);
    EXPECT_NEAR(nm_measure(fam, a, grid).value, nm_measure(fam, a.swapped(), grid).value, 1e-12);
  }
}

TEST(NmMeasure, IncrementSumMatchesTrapezoidOfPositiveRate) {
  const auto grid = TimeGrid::uniform(0.0, 12.0, 1e-3);
  const auto fam = mix(worked_mixture());
  const auto d = distinguishability_series(fam, y_pair, grid);
  const auto sigma = finite_difference(d, grid);
  double trapezoid = 0.0;
  double variation = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    trapezoid += 0.5 * (grid[k] - grid[k - 1]) * (std::max(0.0, sigma[k]) + std::max(0.0, sigma[k - 1]));
    variation += std::abs(d[k] - d[k - 1]);
  }
  EXPECT_LE(std::abs(positive_increment_sum(d) - trapezoid), 2.0 * 1e-3 * variation);
}

TEST(NmMeasure, DilationOfMarkovianComponentsIsMonotone) {
  Rng rng(4);
  const auto grid = TimeGrid::uniform(0.0, 10.0, 1e-2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto spec = two_dephasing(uniform01(rng), uniform01(rng), 6.0 * uniform01(rng), uniform01(rng),
                                    6.0 * uniform01(rng));
    const auto ens = HelstromEnsemble::equal(random_mixed_state(2, rng), random_mixed_state(2, rng));
    const auto d = distinguishability_series(dilate(spec), ens, grid);
    for (std::size_t k = 1; k < d.size(); ++k) {
      EXPECT_LE(d[k], d[k - 1] + 1e-12);
    }
  }
}

TEST(Optimizer, MarkovianSemigroupGivesZero) {
  const auto est = nm_measure_optimized(ChannelFamily::dephasing(0.3, 1.0), TimeGrid::uniform(0.0, 12.0, 1e-2),
                                        fast_search());
  EXPECT_EQ(est.value, 0.0);
}

TEST(Optimizer, FindsEquatorialPairForWorkedMixture) {
  const auto fam = mix(worked_mixture());
  const auto grid = TimeGrid::uniform(0.0, 12.0, 1e-2);
  auto cfg = fast_search();
  cfg.validate_unrestricted = true;
  const auto est = nm_measure_optimized(fam, grid, cfg);
  const double equatorial = nm_measure(fam, y_pair, kink_aware(grid, fam)).value;
  EXPECT_GE(est.value, equatorial - 1e-9);
  EXPECT_LE(std::abs(est.value - equatorial), 1e-6 * equatorial);
  ASSERT_TRUE(est.unrestricted_value.has_value());
  EXPECT_LE(std::abs(*est.unrestricted_value - est.value), 1e-6 * est.value);
  // the optimal pair lies on the equator
  const CMatrix z = pauli_z();
  EXPECT_NEAR((est.ensemble.rho1().matrix() * z).trace().real(), 0.0, 1e-6);
}

TEST(Optimizer, ProbabilityScanPeaksAtOneHalf) {
  const auto fam = mix(worked_mixture());
  auto cfg = fast_search();
  cfg.optimize_probability = true;
  const auto est = nm_measure_optimized(fam, TimeGrid::uniform(0.0, 12.0, 1e-2), cfg);
  EXPECT_NEAR(est.ensemble.p1(), 0.5, 1e-3);
  // max(|p1 - p2|, |k(t)|) has less positive variation than |k(t)|
  const auto grid = kink_aware(TimeGrid::uniform(0.0, 12.0, 1e-2), fam);
  const double lopsided = nm_measure(fam, HelstromEnsemble(0.6, est.ensemble.rho1(), est.ensemble.rho2()), grid).value;
  EXPECT_LT(lopsided, est.value);
}

TEST(Optimizer, GenericPathIsDeterministic) {
  Rng rng(5);
  const MixtureSpec spec({0.5, 0.5}, {ChannelFamily::unitary(random_hermitian(3, rng)),
                                      ChannelFamily::unitary(random_hermitian(3, rng))});
  const auto fam = mix(spec);
  const auto grid = TimeGrid::uniform(0.0, 6.0, 2e-2);
  auto cfg = fast_search();
  cfg.random_restarts = 6;
  cfg.refine_rounds = 1;
  const auto a = nm_measure_optimized(fam, grid, cfg);
  const auto b = nm_measure_optimized(fam, grid, cfg);
  EXPECT_EQ(a.value, b.value);
  EXPECT_GT(a.value, 0.0);
  // refinement never loses to the starting candidates
  for (std::size_t k = 0; k < cfg.random_restarts; ++k) {
    Rng stream = stream_engine(cfg.seed, k);
    const CMatrix u = random_unitary(3, stream);
    const auto ens = HelstromEnsemble::equal(QState::pure(u.col(0)), QState::pure(u.col(1)));
    EXPECT_GE(a.value, nm_measure(fam, ens, grid).value - 1e-12);
  }
}

TEST(Optimizer, InvalidConfig) {
  SearchConfig cfg;
  cfg.polar_points = 1;
  EXPECT_THROW(nm_measure_optimized(ChannelFamily::identity(2), TimeGrid({0.0, 1.0}), cfg), std::invalid_argument);
}

TEST(Subadditivity, MarkovianComponentsGiveMarkovianDilation) {
  const auto report = verify_subadditivity(two_dephasing(0.3, 0.2, 1.0, 0.5, -2.0),
                                           TimeGrid::uniform(0.0, 12.0, 1e-2), fast_search());
  EXPECT_TRUE(report.holds);
  EXPECT_TRUE(report.components_markovian);
  EXPECT_LE(report.dilated_value, 1e-6);
}

TEST(Subadditivity, DegenerateWeightsGiveEquality) {
  const auto inner = mix(worked_mixture());
  const MixtureSpec spec({1.0, 0.0}, {inner, ChannelFamily::dephasing(0.1, 0.0)});
  const auto report = verify_subadditivity(spec, TimeGrid::uniform(0.0, 12.0, 1e-2), fast_search());
  EXPECT_TRUE(report.holds);
  EXPECT_NEAR(report.dilated_value, report.weighted_sum, 1e-6);
  EXPECT_GT(report.dilated_value, 0.1);
}

TEST(Subadditivity, NonMarkovianComponents) {
  Rng rng(6);
  const auto grid = TimeGrid::uniform(0.0, 12.0, 2e-2);
  for (int rep = 0; rep < 3; ++rep) {
    auto inner = [&] {
      return mix(two_dephasing(uniform01(rng), 0.3 * uniform01(rng), 4.0 * uniform01(rng), 0.3 * uniform01(rng),
                               4.0 * uniform01(rng)));
    };
    const double q = uniform01(rng);
    const auto report = verify_subadditivity(MixtureSpec({q, 1.0 - q}, {inner(), inner()}), grid, fast_search());
    EXPECT_TRUE(report.holds) << report.dilated_value << " vs " << report.weighted_sum;
  }
}
