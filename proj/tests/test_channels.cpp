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

#include "mixchan/channels.hpp"
#include "mixchan/random.hpp"
#include "oracles.hpp"

using namespace mixchan;

namespace {

constexpr double pi = std::numbers::pi;

MixtureSpec worked_mixture() {
  return MixtureSpec({0.5, 0.5}, {ChannelFamily::dephasing(1.0 / 3.0, pi / 2.0), ChannelFamily::dephasing(1.0 / 3.0, 0.0)});
}

MicroscopicModel random_model(Rng& rng, std::size_t n) {
  MicroscopicModel m;
  m.system_dim = 2;
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& q : w) {
    q = uniform01(rng) + 0.05;
    sum += q;
  }
  for (auto& q : w) {
    q /= sum;
  }
  w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.env_dims.push_back(2);
    m.hamiltonians.push_back(random_hermitian(4, rng));
    m.env_states.push_back(random_mixed_state(2, rng));
  }
  m.weights = w;
  return m;
}

}  // namespace

TEST(Dephasing, CoherenceDecay) {
  const auto fam = ChannelFamily::dephasing(1.0 / 3.0, 0.0);
  CMatrix rho(2, 2);
  rho << 0.5, 0.5, 0.5, 0.5;
  const QState out = fam.apply(QState(rho), 3.0);
  EXPECT_NEAR(std::abs(out.matrix()(1, 0) - 0.5 * std::exp(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(out.matrix()(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(out.matrix()(1, 1).real(), 0.5, 1e-15);
}

TEST(Dephasing, MultiplierModulusAndPopulations) {
  Rng rng(1);
  for (int rep = 0; rep < 50; ++rep) {
    const DephasingSemigroup d{uniform01(rng), 10.0 * (uniform01(rng) - 0.5)};
    const double t = 5.0 * uniform01(rng);
    EXPECT_LE(std::abs(d.multiplier(t)), 1.0 + 1e-15);
    const QState rho = random_mixed_state(2, rng);
    const CMatrix out = ChannelFamily::dephasing(d.gamma, d.lambda).apply(rho.matrix(), t);
    EXPECT_EQ(out(0, 0), rho.matrix()(0, 0));
    EXPECT_EQ(out(1, 1), rho.matrix()(1, 1));
  }
}

TEST(Dephasing, SemigroupProperty) {
  Rng rng(2);
  const auto fam = ChannelFamily::dephasing(0.4, 1.7);
  for (int rep = 0; rep < 20; ++rep) {
    const QState rho = random_mixed_state(2, rng);
    const double s = 3.0 * uniform01(rng);
    const double t = 3.0 * uniform01(rng);
    EXPECT_LE(max_abs(fam.apply(fam.apply(rho, s), t).matrix() - fam.apply(rho, s + t).matrix()), 1e-12);
  }
}

TEST(Dephasing, InvalidParameters) {
  EXPECT_THROW(ChannelFamily::dephasing(-0.1, 0.0), DomainError);
  const auto fam = ChannelFamily::dephasing(0.1, 0.0);
  EXPECT_THROW(fam.apply(QState::maximally_mixed(2), -1.0), DomainError);
  EXPECT_THROW(fam.apply(QState::maximally_mixed(3), 1.0), DimensionError);
}

TEST(Families, IdentityAtTimeZero) {
  Rng rng(3);
  const QState rho = random_mixed_state(2, rng);
  std::vector<ChannelFamily> fams{ChannelFamily::dephasing(0.3, 1.0), ChannelFamily::unitary(random_hermitian(2, rng)),
                                  dephasing_kraus(0.3, 1.0), dephasing_liouville(0.3, 1.0), mix(worked_mixture())};
  for (const auto& f : fams) {
    EXPECT_LE(max_abs(f.apply(rho, 0.0).matrix() - rho.matrix()), 1e-10) << f.kind();
  }
}

TEST(Families, UnitaryReproducesPhaseOnlyDephasing) {
  // <1|rho|0> picks up exp(-i lambda t) under H = -(lambda/2) sigma_z.
  Rng rng(4);
  for (double lambda : {0.5, -2.0, pi}) {
    const auto dep = ChannelFamily::dephasing(0.0, lambda);
    const auto uni = ChannelFamily::unitary(-0.5 * lambda * pauli_z());
    for (int rep = 0; rep < 10; ++rep) {
      const QState rho = random_mixed_state(2, rng);
      const double t = 6.0 * uniform01(rng);
      EXPECT_LE(max_abs(dep.apply(rho, t).matrix() - uni.apply(rho, t).matrix()), 1e-12);
    }
  }
}

TEST(Families, KrausAndLiouvilleMatchClosedForm) {
  Rng rng(5);
  const double gamma = 0.7;
  const double lambda = 1.3;
  const auto dep = ChannelFamily::dephasing(gamma, lambda);
  const auto kr = dephasing_kraus(gamma, lambda);
  const auto li = dephasing_liouville(gamma, lambda);
  for (int rep = 0; rep < 10; ++rep) {
    const CMatrix x = random_ginibre(2, 2, rng);
    const double t = 4.0 * uniform01(rng);
    EXPECT_LE(max_abs(dep.apply(x, t) - kr.apply(x, t)), 1e-12);
    EXPECT_LE(max_abs(dep.apply(x, t) - li.apply(x, t)), 1e-10);
  }
}

TEST(Mix, SingleComponentIsIdentical) {
  Rng rng(6);
  const auto fam = ChannelFamily::dephasing(0.2, 0.9);
  const auto mixed = mix(MixtureSpec({1.0}, {fam}));
  const CMatrix x = random_ginibre(2, 2, rng);
  EXPECT_LE(max_abs(mixed.apply(x, 1.3) - fam.apply(x, 1.3)), 0.0);
}

TEST(Mix, WorkedMultiplierVanishesAtTwo) {
  const auto mixed = mix(worked_mixture());
  const CMatrix out = mixed.apply(pauli_y(), 2.0);
  EXPECT_LE(std::abs(out(1, 0)), 1e-15);
  const Complex k = 0.5 * std::exp(-1.0 / 3.0) * (std::exp(Complex(0.0, -pi / 2.0)) + 1.0);
  EXPECT_LE(std::abs(mixed.apply(matrix_unit(2, 1, 0), 1.0)(1, 0) - k), 1e-15);
}

TEST(Mix, ModulusMatchesRadical) {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const double g1 = uniform01(rng);
    const double g2 = uniform01(rng);
    const double l1 = 6.0 * uniform01(rng);
    const double l2 = 6.0 * uniform01(rng);
    const double q1 = uniform01(rng);
    const auto mixed = mix(MixtureSpec({q1, 1.0 - q1}, {ChannelFamily::dephasing(g1, l1), ChannelFamily::dephasing(g2, l2)}));
    const double t = 5.0 * uniform01(rng);
    EXPECT_NEAR(std::abs(mixed.apply(matrix_unit(2, 1, 0), t)(1, 0)),
                oracle::kappa_modulus(q1, 1.0 - q1, g1, g2, l1, l2, t), 1e-12);
  }
}

TEST(Mix, IsConvexCombination) {
  Rng rng(8);
  const auto spec = MixtureSpec({0.2, 0.3, 0.5}, {ChannelFamily::dephasing(0.1, 1.0), ChannelFamily::unitary(random_hermitian(2, rng)),
                                                 dephasing_kraus(0.5, 0.0)});
  const auto mixed = mix(spec);
  const CMatrix x = random_ginibre(2, 2, rng);
  CMatrix expected = CMatrix::Zero(2, 2);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    expected += spec.weights()[i] * spec.components()[i].apply(x, 0.8);
  }
  EXPECT_LE(max_abs(mixed.apply(x, 0.8) - expected), 1e-12);
}

TEST(MixtureSpec, Validation) {
  const auto d = ChannelFamily::dephasing(0.1, 0.0);
  EXPECT_THROW(MixtureSpec({}, {}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({0.5, 0.6}, {d, d}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({1.5, -0.5}, {d, d}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({1.0}, {d, d}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({0.5, 0.5}, {d, ChannelFamily::identity(3)}), DimensionError);
}

TEST(Dilate, InitialStateIsProduct) {
  Rng rng(9);
  const auto spec = worked_mixture();
  const QState rho = random_mixed_state(2, rng);
  const CMatrix out = dilate(spec).apply(rho.matrix(), 0.0);
  EXPECT_LE(max_abs(out - kron(rho.matrix(), spec.ancilla_state().matrix())), 0.0);
}

TEST(Dilate, DegenerateWeightsKeepZeroBlock) {
  Rng rng(10);
  const auto a = ChannelFamily::dephasing(0.3, 1.0);
  const auto spec = MixtureSpec({1.0, 0.0}, {a, ChannelFamily::dephasing(0.1, 0.0)});
  const QState rho = random_mixed_state(2, rng);
  const auto fam = dilate(spec);
  EXPECT_EQ(fam.output_dim(), 4);
  EXPECT_LE(max_abs(fam.apply(rho, 1.1).matrix() - kron(a.apply(rho, 1.1).matrix(), basis_projector(2, 0))), 1e-15);
}

TEST(Dilate, MarginalsAndBlockStructure) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const double q1 = uniform01(rng);
    const auto spec = MixtureSpec({q1, 1.0 - q1}, {ChannelFamily::dephasing(uniform01(rng), 4.0 * uniform01(rng)),
                                                   ChannelFamily::unitary(random_hermitian(2, rng))});
    const QState rho = random_mixed_state(2, rng);
    const double t = 5.0 * uniform01(rng);
    const CMatrix out = dilate(spec).apply(rho.matrix(), t);
    const TensorLayout sa({2, 2});
    EXPECT_LE(max_abs(partial_trace(out, sa, {1}) - mix(spec).apply(rho.matrix(), t)), 1e-12);
    EXPECT_LE(max_abs(partial_trace(out, sa, {0}) - spec.ancilla_state().matrix()), 1e-12);
    // entries coupling different ancilla blocks
    for (Index r = 0; r < 4; ++r) {
      for (Index c = 0; c < 4; ++c) {
        if (r % 2 != c % 2) {
          EXPECT_LE(std::abs(out(r, c)), 1e-14);
        }
      }
    }
  }
}

TEST(Dilate, TraceNormAdditivity) {
  Rng rng(12);
  for (int rep = 0; rep < 50; ++rep) {
    const double q1 = uniform01(rng);
    const auto spec = MixtureSpec({q1, 1.0 - q1}, {ChannelFamily::dephasing(uniform01(rng), 5.0 * uniform01(rng)),
                                                   ChannelFamily::dephasing(uniform01(rng), 5.0 * uniform01(rng))});
    const CMatrix x = random_mixed_state(2, rng).matrix() - random_mixed_state(2, rng).matrix();
    const double t = 6.0 * uniform01(rng);
    double weighted = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      weighted += spec.weights()[i] * trace_norm(spec.components()[i].apply(x, t));
    }
    EXPECT_NEAR(trace_norm(dilate(spec).apply(x, t)), weighted, 1e-10);
  }
}

TEST(Microscopic, ZeroHamiltoniansFreezeTheProduct) {
  Rng rng(13);
  auto model = random_model(rng, 2);
  for (auto& h : model.hamiltonians) {
    h.setZero();
  }
  const auto fam = microscopic_family(model);
  const QState rho = random_mixed_state(2, rng);
  const CMatrix expected = kron(rho.matrix(), model.component_spec().ancilla_state().matrix());
  for (double t : {0.0, 0.7, 4.0}) {
    EXPECT_LE(max_abs(fam.apply(rho.matrix(), t) - expected), 1e-14);
  }
}

TEST(Microscopic, EquivalentToDilationOfReducedUnitaries) {
  Rng rng(14);
  for (int rep = 0; rep < 10; ++rep) {
    const auto model = random_model(rng, 2 + rep % 2);
    const auto micro = microscopic_family(model);
    const auto dil = dilate(model.component_spec());
    const QState rho = random_mixed_state(2, rng);
    for (double t : {0.3, 1.7, 4.9}) {
      EXPECT_LE(max_abs(micro.apply(rho.matrix(), t) - dil.apply(rho.matrix(), t)), 1e-10);
    }
  }
}

TEST(Microscopic, PropagatorFactorizes) {
  Rng rng(15);
  const auto model = random_model(rng, 3);
  const CMatrix h = model.total_hamiltonian();
  for (double t : {0.0, 0.9, 3.3}) {
    EXPECT_LE(max_abs(unitary_exp(h, t) - factorized_propagator(model, t)), 1e-10);
  }
}

TEST(Microscopic, Errors) {
  Rng rng(16);
  auto model = random_model(rng, 2);
  EXPECT_THROW(microscopic_family(model, 8), DimensionError);
  auto bad = model;
  bad.hamiltonians[0](0, 1) += 1.0;
  EXPECT_THROW(microscopic_family(bad), DomainError);
  auto wrong_dim = model;
  wrong_dim.hamiltonians[1] = random_hermitian(3, rng);
  EXPECT_THROW(microscopic_family(wrong_dim), DimensionError);
}

TEST(Cpt, IdentityChoiIsScaledProjector) {
  const auto report = verify_cpt(ChannelFamily::identity(2), {0.0, 1.0});
  EXPECT_TRUE(report.passed());
  const CMatrix choi = choi_matrix(ChannelFamily::identity(2), 1.0);
  CVector omega = CVector::Zero(4);
  omega(0) = 1.0;
  omega(3) = 1.0;
  EXPECT_LE(max_abs(choi - omega * omega.adjoint()), 1e-12);
  EXPECT_NEAR(report.worst_min_eigenvalue, 0.0, 1e-12);
}

TEST(Cpt, DephasingAndMixturesArePositive) {
  Rng rng(17);
  std::vector<double> times;
  for (int k = 0; k < 20; ++k) {
    times.push_back(0.5 * k);
  }
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = ChannelFamily::dephasing(uniform01(rng), 6.0 * uniform01(rng));
    const auto b = ChannelFamily::dephasing(uniform01(rng), 6.0 * uniform01(rng));
    const double q = uniform01(rng);
    const MixtureSpec spec({q, 1.0 - q}, {a, b});
    for (const auto& f : {a, mix(spec), dilate(spec)}) {
      const auto report = verify_cpt(f, times);
      EXPECT_TRUE(report.passed()) << f.kind() << " min eig " << report.worst_min_eigenvalue;
    }
  }
}

TEST(Cpt, DetectsTraceLoss) {
  const auto scaled = ChannelFamily::kraus(2, 2, [](double) { return std::vector<CMatrix>{std::sqrt(2.0) * identity(2)}; });
  const auto report = verify_cpt(scaled, {1.0});
  EXPECT_FALSE(report.passed());
  EXPECT_NEAR(report.worst_trace_residual, 1.0, 1e-12);
}

TEST(Cpt, DetectsPositiveButNotCompletelyPositiveMap) {
  // generator T - 1 with T the transposition superoperator:
  // X -> (1 + e^{-2t})/2 X + (1 - e^{-2t})/2 X^T
  CMatrix transposition = CMatrix::Zero(4, 4);
  for (Index r = 0; r < 2; ++r) {
    for (Index c = 0; c < 2; ++c) {
      transposition(r * 2 + c, c * 2 + r) = 1.0;
    }
  }
  const auto fam = ChannelFamily::liouville(transposition - identity(4));
  const auto report = verify_cpt(fam, {0.0, 1.0});
  EXPECT_LE(report.worst_trace_residual, 1e-10);
  EXPECT_NEAR(report.samples[0].min_choi_eigenvalue, 0.0, 1e-12);
  EXPECT_NEAR(report.samples[1].min_choi_eigenvalue, -0.5 * (1.0 - std::exp(-2.0)), 1e-10);
  EXPECT_FALSE(report.passed());
}
