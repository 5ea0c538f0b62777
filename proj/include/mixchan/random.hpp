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


#ifndef MIXCHAN_RANDOM_HPP
#define MIXCHAN_RANDOM_HPP

#include <cstdint>
#include <random>

#include "mixchan/qmath.hpp"

namespace mixchan {

using Rng = std::mt19937_64;

/// Engine for stream `index` of a run seeded with `seed`. Streams depend
/// only on (seed, index), so per-trial randomness is independent of the
/// order and thread in which trials execute.
inline Rng stream_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32U)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline CMatrix random_ginibre(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      g(i, j) = Complex(normal(rng), normal(rng));
    }
  }
  return g;
}

/// Hermitian matrix with Gaussian entries (GUE up to scale).
inline CMatrix random_hermitian(Index dim, Rng& rng) {
  const CMatrix g = random_ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

inline CMatrix random_unitary(Index dim, Rng& rng) {
  const CMatrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const Complex d = r(k, k);
    q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

inline CVector random_pure_vector(Index dim, Rng& rng) {
  const CVector v = random_ginibre(dim, 1, rng);
  return v / v.norm();
}

inline QState random_pure_state(Index dim, Rng& rng) { return QState::pure(random_pure_vector(dim, rng)); }

/// Full-rank random state G G^dag / Tr(G G^dag).
inline QState random_mixed_state(Index dim, Rng& rng) {
  const CMatrix g = random_ginibre(dim, dim, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  return QState(rho);
}

}  // namespace mixchan

#endif  // MIXCHAN_RANDOM_HPP
