#pragma once

// Shared test utilities: seeded random states, directions, and matrix
// comparison helpers.  Everything is deterministic for fixed seeds.

#include "spinpart/angular.hpp"
#include "spinpart/partition.hpp"
#include "spinpart/rng.hpp"

#include <cmath>
#include <cstdint>

namespace testutil {

using spinpart::cd;
using spinpart::DeterministicRng;
using spinpart::Matrix;
using spinpart::Vector;

inline Vector random_complex_vector(int dim, DeterministicRng& rng) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cd(rng.normal(), rng.normal());
  return v;
}

// Haar-distributed pure state vector.
inline Vector haar_pure(int dim, DeterministicRng& rng) {
  Vector v = random_complex_vector(dim, rng);
  return v / v.norm();
}

// Ginibre-induced random density matrix (full rank almost surely).
inline Matrix ginibre_density(int dim, DeterministicRng& rng) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = cd(rng.normal(), rng.normal());
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + Matrix(rho.adjoint()));
}

inline spinpart::angular::Direction random_direction(DeterministicRng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * spinpart::angular::pi * rng.uniform();
  return {std::acos(z), phi};
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Random mixed state on a spin-j manifold.
inline spinpart::angular::SpinState random_spin_state(const spinpart::angular::AngularMomentum& j,
                                                      DeterministicRng& rng) {
  return {j, ginibre_density(j.dim(), rng)};
}

// Random pure symmetric state as a Dicke-basis amplitude vector.
inline spinpart::angular::SpinState random_pure_state(const spinpart::angular::AngularMomentum& j,
                                                      DeterministicRng& rng) {
  const Vector amp = haar_pure(j.dim(), rng);
  return {j, amp * amp.adjoint()};
}

// Lifts a 3x3 pair matrix (basis +1, 0, -1) to a spin-1 state in the Dicke
// basis (m = -1, 0, +1): pure index reversal.
inline spinpart::angular::SpinState lift_pair_to_spin1(const spinpart::partition::PairState& pair) {
  Matrix m(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = pair.matrix(2 - r, 2 - c);
  return {spinpart::angular::AngularMomentum(2), m};
}

// Random Ginibre pair state in the (+1, 0, -1) basis.
inline spinpart::partition::PairState random_pair(DeterministicRng& rng) {
  return {ginibre_density(3, rng)};
}

}  // namespace testutil
