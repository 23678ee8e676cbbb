#pragma once

// State factories and one-axis-twisting evolution for a single spin J.

#include "spinpart/angular.hpp"

namespace spinpart {
namespace states {

using angular::AngularMomentum;
using angular::Direction;
using angular::SpinState;

// Parameters of the twisting Hamiltonian H = chi * Jx^2 + larmor * Jz
// (angular frequencies in rad/s, duration in seconds).
struct OatParams {
  double chi = 0.0;
  double larmor = 0.0;
  double duration = 0.0;
};

inline SpinState from_density(const AngularMomentum& j, Matrix rho) {
  SpinState state{j, std::move(rho)};
  angular::validate_state(state);
  return state;
}

// Pure state from a ket; the amplitudes are normalized internally.
inline SpinState superposition(const AngularMomentum& j, const Vector& amplitudes) {
  if (amplitudes.size() != j.dim())
    throw std::domain_error("superposition: expected " + std::to_string(j.dim()) +
                            " amplitudes, got " + std::to_string(amplitudes.size()));
  const double norm = amplitudes.norm();
  if (norm < 1e-300) throw std::domain_error("superposition: zero state vector");
  const Vector psi = amplitudes / norm;
  return {j, psi * psi.adjoint()};
}

// |J,m><J,m|.
inline SpinState dicke(const AngularMomentum& j, int two_m) {
  Vector psi = Vector::Zero(j.dim());
  psi(j.index_of(two_m)) = 1.0;
  return {j, psi * psi.adjoint()};
}

// Spin coherent state along n: R(n)|J,+J>.
inline SpinState coherent(const AngularMomentum& j, const Direction& n) {
  const Matrix r = angular::rotation_unitary(j, n);
  const Vector psi = r.col(j.dim() - 1);
  return {j, psi * psi.adjoint()};
}

// Balanced superposition of the stretched states,
// (|J,-J> + e^{i alpha} |J,+J>) / sqrt(2).
inline SpinState cat_state(const AngularMomentum& j, double alpha) {
  if (j.two_j == 0) throw std::domain_error("cat_state: need two_j > 0");
  Vector psi = Vector::Zero(j.dim());
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(j.dim() - 1) = std::exp(cd(0.0, alpha)) / std::sqrt(2.0);
  return {j, psi * psi.adjoint()};
}

// Identity / dim: the fully depolarized spin.
inline SpinState maximally_mixed(const AngularMomentum& j) {
  return {j, Matrix::Identity(j.dim(), j.dim()) / double(j.dim())};
}

// Evolves under H = chi * Jx^2 + larmor * Jz for params.duration.
// chi = 0 reduces to a pure Larmor rotation about z.
inline SpinState one_axis_twisting(const SpinState& state, const OatParams& params) {
  if (params.chi < 0.0)
    throw std::domain_error("one_axis_twisting: chi must be non-negative");
  if (params.duration < 0.0)
    throw std::domain_error("one_axis_twisting: duration must be non-negative");
  const auto ops = angular::spin_operators(state.j);
  const Matrix h =
      params.chi * (ops.jx.matrix * ops.jx.matrix) + params.larmor * ops.jz.matrix;
  return angular::evolve(state, {state.j, h}, params.duration);
}

}  // namespace states
}  // namespace spinpart
