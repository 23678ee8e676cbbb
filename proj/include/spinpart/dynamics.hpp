#pragma once

// Open-system dynamics between two angular-momentum manifolds: dipole
// coupling operators, the spontaneous-emission (pair-loss) map, ideal Rabi
// pulses, and a deterministic Lindblad master-equation integrator.

#include "spinpart/angular.hpp"

#include <array>
#include <cstdio>
#include <vector>

namespace spinpart {
namespace dynamics {

using angular::AngularMomentum;
using angular::SpinState;

// Drive polarization amplitudes over (sigma-, pi, sigma+) = (q = -1, 0, +1).
using DrivePolarization = std::array<cd, 3>;

inline DrivePolarization pol_sigma_minus() { return {cd(1.0), cd(0.0), cd(0.0)}; }
inline DrivePolarization pol_pi() { return {cd(0.0), cd(1.0), cd(0.0)}; }
inline DrivePolarization pol_sigma_plus() { return {cd(0.0), cd(0.0), cd(1.0)}; }
// Linear x polarization e_x = (e_+ + e_-)/sqrt(2).
inline DrivePolarization pol_x() {
  const double s = 1.0 / std::sqrt(2.0);
  return {cd(s), cd(0.0), cd(s)};
}

// Ground manifold J, excited manifold J', decay rate gamma = 1/tau, and
// the three dipole coupling operators D_q: ground -> excited with
// <J', m+q | D_q | J, m> equal to the corresponding Clebsch-Gordan
// coefficient.  The jump operators L_q = sqrt(gamma) D_q^dag satisfy
// sum_q L_q^dag L_q = gamma * identity on the excited manifold.
struct TransitionSystem {
  AngularMomentum j_ground;
  AngularMomentum j_excited;
  double gamma = 0.0;
  std::array<Matrix, 3> d;  // D_q at index q+1

  const Matrix& d_op(int q) const {
    if (q < -1 || q > 1) throw std::domain_error("TransitionSystem::d_op: q must be -1, 0, +1");
    return d[size_t(q + 1)];
  }
  Matrix drive_op(const DrivePolarization& pol) const {
    return pol[0] * d_op(-1) + pol[1] * d_op(0) + pol[2] * d_op(+1);
  }
};

inline TransitionSystem transition_system(const AngularMomentum& j_ground,
                                          const AngularMomentum& j_excited, double gamma) {
  if (gamma < 0.0) throw std::domain_error("transition_system: gamma must be >= 0");
  if (((j_excited.two_j - j_ground.two_j) % 2) != 0 ||
      std::abs(j_excited.two_j - j_ground.two_j) > 2 || j_excited.two_j + j_ground.two_j < 2)
    throw std::domain_error("transition_system: manifolds J=" + std::to_string(0.5 * j_ground.two_j) +
                            ", J'=" + std::to_string(0.5 * j_excited.two_j) +
                            " are not dipole-coupled");
  TransitionSystem sys{j_ground, j_excited, gamma, {}};
  for (int q = -1; q <= 1; ++q) {
    Matrix dq = Matrix::Zero(j_excited.dim(), j_ground.dim());
    for (int col = 0; col < j_ground.dim(); ++col) {
      const int two_m = j_ground.two_m_at(col);
      const int two_mp = two_m + 2 * q;
      if (std::abs(two_mp) > j_excited.two_j) continue;
      dq(j_excited.index_of(two_mp), col) =
          angular::clebsch_gordan(j_ground.two_j, two_m, 2, 2 * q, j_excited.two_j, two_mp);
    }
    sys.d[size_t(q + 1)] = std::move(dq);
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Spontaneous emission
// ---------------------------------------------------------------------------

// Full decay of an excited-manifold state (J' = J+1) into the ground
// manifold: rho = sum_q K_q rho' K_q^dag with K_q = D_q^dag.  This is the
// photon-polarization trace; completeness of the K_q preserves the trace.
inline SpinState spontaneous_emission_map(const TransitionSystem& sys, const SpinState& excited) {
  if (sys.j_excited.two_j != sys.j_ground.two_j + 2)
    throw std::domain_error("spontaneous_emission_map: needs the J' = J + 1 configuration");
  if (!(excited.j == sys.j_excited))
    throw std::domain_error("spontaneous_emission_map: state is not on the excited manifold");
  Matrix rho = Matrix::Zero(sys.j_ground.dim(), sys.j_ground.dim());
  for (int q = -1; q <= 1; ++q) {
    const Matrix k = sys.d_op(q).adjoint();
    rho += k * excited.matrix * k.adjoint();
  }
  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  return {sys.j_ground, std::move(rho)};
}

// ---------------------------------------------------------------------------
// Ideal (decay-free) Rabi pulse
// ---------------------------------------------------------------------------

struct RabiResult {
  SpinState excited;            // renormalized excited-manifold block
  double leakage = 0.0;         // population left in the ground manifold
  double dominant_coupling = 0.0;  // CG weight that defines the pulse area
};

namespace detail {

// Largest |D_pol| matrix element out of the populated ground states: the
// transition whose CG-weighted Rabi frequency defines the pulse area.
inline double dominant_coupling_weight(const Matrix& d_pol, const SpinState& ground) {
  double best = 0.0;
  for (int col = 0; col < ground.matrix.rows(); ++col) {
    if (ground.matrix(col, col).real() <= 1e-12) continue;
    best = std::max(best, d_pol.col(col).cwiseAbs().maxCoeff());
  }
  return best;
}

}  // namespace detail

// Resonant two-manifold evolution without decay, for a pulse of the given
// area.  The area is defined on the strongest coupled transition of the
// populated initial state: a pulse of area pi fully inverts that pair.
inline RabiResult rabi_pulse_ideal(const TransitionSystem& sys, const SpinState& ground,
                                   const DrivePolarization& polarization, double area) {
  if (!(ground.j == sys.j_ground))
    throw std::domain_error("rabi_pulse_ideal: state is not on the ground manifold");
  if (area < 0.0) throw std::domain_error("rabi_pulse_ideal: area must be >= 0");
  double norm = 0.0;
  for (const auto& a : polarization) norm += std::norm(a);
  if (norm < 1e-24) throw std::domain_error("rabi_pulse_ideal: zero polarization vector");
  DrivePolarization pol = polarization;
  for (auto& a : pol) a /= std::sqrt(norm);

  const Matrix d_pol = sys.drive_op(pol);
  const double weight = detail::dominant_coupling_weight(d_pol, ground);
  if (weight < 1e-12)
    throw std::domain_error("rabi_pulse_ideal: initial state is not coupled by this polarization");

  const int dg = sys.j_ground.dim(), de = sys.j_excited.dim();
  Matrix h = Matrix::Zero(dg + de, dg + de);
  h.block(dg, 0, de, dg) = 0.5 * d_pol;
  h.block(0, dg, dg, de) = 0.5 * d_pol.adjoint();
  Matrix joint = Matrix::Zero(dg + de, dg + de);
  joint.block(0, 0, dg, dg) = ground.matrix;

  // Unit Rabi frequency, so duration = area / weight flips the dominant pair.
  const Matrix u = angular::unitary_from_generator(h, area / weight);
  const Matrix evolved = u * joint * u.adjoint();
  Matrix exc = evolved.block(dg, dg, de, de);
  const double p_exc = exc.trace().real();
  if (p_exc < 1e-12)
    throw std::domain_error("rabi_pulse_ideal: pulse produced no excited population");
  exc /= p_exc;
  exc = 0.5 * (exc + Matrix(exc.adjoint()));
  return {SpinState{sys.j_excited, std::move(exc)}, 1.0 - p_exc, weight};
}

// ---------------------------------------------------------------------------
// Lindblad master equation on the joint ground + excited space
// ---------------------------------------------------------------------------

// Block density matrix on H_J (+) H_J', ordered ground block first.
struct JointState {
  AngularMomentum j_ground;
  AngularMomentum j_excited;
  Matrix matrix;  // (dg + de) x (dg + de), Hermitian, trace 1

  Matrix ground_block() const {
    return matrix.block(0, 0, j_ground.dim(), j_ground.dim());
  }
  Matrix excited_block() const {
    const int dg = j_ground.dim();
    return matrix.block(dg, dg, j_excited.dim(), j_excited.dim());
  }
  double ground_population() const { return ground_block().trace().real(); }
  double excited_population() const { return excited_block().trace().real(); }
};

inline JointState joint_from_ground(const TransitionSystem& sys, const SpinState& ground) {
  if (!(ground.j == sys.j_ground))
    throw std::domain_error("joint_from_ground: state is not on the ground manifold");
  const int dg = sys.j_ground.dim(), de = sys.j_excited.dim();
  Matrix m = Matrix::Zero(dg + de, dg + de);
  m.block(0, 0, dg, dg) = ground.matrix;
  return {sys.j_ground, sys.j_excited, std::move(m)};
}

inline JointState joint_from_excited(const TransitionSystem& sys, const SpinState& excited) {
  if (!(excited.j == sys.j_excited))
    throw std::domain_error("joint_from_excited: state is not on the excited manifold");
  const int dg = sys.j_ground.dim(), de = sys.j_excited.dim();
  Matrix m = Matrix::Zero(dg + de, dg + de);
  m.block(dg, dg, de, de) = excited.matrix;
  return {sys.j_ground, sys.j_excited, std::move(m)};
}

namespace detail {

// Sum of singular values of a small matrix.
inline double trace_norm(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues().sum();
}

struct LindbladRhs {
  Matrix h;                    // joint Hamiltonian
  std::vector<Matrix> jumps;   // joint jump operators L_q
  std::vector<Matrix> damping; // precomputed L_q^dag L_q

  Matrix operator()(const Matrix& rho) const {
    const cd i_unit(0.0, 1.0);
    Matrix out = -i_unit * (h * rho - rho * h);
    for (size_t k = 0; k < jumps.size(); ++k) {
      out += jumps[k] * rho * jumps[k].adjoint();
      out -= 0.5 * (damping[k] * rho + rho * damping[k]);
    }
    return out;
  }
};

inline Matrix rk4_run(const LindbladRhs& rhs, Matrix rho, double duration, long steps) {
  const double h = duration / double(steps);
  for (long s = 0; s < steps; ++s) {
    const Matrix k1 = rhs(rho);
    const Matrix k2 = rhs(rho + 0.5 * h * k1);
    const Matrix k3 = rhs(rho + 0.5 * h * k2);
    const Matrix k4 = rhs(rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

}  // namespace detail

// Integrates d rho/dt = -i[H, rho] + sum_q (L_q rho L_q^dag
// - {L_q^dag L_q, rho}/2) with H = (rabi/2)(D_pol + D_pol^dag) +
// detuning * P_excited and L_q = sqrt(gamma) D_q^dag.  Fixed-step RK4;
// the step starts at min(1/(50 rabi), 1/(50 gamma), 1/(50 |detuning|))
// and is halved until two successive refinements agree to 1e-8 in trace
// norm; failure to converge raises numerical_error.
inline JointState lindblad_evolve(const TransitionSystem& sys, const JointState& joint,
                                  const DrivePolarization& polarization, double rabi,
                                  double detuning, double duration) {
  if (duration < 0.0) throw std::domain_error("lindblad_evolve: duration must be >= 0");
  if (joint.j_ground.two_j != sys.j_ground.two_j || joint.j_excited.two_j != sys.j_excited.two_j)
    throw std::domain_error("lindblad_evolve: state manifolds do not match the system");
  if (duration == 0.0) return joint;

  const int dg = sys.j_ground.dim(), de = sys.j_excited.dim();
  const int d = dg + de;
  detail::LindbladRhs rhs;
  const Matrix d_pol = sys.drive_op(polarization);
  rhs.h = Matrix::Zero(d, d);
  rhs.h.block(dg, 0, de, dg) = 0.5 * rabi * d_pol;
  rhs.h.block(0, dg, dg, de) = 0.5 * rabi * d_pol.adjoint();
  for (int i = 0; i < de; ++i) rhs.h(dg + i, dg + i) += detuning;
  if (sys.gamma > 0.0) {
    const double root_gamma = std::sqrt(sys.gamma);
    for (int q = -1; q <= 1; ++q) {
      Matrix l = Matrix::Zero(d, d);
      l.block(0, dg, dg, de) = root_gamma * sys.d_op(q).adjoint();
      rhs.damping.push_back(l.adjoint() * l);
      rhs.jumps.push_back(std::move(l));
    }
  }

  double step = duration;
  const auto cap_step = [&step](double rate) {
    if (rate > 0.0) step = std::min(step, 1.0 / (50.0 * rate));
  };
  cap_step(std::abs(rabi));
  cap_step(sys.gamma);
  cap_step(std::abs(detuning));
  long steps = long(std::ceil(duration / step));

  Matrix coarse = detail::rk4_run(rhs, joint.matrix, duration, steps);
  for (int halving = 0; halving < 12; ++halving) {
    steps *= 2;
    Matrix fine = detail::rk4_run(rhs, joint.matrix, duration, steps);
    const double err = detail::trace_norm(fine - coarse);
    if (err < 1e-8) {
      fine = 0.5 * (fine + Matrix(fine.adjoint()));
      return {sys.j_ground, sys.j_excited, std::move(fine)};
    }
    coarse = std::move(fine);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.4g s, %ld steps reached", duration, steps);
  throw numerical_error(
      std::string("lindblad_evolve: step-size refinement did not converge to 1e-8 in trace norm "
                  "(duration ") +
      buf + ")");
}

}  // namespace dynamics
}  // namespace spinpart
