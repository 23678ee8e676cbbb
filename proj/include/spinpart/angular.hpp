#pragma once

// Core angular-momentum toolbox: spin operators in the Dicke basis,
// rotations, Clebsch-Gordan coefficients, and unitary evolution for a
// single spin-J system.  Quantum numbers are carried as twice-integers
// (two_j, two_m) so half-integer spins stay exact.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spinpart {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Thrown when an iterative numerical routine cannot reach its accuracy
// target (as opposed to domain_error, which flags invalid inputs).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace angular {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Basic types
// ---------------------------------------------------------------------------

// Spin magnitude J stored as two_j = 2J >= 0.  The Dicke basis for this
// spin is ordered m = -J, -J+1, ..., +J (twice-values -two_j .. +two_j
// in steps of 2); index i corresponds to two_m = 2*i - two_j.
struct AngularMomentum {
  int two_j = 0;

  explicit AngularMomentum(int two_j_value) : two_j(two_j_value) {
    if (two_j < 0)
      throw std::domain_error("AngularMomentum: two_j must be non-negative, got " +
                              std::to_string(two_j));
  }

  int dim() const noexcept { return two_j + 1; }
  double j() const noexcept { return 0.5 * two_j; }

  // Basis index of |J,m>; throws if m is not a valid projection of J.
  int index_of(int two_m) const {
    if (std::abs(two_m) > two_j || ((two_m - two_j) % 2) != 0)
      throw std::domain_error("AngularMomentum: invalid projection two_m=" +
                              std::to_string(two_m) + " for two_j=" + std::to_string(two_j));
    return (two_m + two_j) / 2;
  }
  int two_m_at(int index) const { return 2 * index - two_j; }

  friend bool operator==(const AngularMomentum& a, const AngularMomentum& b) {
    return a.two_j == b.two_j;
  }
};

// Point on the unit sphere.  The constructor folds any (theta, phi) pair
// into the canonical ranges theta in [0, pi], phi in [0, 2*pi).
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  Direction(double theta_value, double phi_value) : theta(theta_value), phi(phi_value) {
    // Fold theta into [0, pi], adjusting phi by pi whenever theta reflects
    // through a pole, then reduce phi mod 2*pi.
    theta = std::fmod(theta, 2.0 * pi);
    if (theta < 0.0) theta += 2.0 * pi;
    if (theta > pi) {
      theta = 2.0 * pi - theta;
      phi += pi;
    }
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
  }

  static Direction z_axis() { return {0.0, 0.0}; }
  static Direction x_axis() { return {pi / 2.0, 0.0}; }
  static Direction y_axis() { return {pi / 2.0, pi / 2.0}; }

  Direction antipode() const { return {pi - theta, phi + pi}; }

  std::array<double, 3> unit_vector() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
  }
};

// Operator acting on the Dicke basis of a given spin.
struct Operator {
  AngularMomentum j;
  Matrix matrix;
};

// Density matrix of a spin-J system in the Dicke basis.  Factories in
// states.hpp guarantee the type invariants (Hermitian, unit trace,
// positive semidefinite); validate_state() re-checks them explicitly.
struct SpinState {
  AngularMomentum j;
  Matrix matrix;
};

inline void check_dims(const AngularMomentum& j, const Matrix& m, const char* who) {
  if (m.rows() != j.dim() || m.cols() != j.dim())
    throw std::domain_error(std::string(who) + ": matrix dimension " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            " does not match spin dimension " + std::to_string(j.dim()));
}

// Verifies the density-matrix invariants: Hermitian within hermitian_tol,
// trace 1 within trace_tol, eigenvalues >= -positivity_floor.
inline void validate_state(const SpinState& state, double hermitian_tol = 1e-12,
                           double trace_tol = 1e-12, double positivity_floor = 1e-9) {
  check_dims(state.j, state.matrix, "validate_state");
  const double herm = (state.matrix - state.matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermitian_tol)
    throw std::domain_error("validate_state: matrix not Hermitian (deviation " +
                            std::to_string(herm) + ")");
  const double tr_err = std::abs(state.matrix.trace() - cd(1.0, 0.0));
  if (tr_err > trace_tol)
    throw std::domain_error("validate_state: trace deviates from 1 by " + std::to_string(tr_err));
  Eigen::SelfAdjointEigenSolver<Matrix> es(state.matrix, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues().minCoeff();
  if (min_ev < -positivity_floor)
    throw std::domain_error("validate_state: negative eigenvalue " + std::to_string(min_ev));
}

// Population <J,m|rho|J,m>.
inline double population(const SpinState& state, int two_m) {
  const int i = state.j.index_of(two_m);
  return state.matrix(i, i).real();
}

// Off-diagonal element <J,m1|rho|J,m2>.
inline cd coherence(const SpinState& state, int two_m1, int two_m2) {
  return state.matrix(state.j.index_of(two_m1), state.j.index_of(two_m2));
}

// ---------------------------------------------------------------------------
// Spin operators and rotations
// ---------------------------------------------------------------------------

struct SpinOperators {
  Operator jx, jy, jz, jplus, jminus;
};

// Jz, J+/- (ladder convention J+-|J,m> = sqrt(J(J+1) - m(m+-1)) |J,m+-1>),
// and the Cartesian components Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i).
inline SpinOperators spin_operators(const AngularMomentum& j) {
  const int d = j.dim();
  Matrix jz = Matrix::Zero(d, d);
  Matrix jplus = Matrix::Zero(d, d);
  const double jj = j.j() * (j.j() + 1.0);
  for (int i = 0; i < d; ++i) {
    const double m = 0.5 * j.two_m_at(i);
    jz(i, i) = m;
    if (i + 1 < d) jplus(i + 1, i) = std::sqrt(jj - m * (m + 1.0));
  }
  const Matrix jminus = jplus.adjoint();
  const Matrix jx = 0.5 * (jplus + jminus);
  const Matrix jy = cd(0.0, -0.5) * (jplus - jminus);
  return {{j, jx}, {j, jy}, {j, jz}, {j, jplus}, {j, jminus}};
}

// Component of J along a unit direction n.
inline Operator spin_along(const AngularMomentum& j, const Direction& n) {
  const auto ops = spin_operators(j);
  const auto u = n.unit_vector();
  return {j, u[0] * ops.jx.matrix + u[1] * ops.jy.matrix + u[2] * ops.jz.matrix};
}

// exp(-i t H) for Hermitian H, via eigendecomposition.
inline Matrix unitary_from_generator(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw numerical_error("unitary_from_generator: eigendecomposition failed");
  const auto& v = es.eigenvectors();
  Vector phases(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k)
    phases(k) = std::exp(cd(0.0, -t * es.eigenvalues()(k)));
  return v * phases.asDiagonal() * v.adjoint();
}

// Rotation taking the +z axis to n: R(n) = exp(-i phi Jz) exp(-i theta Jy).
// Column m of R(n) is the |J,m> eigenstate of J.n.
inline Matrix rotation_unitary(const AngularMomentum& j, const Direction& n) {
  const auto ops = spin_operators(j);
  const int d = j.dim();
  Matrix rz = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    rz(i, i) = std::exp(cd(0.0, -n.phi * 0.5 * j.two_m_at(i)));
  return rz * unitary_from_generator(ops.jy.matrix, n.theta);
}

// ---------------------------------------------------------------------------
// Clebsch-Gordan coefficients
// ---------------------------------------------------------------------------

namespace detail {

// log(n!) for 0 <= n <= 40, enough for all couplings used here
// (arguments stay below j1 + j2 + J + 1 <= 40 for two_j sums <= 78).
inline double log_factorial(int n) {
  static const auto table = [] {
    std::array<double, 41> t{};
    t[0] = 0.0;
    for (int i = 1; i <= 40; ++i) t[i] = t[i - 1] + std::log(double(i));
    return t;
  }();
  if (n < 0 || n > 40)
    throw std::domain_error("log_factorial: argument " + std::to_string(n) + " out of range");
  return table[size_t(n)];
}

inline void check_spin_projection(int two_j, int two_m, const char* who) {
  if (two_j < 0)
    throw std::domain_error(std::string(who) + ": negative two_j " + std::to_string(two_j));
  if (std::abs(two_m) > two_j || ((two_m - two_j) % 2) != 0)
    throw std::domain_error(std::string(who) + ": invalid projection two_m=" +
                            std::to_string(two_m) + " for two_j=" + std::to_string(two_j));
}

}  // namespace detail

// <j1 m1; j2 m2 | J M> with Condon-Shortley phases (Racah's closed form).
// Returns 0 when M != m1 + m2; invalid quantum numbers raise domain_error.
inline double clebsch_gordan(int two_j1, int two_m1, int two_j2, int two_m2, int two_big_j,
                             int two_big_m) {
  detail::check_spin_projection(two_j1, two_m1, "clebsch_gordan");
  detail::check_spin_projection(two_j2, two_m2, "clebsch_gordan");
  detail::check_spin_projection(two_big_j, two_big_m, "clebsch_gordan");
  if (((two_j1 + two_j2 + two_big_j) % 2) != 0)
    throw std::domain_error("clebsch_gordan: j1 + j2 + J must be an integer");
  if (two_big_j < std::abs(two_j1 - two_j2) || two_big_j > two_j1 + two_j2)
    throw std::domain_error("clebsch_gordan: triangle rule violated for two_J=" +
                            std::to_string(two_big_j));
  if (two_big_m != two_m1 + two_m2) return 0.0;

  using detail::log_factorial;
  // All factorial arguments below are halves of even twice-integers.
  const auto half = [](int two_x) { return two_x / 2; };
  const double log_prefactor =
      std::log(double(two_big_j + 1)) + log_factorial(half(two_j1 + two_j2 - two_big_j)) +
      log_factorial(half(two_j1 - two_j2 + two_big_j)) +
      log_factorial(half(-two_j1 + two_j2 + two_big_j)) -
      log_factorial(half(two_j1 + two_j2 + two_big_j) + 1) +
      log_factorial(half(two_big_j + two_big_m)) + log_factorial(half(two_big_j - two_big_m)) +
      log_factorial(half(two_j1 - two_m1)) + log_factorial(half(two_j1 + two_m1)) +
      log_factorial(half(two_j2 - two_m2)) + log_factorial(half(two_j2 + two_m2));

  // k runs over all values keeping every factorial argument non-negative.
  const int two_a = two_j1 + two_j2 - two_big_j;
  const int two_b = two_j1 - two_m1;
  const int two_c = two_j2 + two_m2;
  const int two_d = two_big_j - two_j2 + two_m1;  // appears as (d/2 + k)!
  const int two_e = two_big_j - two_j1 - two_m2;  // appears as (e/2 + k)!
  const int k_min = std::max({0, -half(two_d), -half(two_e)});
  const int k_max = std::min({half(two_a), half(two_b), half(two_c)});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_term = log_factorial(k) + log_factorial(half(two_a) - k) +
                            log_factorial(half(two_b) - k) + log_factorial(half(two_c) - k) +
                            log_factorial(half(two_d) + k) + log_factorial(half(two_e) + k);
    const double term = std::exp(0.5 * log_prefactor - log_term);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Evolution and expectation values
// ---------------------------------------------------------------------------

// rho -> U rho U^dagger with U = exp(-i t H); H must be Hermitian.
inline SpinState evolve(const SpinState& state, const Operator& generator, double t) {
  if (!(generator.j == state.j))
    throw std::domain_error("evolve: generator and state act on different spins");
  check_dims(state.j, state.matrix, "evolve");
  const double herm = (generator.matrix - generator.matrix.adjoint()).cwiseAbs().maxCoeff();
  // Relative tolerance: products of Hermitian factors (e.g. chi * Jx^2 at
  // MHz-scale rates) carry round-off asymmetry proportional to their norm.
  const double scale = std::max(1.0, generator.matrix.cwiseAbs().maxCoeff());
  if (herm > 1e-10 * scale) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", herm);
    throw std::domain_error(std::string("evolve: generator not Hermitian (deviation ") + buf +
                            ")");
  }
  const Matrix u = unitary_from_generator(generator.matrix, t);
  Matrix out = u * state.matrix * u.adjoint();
  out = 0.5 * (out + Matrix(out.adjoint()));  // scrub round-off drift
  return {state.j, std::move(out)};
}

// Tr(rho A).  Real for Hermitian A; returned as complex for generality.
inline cd expectation(const SpinState& state, const Operator& op) {
  if (!(op.j == state.j))
    throw std::domain_error("expectation: operator and state act on different spins");
  return (state.matrix * op.matrix).trace();
}

}  // namespace angular
}  // namespace spinpart
