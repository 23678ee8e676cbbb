#pragma once

// Pair partition of the 2J-qubit ensemble: operators that annihilate one
// qubit pair, the reduced two-qubit (spin-1) marginal, pair Husimi values,
// projection probabilities, light-shift ratios, finite-shot sampling, and
// a brute-force qubit-space oracle for tests.

#include "spinpart/angular.hpp"
#include "spinpart/rng.hpp"

#include <vector>

namespace spinpart {
namespace partition {

using angular::AngularMomentum;
using angular::Direction;
using angular::SpinState;

// Two-qubit marginal in the spin-1 triplet basis, ordered
// (|1,+1> = up-up, |1,0> = symmetric, |1,-1> = down-down).
struct PairState {
  Matrix matrix;  // 3x3, Hermitian, trace 1
};

inline void validate_pair(const PairState& pair, double positivity_floor = 1e-9) {
  if (pair.matrix.rows() != 3 || pair.matrix.cols() != 3)
    throw std::domain_error("validate_pair: matrix must be 3x3");
  angular::validate_state({AngularMomentum(2), pair.matrix}, 1e-12, 1e-12, positivity_floor);
}

// Index of the spin-1 component mu = +1, 0, -1 in the basis above.
inline int pair_index(int mu) {
  if (mu < -1 || mu > 1) throw std::domain_error("pair_index: mu must be -1, 0 or +1");
  return 1 - mu;
}

// Probability that a given qubit pair points up along z when the ensemble
// sits in |J,m>:  Q_m = (J+m)(J+m-1) / (2J(2J-1)).
inline double q_dicke(const AngularMomentum& j, int two_m) {
  if (j.two_j < 2) throw std::domain_error("q_dicke: need two_j >= 2");
  const int k = (j.two_j + two_m) / 2;  // number of up qubits, J+m
  (void)j.index_of(two_m);              // validates the projection
  if (k < 2) return 0.0;
  return double(k) * double(k - 1) / (double(j.two_j) * double(j.two_j - 1));
}

// The three pair-annihilation operators P_mu: (2J-1)-dim <- (2J+1)-dim,
// removing one qubit pair with spin-1 component mu.
struct PairAnnihilators {
  AngularMomentum source;  // spin J
  AngularMomentum target;  // spin J-1
  std::array<Matrix, 3> ops;  // indexed by pair_index(mu)

  const Matrix& op(int mu) const { return ops[size_t(pair_index(mu))]; }
};

namespace detail {

// log C(n, k); zero probability (rather than an error) for k outside [0, n].
inline bool log_choose(int n, int k, double& out) {
  if (k < 0 || k > n) return false;
  using angular::detail::log_factorial;
  out = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  return true;
}

}  // namespace detail

// <J-1, m-mu | P_mu | J, m> = sqrt( C(2, mu+1) * C(2J-2, J+m-mu-1) / C(2J, J+m) ),
// the overlap of a symmetric 2J-qubit state with (pair) x (rest).
inline PairAnnihilators pair_annihilation_ops(const AngularMomentum& j) {
  if (j.two_j < 2) throw std::domain_error("pair_annihilation_ops: need two_j >= 2");
  const AngularMomentum target(j.two_j - 2);
  PairAnnihilators result{j, target, {}};
  for (int mu = -1; mu <= 1; ++mu) {
    Matrix p = Matrix::Zero(target.dim(), j.dim());
    for (int col = 0; col < j.dim(); ++col) {
      const int k = col;  // J + m, number of up qubits
      double log_pair, log_rest, log_total;
      if (!detail::log_choose(2, mu + 1, log_pair)) continue;
      if (!detail::log_choose(j.two_j - 2, k - mu - 1, log_rest)) continue;
      if (!detail::log_choose(j.two_j, k, log_total)) continue;
      const int row = k - mu - 1;  // (J-1) + (m - mu)
      if (row < 0 || row >= target.dim()) continue;
      p(row, col) = std::exp(0.5 * (log_pair + log_rest - log_total));
    }
    result.ops[size_t(pair_index(mu))] = std::move(p);
  }
  return result;
}

// Two-qubit marginal: (rho_pair)_{mu nu} = Tr(P_mu rho P_nu^dagger).
inline PairState reduced_pair_state(const SpinState& state) {
  if (state.j.two_j < 2) throw std::domain_error("reduced_pair_state: need two_j >= 2");
  const auto anni = pair_annihilation_ops(state.j);
  Matrix pair = Matrix::Zero(3, 3);
  for (int mu = -1; mu <= 1; ++mu)
    for (int nu = -1; nu <= 1; ++nu)
      pair(pair_index(mu), pair_index(nu)) =
          (anni.op(mu) * state.matrix * anni.op(nu).adjoint()).trace();
  pair = 0.5 * (pair + Matrix(pair.adjoint()));
  return {std::move(pair)};
}

// Populations of the J.n eigenbasis: Pi_m(n) = <m| R^dag(n) rho R(n) |m>,
// ordered m = -J..+J.  Tiny negative round-off is clamped to zero.
inline Eigen::VectorXd projection_probabilities(const SpinState& state, const Direction& n) {
  const Matrix r = angular::rotation_unitary(state.j, n);
  const Matrix rotated = r.adjoint() * state.matrix * r;
  Eigen::VectorXd probs(state.j.dim());
  for (int i = 0; i < state.j.dim(); ++i) probs(i) = std::max(0.0, rotated(i, i).real());
  return probs;
}

// Pair Husimi value Q_pair(n) = <up-up_n| rho_pair |up-up_n>: the reduced
// pair state evaluated against the spin-1 coherent state along n.
inline double pair_husimi(const SpinState& state, const Direction& n) {
  const PairState pair = reduced_pair_state(state);
  const Matrix r1 = angular::rotation_unitary(AngularMomentum(2), n);
  // Spin-1 basis here is m = -1, 0, +1 (Dicke order); coherent ket is the
  // last column.  Convert to the pair basis (+1, 0, -1) by reversal.
  Vector ket(3);
  ket(pair_index(+1)) = r1(2, 2);
  ket(pair_index(0)) = r1(1, 2);
  ket(pair_index(-1)) = r1(0, 2);
  const Vector image = pair.matrix * ket;
  return ket.dot(image).real();
}

// Same quantity evaluated as the population-weighted sum over projections,
// Q_pair(n) = sum_m q_dicke(m) Pi_m(n); used to cross-check pair_husimi.
inline double pair_husimi_population_sum(const SpinState& state, const Direction& n) {
  if (state.j.two_j < 2) throw std::domain_error("pair_husimi_population_sum: need two_j >= 2");
  const Eigen::VectorXd probs = projection_probabilities(state, n);
  double q = 0.0;
  for (int i = 0; i < state.j.dim(); ++i)
    q += q_dicke(state.j, state.j.two_m_at(i)) * probs(i);
  return q;
}

// Light polarizations addressing the three pair components: sigma- light
// projects onto the up-up pair (mu = +1), pi onto the symmetric component
// (mu = 0), sigma+ onto down-down (mu = -1).
enum class Polarization { sigma_minus, pi, sigma_plus };

inline int pair_component_of(Polarization pol) {
  switch (pol) {
    case Polarization::sigma_minus: return +1;
    case Polarization::pi: return 0;
    case Polarization::sigma_plus: return -1;
  }
  throw std::domain_error("pair_component_of: invalid polarization");
}

// Unnormalized post-absorption state P_mu rho P_mu^dagger on the J-1
// manifold, plus its trace: the relative light shift V/V0 experienced by
// the probe (the detection signal of the pair projection).
struct ProjectedPair {
  AngularMomentum j;  // spin of the lower manifold, J-1
  Matrix matrix;      // unnormalized, trace = lightshift_ratio
  double lightshift_ratio = 0.0;
};

inline ProjectedPair projected_excited_state(const SpinState& state, Polarization pol) {
  if (state.j.two_j < 2) throw std::domain_error("projected_excited_state: need two_j >= 2");
  const auto anni = pair_annihilation_ops(state.j);
  const int mu = pair_component_of(pol);
  Matrix projected = anni.op(mu) * state.matrix * anni.op(mu).adjoint();
  const double ratio = projected.trace().real();
  return {anni.target, std::move(projected), ratio};
}

// Multinomial sample of projection counts along n; identical seeds give
// identical counts.
inline std::vector<long> sample_projections(const SpinState& state, const Direction& n,
                                            long shots, std::uint64_t seed) {
  if (shots < 1) throw std::domain_error("sample_projections: shots must be >= 1");
  const Eigen::VectorXd probs = projection_probabilities(state, n);
  std::vector<double> p(probs.data(), probs.data() + probs.size());
  DeterministicRng rng(seed);
  return rng.multinomial(p, shots);
}

// ---------------------------------------------------------------------------
// Brute-force oracle: explicit 2^N qubit-space computation
// ---------------------------------------------------------------------------

// Embedding between the spin-1 triplet basis (+1, 0, -1) and the two-qubit
// product basis (|00>, |01>, |10>, |11>), bit value 1 = up:
// |1,+1> -> |11>, |1,0> -> (|01>+|10>)/sqrt(2), |1,-1> -> |00>.
inline Matrix pair_to_qubit_embedding() {
  Matrix t = Matrix::Zero(4, 3);
  const double s = 1.0 / std::sqrt(2.0);
  t(3, pair_index(+1)) = 1.0;
  t(1, pair_index(0)) = s;
  t(2, pair_index(0)) = s;
  t(0, pair_index(-1)) = 1.0;
  return t;
}

// Embeds a Dicke-basis state of N = 2J qubits into the full 2^N product
// space, partial-traces all qubits but the first two, and maps the result
// to the spin-1 basis.  Exponential cost; test oracle only, hence N <= 8.
inline PairState brute_force_pair_oracle(const Vector& amplitudes, int n_qubits) {
  if (n_qubits < 2 || n_qubits > 8)
    throw std::domain_error("brute_force_pair_oracle: n_qubits must be in [2, 8]");
  if (amplitudes.size() != n_qubits + 1)
    throw std::domain_error("brute_force_pair_oracle: expected " + std::to_string(n_qubits + 1) +
                            " Dicke amplitudes");
  const double norm = amplitudes.norm();
  if (norm < 1e-300) throw std::domain_error("brute_force_pair_oracle: zero state vector");

  // Symmetrized basis vector for k up-qubits has amplitude 1/sqrt(C(N,k))
  // on every bitmask of popcount k.
  const long size = 1L << n_qubits;
  Vector psi = Vector::Zero(size);
  std::vector<double> inv_sqrt_choose(size_t(n_qubits) + 1);
  for (int k = 0; k <= n_qubits; ++k) {
    double lc;
    detail::log_choose(n_qubits, k, lc);
    inv_sqrt_choose[size_t(k)] = std::exp(-0.5 * lc);
  }
  for (long mask = 0; mask < size; ++mask) {
    const int k = __builtin_popcountl(mask);
    psi(mask) = (amplitudes(k) / norm) * inv_sqrt_choose[size_t(k)];
  }

  // Partial trace onto qubits 0 and 1 (any two; the state is symmetric).
  Matrix rho4 = Matrix::Zero(4, 4);
  const long rest = size / 4;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (long r = 0; r < rest; ++r)
        rho4(a, b) += psi(a * rest + r) * std::conj(psi(b * rest + r));

  // rho4 indices are (bit0 bit1) read as a 2-bit number with bit0 the high
  // bit; remap to |q0 q1> with 1 = up so index 3 = |11> = up-up.
  const Matrix t = pair_to_qubit_embedding();
  Matrix pair = t.adjoint() * rho4 * t;
  pair = 0.5 * (pair + Matrix(pair.adjoint()));
  return {std::move(pair)};
}

}  // namespace partition
}  // namespace spinpart
