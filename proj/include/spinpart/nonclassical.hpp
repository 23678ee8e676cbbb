#pragma once

// Entanglement and non-classicality measures: the Z witness and the C_n
// distribution of the pair marginal, concurrence (sphere maximum and the
// Wootters two-qubit value), the squeezing-concurrence relation,
// min-entropies, parity/sign fringe observables with Fourier extraction,
// and the cat-overlap bound.

#include "spinpart/angular.hpp"
#include "spinpart/grid.hpp"
#include "spinpart/partition.hpp"
#include "spinpart/states.hpp"

#include <utility>
#include <vector>

namespace spinpart {
namespace nonclassical {

using angular::AngularMomentum;
using angular::Direction;
using angular::SpinState;
using partition::PairState;

// ---------------------------------------------------------------------------
// Pair-level witnesses
// ---------------------------------------------------------------------------

// Spin-1 projection operator along n in the pair basis (+1, 0, -1).
inline Matrix pair_spin_along(const Direction& n) {
  const Matrix l_dicke = angular::spin_along(AngularMomentum(2), n).matrix;
  // Reverse both indices: Dicke order is (-1, 0, +1), pair order (+1, 0, -1).
  Matrix l(3, 3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) l(a, b) = l_dicke(2 - a, 2 - b);
  return l;
}

// Z(n) = 2<L_n^2> - <L_n>^2 - 1; zero for every spin-1 coherent state,
// strictly negative only for non-classical pairs.
inline double z_value(const PairState& pair, const Direction& n) {
  const Matrix l = pair_spin_along(n);
  const double l1 = (pair.matrix * l).trace().real();
  const double l2 = (pair.matrix * l * l).trace().real();
  return 2.0 * l2 - l1 * l1 - 1.0;
}

// C_n = 1 - (sqrt(Q_pair(-n)) + sqrt(Q_pair(n)))^2 from the antipodal
// Husimi values of the pair marginal.
inline double c_distribution(const SpinState& state, const Direction& n) {
  const double q_plus = std::max(0.0, partition::pair_husimi(state, n));
  const double q_minus = std::max(0.0, partition::pair_husimi(state, n.antipode()));
  const double s = std::sqrt(q_minus) + std::sqrt(q_plus);
  return 1.0 - s * s;
}

struct ZAlphaC {
  double z = 0.0;
  double alpha = 0.0;
  double c = 0.0;
};

// Returns (Z(n), alpha, C_n) with alpha = (sqrt(Q(-n)) - sqrt(Q(n)))^2 - 1;
// the three satisfy Z = alpha * C_n identically.
inline ZAlphaC alpha_c_identity_check(const SpinState& state, const Direction& n) {
  const PairState pair = partition::reduced_pair_state(state);
  const double q_plus = std::max(0.0, partition::pair_husimi(state, n));
  const double q_minus = std::max(0.0, partition::pair_husimi(state, n.antipode()));
  const double d = std::sqrt(q_minus) - std::sqrt(q_plus);
  return {z_value(pair, n), d * d - 1.0, c_distribution(state, n)};
}

struct ConcurrenceBound {
  double value = 0.0;       // max(0, max_n C_n)
  Direction argmax{0, 0};   // direction achieving the sphere maximum
};

// Maximizes C_n over the sphere: coarse Fibonacci scan plus simplex
// refinement; the clamp to zero happens only in .value.
inline ConcurrenceBound concurrence_lower_bound(const SpinState& state, int lattice_nodes = 512) {
  const auto opt = grid::maximize_on_sphere(
      [&](const Direction& n) { return c_distribution(state, n); }, lattice_nodes);
  return {std::max(0.0, opt.value), opt.direction};
}

// Wootters concurrence of the pair, via the 4x4 two-qubit embedding with
// zero singlet component: C = max(0, l1 - l2 - l3 - l4), the li being the
// square roots of the eigenvalues of rho * (sy x sy) rho* (sy x sy).
inline double wootters_concurrence(const PairState& pair) {
  const Matrix t = partition::pair_to_qubit_embedding();
  const Matrix rho4 = t * pair.matrix * t.adjoint();
  Matrix yy = Matrix::Zero(4, 4);  // sigma_y x sigma_y in the product basis
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix r = rho4 * yy * rho4.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> es(r);
  if (es.info() != Eigen::Success)
    throw numerical_error("wootters_concurrence: eigensolver failed");
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[size_t(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

// ---------------------------------------------------------------------------
// Entropies
// ---------------------------------------------------------------------------

namespace detail {

inline double min_entropy_of(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  const double lam_max = es.eigenvalues().maxCoeff();
  if (lam_max <= 0.0) throw std::domain_error("min_entropy: non-positive maximal eigenvalue");
  return -std::log(lam_max);
}

}  // namespace detail

// S_min = -ln(lambda_max).
inline double min_entropy(const SpinState& state) { return detail::min_entropy_of(state.matrix); }
inline double min_entropy(const PairState& pair) { return detail::min_entropy_of(pair.matrix); }

// Conditional min-entropy of the rest of the ensemble given one pair,
// S_min(rho) - S_min(rho_pair); for J=8 this is the 14|2 qubit partition.
// A strictly negative value certifies that the partition is not separable.
inline double conditional_min_entropy_14_2(const SpinState& state) {
  return min_entropy(state) - min_entropy(partition::reduced_pair_state(state));
}

// ---------------------------------------------------------------------------
// Squeezing
// ---------------------------------------------------------------------------

// Projection-noise standard deviation along n.
inline double spin_uncertainty(const SpinState& state, const Direction& n) {
  const auto jn = angular::spin_along(state.j, n);
  const double m1 = angular::expectation(state, jn).real();
  const double m2 = (state.matrix * jn.matrix * jn.matrix).trace().real();
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

struct EquatorialMinimum {
  double delta_j_min = 0.0;
  double phi_min = 0.0;
};

// Minimum of the projection uncertainty over equatorial directions
// (theta = pi/2); pi-periodic in phi, scanned then refined to 1e-8.
inline EquatorialMinimum min_equatorial_uncertainty(const SpinState& state) {
  const auto neg_width = [&](double phi) {
    return -spin_uncertainty(state, Direction(angular::pi / 2.0, phi));
  };
  const int coarse = 360;
  double best_phi = 0.0, best = neg_width(0.0);
  for (int i = 1; i < coarse; ++i) {
    const double phi = angular::pi * i / double(coarse);
    const double v = neg_width(phi);
    if (v > best) {
      best = v;
      best_phi = phi;
    }
  }
  const double half_step = angular::pi / double(coarse);
  const auto [phi_opt, neg_opt] =
      grid::maximize_scalar(neg_width, best_phi - half_step, best_phi + half_step, 1e-8);
  return {-neg_opt, phi_opt};
}

// Concurrence implied by an equatorial squeezing minimum:
// C = (1 - 2*delta^2/J) / (2J - 1).
inline double concurrence_from_squeezing(double delta_j_min, const AngularMomentum& j) {
  if (delta_j_min < 0.0)
    throw std::domain_error("concurrence_from_squeezing: delta_j_min must be >= 0");
  if (j.two_j < 2) throw std::domain_error("concurrence_from_squeezing: need two_j >= 2");
  const double jj = j.j();
  return (1.0 - 2.0 * delta_j_min * delta_j_min / jj) / (2.0 * jj - 1.0);
}

// ---------------------------------------------------------------------------
// Fringe observables
// ---------------------------------------------------------------------------

// <P> for the parity P = sum_m (-1)^{J-m} |m><m| of the projection along
// the equatorial direction (theta = pi/2, phi); the stretched state along
// the measurement axis has parity +1.
inline double parity_expectation(const SpinState& state, double phi) {
  const Eigen::VectorXd probs =
      partition::projection_probabilities(state, Direction(angular::pi / 2.0, phi));
  double p = 0.0;
  for (int i = 0; i < state.j.dim(); ++i) {
    const int j_minus_m = (state.j.two_j - state.j.two_m_at(i)) / 2;
    p += ((j_minus_m % 2 == 0) ? 1.0 : -1.0) * probs(i);
  }
  return p;
}

namespace detail {

inline double signed_even_m_sum(const AngularMomentum& j, const Eigen::VectorXd& probs) {
  double sum = 0.0;
  for (int i = 0; i < j.dim(); ++i) {
    const int m = j.two_m_at(i) / 2;
    if (m % 2 != 0) continue;
    sum += double((m > 0) - (m < 0)) * probs(i);
  }
  return sum;
}

}  // namespace detail

// <Sigma> = sum over even m of sgn(m) * Pi_m, measured along (pi/2, phi).
inline double sign_expectation(const SpinState& state, double phi) {
  if (state.j.two_j % 2 != 0)
    throw std::domain_error("sign_expectation: J must be an integer spin");
  return detail::signed_even_m_sum(
      state.j, partition::projection_probabilities(state, Direction(angular::pi / 2.0, phi)));
}

// Echo variant: rotate by phi about z, apply a second twisting evolution,
// then measure <Sigma> along z.  For a perfect cat with the cat-generation
// parameters this yields a pure 2J-harmonic of amplitude 1/2 in phi.
inline double sign_expectation(const SpinState& state, double phi,
                               const states::OatParams& echo) {
  if (state.j.two_j % 2 != 0)
    throw std::domain_error("sign_expectation: J must be an integer spin");
  const auto ops = angular::spin_operators(state.j);
  const SpinState rotated = angular::evolve(state, ops.jz, phi);
  const SpinState twisted = states::one_axis_twisting(rotated, echo);
  return detail::signed_even_m_sum(
      state.j, partition::projection_probabilities(twisted, Direction::z_axis()));
}

// ---------------------------------------------------------------------------
// Fourier extraction
// ---------------------------------------------------------------------------

// Truncated series <A>(phi) = alpha_0/2 + sum_k (alpha_k cos k phi +
// beta_k sin k phi); amplitude(k) = sqrt(alpha_k^2 + beta_k^2)/2.
struct FourierSeries {
  std::vector<double> alpha;  // k = 0..K
  std::vector<double> beta;   // beta[0] unused (zero)

  int max_order() const { return int(alpha.size()) - 1; }
  double amplitude(int k) const {
    if (k < 1 || k > max_order())
      throw std::domain_error("FourierSeries::amplitude: order out of range");
    return 0.5 * std::hypot(alpha[size_t(k)], beta[size_t(k)]);
  }
  double evaluate(double phi) const {
    double v = 0.5 * alpha[0];
    for (int k = 1; k <= max_order(); ++k)
      v += alpha[size_t(k)] * std::cos(k * phi) + beta[size_t(k)] * std::sin(k * phi);
    return v;
  }
};

// Least-squares fit of (phi, value) samples to the truncated series.
// Needs at least 2K+1 samples at phi values distinct mod 2 pi.
inline FourierSeries fourier_components(const std::vector<std::pair<double, double>>& samples,
                                        int max_order) {
  if (max_order < 0) throw std::domain_error("fourier_components: max_order must be >= 0");
  const int n_param = 2 * max_order + 1;
  const int n = int(samples.size());
  if (n < n_param)
    throw std::domain_error("fourier_components: need at least " + std::to_string(n_param) +
                            " samples for order " + std::to_string(max_order) + ", got " +
                            std::to_string(n));
  Eigen::MatrixXd a(n, n_param);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double phi = samples[size_t(i)].first;
    a(i, 0) = 0.5;
    for (int k = 1; k <= max_order; ++k) {
      a(i, k) = std::cos(k * phi);
      a(i, max_order + k) = std::sin(k * phi);
    }
    b(i) = samples[size_t(i)].second;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= smax * 1e-12)
    throw std::domain_error("fourier_components: underdetermined sample set (condition number " +
                            std::to_string(smax / std::max(smin, 1e-300)) + ")");
  const Eigen::VectorXd x = svd.solve(b);
  FourierSeries series;
  series.alpha.assign(size_t(max_order) + 1, 0.0);
  series.beta.assign(size_t(max_order) + 1, 0.0);
  series.alpha[0] = x(0);
  for (int k = 1; k <= max_order; ++k) {
    series.alpha[size_t(k)] = x(k);
    series.beta[size_t(k)] = x(max_order + k);
  }
  return series;
}

// ---------------------------------------------------------------------------
// Overlap bound
// ---------------------------------------------------------------------------

// Lower bound on the overlap with the balanced stretched-state cat:
// O = (Pi_-J + Pi_+J + 2|rho_{-J,J}|) / 2.
inline double cat_overlap_bound(double pi_minus, double pi_plus, double coherence) {
  const double eps = 1e-12;
  if (pi_minus < -eps || pi_minus > 1.0 + eps || pi_plus < -eps || pi_plus > 1.0 + eps)
    throw std::domain_error("cat_overlap_bound: probabilities must lie in [0, 1]");
  if (pi_minus + pi_plus > 1.0 + eps)
    throw std::domain_error("cat_overlap_bound: probabilities sum above 1");
  if (coherence < 0.0) throw std::domain_error("cat_overlap_bound: coherence must be >= 0");
  return 0.5 * (pi_minus + pi_plus + 2.0 * coherence);
}

}  // namespace nonclassical
}  // namespace spinpart
