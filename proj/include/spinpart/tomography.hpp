#pragma once

// Pair-state tomography: the dipole/quadrupole operator basis, the
// spherical-harmonic expansion of the pair Husimi function, least-squares
// fitting of sampled Husimi values, and density-matrix reconstruction.

#include "spinpart/angular.hpp"
#include "spinpart/partition.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

namespace spinpart {
namespace tomography {

using angular::AngularMomentum;
using angular::Direction;
using partition::PairState;

// ---------------------------------------------------------------------------
// Multipole operator basis (spin-1, pair basis order +1, 0, -1)
// ---------------------------------------------------------------------------

// Eight traceless Hermitian-conjugate-paired operators {L_m, Q_m} with
// Hilbert-Schmidt norms Tr(L_m^dag L_m) = 2 and Tr(Q_m^dag Q_m) = 10;
// together with the identity they form an orthogonal basis of 3x3 space.
struct MultipoleOperators {
  std::array<Matrix, 3> dipole;      // L_m, m = -1, 0, +1 at index m+1
  std::array<Matrix, 5> quadrupole;  // Q_m, m = -2..+2 at index m+2

  const Matrix& l_op(int m) const {
    if (m < -1 || m > 1) throw std::domain_error("MultipoleOperators::l_op: m out of range");
    return dipole[size_t(m + 1)];
  }
  const Matrix& q_op(int m) const {
    if (m < -2 || m > 2) throw std::domain_error("MultipoleOperators::q_op: m out of range");
    return quadrupole[size_t(m + 2)];
  }
};

// L_0 = Lz, L_{+-1} = -+(Lx +- i Ly)/sqrt(2), Q_0 = sqrt(5/3)(3 Lz^2 - 2),
// Q_{+-1} = -+sqrt(5/2)[(Lx +- i Ly) Lz + Lz (Lx +- i Ly)],
// Q_{+-2} = sqrt(5/2)(Lx +- i Ly)^2.
inline MultipoleOperators multipole_operators() {
  // Build Lx, Ly, Lz in the pair basis (+1, 0, -1): reverse the Dicke order.
  const auto dicke_ops = angular::spin_operators(AngularMomentum(2));
  const auto reversed = [](const Matrix& a) {
    Matrix out(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) out(i, k) = a(2 - i, 2 - k);
    return out;
  };
  const Matrix lx = reversed(dicke_ops.jx.matrix);
  const Matrix ly = reversed(dicke_ops.jy.matrix);
  const Matrix lz = reversed(dicke_ops.jz.matrix);
  const Matrix lp = lx + cd(0.0, 1.0) * ly;
  const Matrix lm = lx - cd(0.0, 1.0) * ly;
  const Matrix eye = Matrix::Identity(3, 3);
  const double s52 = std::sqrt(2.5);

  MultipoleOperators ops;
  ops.dipole[0] = lm / std::sqrt(2.0);   // L_{-1} = +(Lx - i Ly)/sqrt(2)
  ops.dipole[1] = lz;                    // L_0
  ops.dipole[2] = -lp / std::sqrt(2.0);  // L_{+1}
  ops.quadrupole[0] = s52 * lm * lm;                       // Q_{-2}
  ops.quadrupole[1] = s52 * (lm * lz + lz * lm);           // Q_{-1}
  ops.quadrupole[2] = std::sqrt(5.0 / 3.0) * (3.0 * lz * lz - 2.0 * eye);  // Q_0
  ops.quadrupole[3] = -s52 * (lp * lz + lz * lp);          // Q_{+1}
  ops.quadrupole[4] = s52 * lp * lp;                       // Q_{+2}
  return ops;
}

// ---------------------------------------------------------------------------
// Coefficients and the spherical-harmonic expansion
// ---------------------------------------------------------------------------

// Expansion coefficients lambda_{l,m} of a pair state over {L_m, Q_m}.
// Real Husimi functions force the symmetry lambda_{l,-m} = (-1)^m
// conj(lambda_{l,m}), so there are eight real degrees of freedom.
struct MultipoleCoefficients {
  std::array<cd, 3> dipole{};      // lambda_{1,m}, m = -1..1 at index m+1
  std::array<cd, 5> quadrupole{};  // lambda_{2,m}, m = -2..2 at index m+2

  cd lambda(int l, int m) const {
    if (l == 1 && m >= -1 && m <= 1) return dipole[size_t(m + 1)];
    if (l == 2 && m >= -2 && m <= 2) return quadrupole[size_t(m + 2)];
    throw std::domain_error("MultipoleCoefficients::lambda: (l, m) out of range");
  }
};

// Hilbert-Schmidt projection: lambda_{1,m} = Tr(rho L_m^dag)/2,
// lambda_{2,m} = Tr(rho Q_m^dag)/10.
inline MultipoleCoefficients coefficients_of(const PairState& pair) {
  const auto ops = multipole_operators();
  MultipoleCoefficients c;
  for (int m = -1; m <= 1; ++m)
    c.dipole[size_t(m + 1)] = (pair.matrix * ops.l_op(m).adjoint()).trace() / 2.0;
  for (int m = -2; m <= 2; ++m)
    c.quadrupole[size_t(m + 2)] = (pair.matrix * ops.q_op(m).adjoint()).trace() / 10.0;
  return c;
}

namespace detail {

// Orthonormal spherical harmonics with Condon-Shortley phase, l <= 2.
inline cd spherical_harmonic(int l, int m, const Direction& n) {
  const double st = std::sin(n.theta), ct = std::cos(n.theta);
  const cd eip = std::exp(cd(0.0, n.phi));
  const double pi = angular::pi;
  switch (l * 10 + (m + l)) {  // compact dispatch on (l, m)
    case 10 + 0: return std::sqrt(3.0 / (8.0 * pi)) * st / eip;            // (1,-1)
    case 10 + 1: return std::sqrt(3.0 / (4.0 * pi)) * ct;                  // (1, 0)
    case 10 + 2: return -std::sqrt(3.0 / (8.0 * pi)) * st * eip;           // (1,+1)
    case 20 + 0: return std::sqrt(15.0 / (32.0 * pi)) * st * st / (eip * eip);   // (2,-2)
    case 20 + 1: return std::sqrt(15.0 / (8.0 * pi)) * st * ct / eip;      // (2,-1)
    case 20 + 2: return std::sqrt(5.0 / (16.0 * pi)) * (3.0 * ct * ct - 1.0);    // (2, 0)
    case 20 + 3: return -std::sqrt(15.0 / (8.0 * pi)) * st * ct * eip;     // (2,+1)
    case 20 + 4: return std::sqrt(15.0 / (32.0 * pi)) * st * st * eip * eip;     // (2,+2)
    default: throw std::domain_error("spherical_harmonic: (l, m) out of range");
  }
}

}  // namespace detail

// Husimi value from the coefficients alone:
// Q(n) = 1/3 + sqrt(4 pi / 3) * sum_{l,m} lambda_{l,m} Y_l^m(n).
inline double husimi_forward(const MultipoleCoefficients& coeffs, const Direction& n) {
  cd sum = 0.0;
  for (int m = -1; m <= 1; ++m)
    sum += coeffs.lambda(1, m) * detail::spherical_harmonic(1, m, n);
  for (int m = -2; m <= 2; ++m)
    sum += coeffs.lambda(2, m) * detail::spherical_harmonic(2, m, n);
  return 1.0 / 3.0 + std::sqrt(4.0 * angular::pi / 3.0) * sum.real();
}

inline double husimi_forward(const PairState& pair, const Direction& n) {
  return husimi_forward(coefficients_of(pair), n);
}

// ---------------------------------------------------------------------------
// Least-squares fit of sampled Husimi values
// ---------------------------------------------------------------------------

struct HusimiSample {
  Direction n{0.0, 0.0};
  double value = 0.0;
  double weight = 1.0;  // optional inverse-variance weight
};

struct FitResult {
  MultipoleCoefficients coefficients;
  double residual_norm = 0.0;     // rms misfit of the solution
  double condition_number = 0.0;  // of the (weighted) design matrix
};

// Fits the eight real expansion degrees of freedom to the samples.
// Requires >= 9 samples spanning 9 independent harmonic evaluations
// (one constant is fixed, eight parameters are free, and the node set
// must resolve them); rank deficiency raises a domain error that names
// the condition number.
inline FitResult fit_husimi(const std::vector<HusimiSample>& samples) {
  const int n = int(samples.size());
  if (n < 9)
    throw std::domain_error("fit_husimi: need at least 9 samples, got " + std::to_string(n));
  // Real parameter vector: (l10, Re l11, Im l11, l20, Re l21, Im l21,
  // Re l22, Im l22); the m < 0 coefficients follow from conjugation.
  Eigen::MatrixXd a(n, 8);
  Eigen::VectorXd b(n);
  const double scale = std::sqrt(4.0 * angular::pi / 3.0);
  for (int i = 0; i < n; ++i) {
    const auto& s = samples[size_t(i)];
    if (s.weight < 0.0) throw std::domain_error("fit_husimi: negative sample weight");
    const double w = std::sqrt(s.weight);
    const cd y11 = detail::spherical_harmonic(1, 1, s.n);
    const cd y21 = detail::spherical_harmonic(2, 1, s.n);
    const cd y22 = detail::spherical_harmonic(2, 2, s.n);
    const double y10 = detail::spherical_harmonic(1, 0, s.n).real();
    const double y20 = detail::spherical_harmonic(2, 0, s.n).real();
    a(i, 0) = w * scale * y10;
    a(i, 1) = w * scale * 2.0 * y11.real();
    a(i, 2) = w * scale * -2.0 * y11.imag();
    a(i, 3) = w * scale * y20;
    a(i, 4) = w * scale * 2.0 * y21.real();
    a(i, 5) = w * scale * -2.0 * y21.imag();
    a(i, 6) = w * scale * 2.0 * y22.real();
    a(i, 7) = w * scale * -2.0 * y22.imag();
    b(i) = w * (s.value - 1.0 / 3.0);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double condition = smax / std::max(smin, 1e-300);
  if (smin <= 0.0 || condition > 1e9) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "fit_husimi: rank-deficient design matrix (condition number %.3e)", condition);
    throw std::domain_error(msg);
  }
  const Eigen::VectorXd x = svd.solve(b);
  FitResult result;
  result.condition_number = condition;
  result.residual_norm = std::sqrt((a * x - b).squaredNorm() / double(n));
  auto& c = result.coefficients;
  c.dipole[2] = cd(x(1), x(2));                  // lambda_{1,+1}
  c.dipole[1] = cd(x(0), 0.0);                   // lambda_{1,0}
  c.dipole[0] = -std::conj(c.dipole[2]);         // lambda_{1,-1}
  c.quadrupole[4] = cd(x(6), x(7));              // lambda_{2,+2}
  c.quadrupole[3] = cd(x(4), x(5));              // lambda_{2,+1}
  c.quadrupole[2] = cd(x(3), 0.0);               // lambda_{2,0}
  c.quadrupole[1] = -std::conj(c.quadrupole[3]); // lambda_{2,-1}
  c.quadrupole[0] = std::conj(c.quadrupole[4]);  // lambda_{2,-2}
  return result;
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

// Reassembled matrix 1/3 + sum lambda_{l,m} B_{l,m}.  Trace is exactly 1;
// positivity is reported, not enforced (fits to noisy data may dip
// slightly negative, mirroring raw experimental reconstructions).
struct PairReconstruction {
  Matrix matrix;                 // 3x3 Hermitian, trace 1
  Eigen::Vector3d eigenvalues;   // ascending
  bool physical = false;         // true when eigenvalues >= -1e-6

  // Eigenvalue-clipped, renormalized density matrix for downstream use.
  PairState clipped() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix);
    Eigen::Vector3d lam = es.eigenvalues().cwiseMax(0.0);
    const double total = lam.sum();
    if (total <= 0.0) throw std::domain_error("PairReconstruction::clipped: zero spectrum");
    Matrix rho = es.eigenvectors() * (lam / total).asDiagonal().toDenseMatrix().cast<cd>() *
                 es.eigenvectors().adjoint();
    rho = 0.5 * (rho + Matrix(rho.adjoint()));
    return {std::move(rho)};
  }
};

// Reads Husimi samples from CSV with header `theta_rad,phi_rad,q_value`
// and an optional fourth `weight` column; `#` lines are metadata comments.
inline std::vector<HusimiSample> read_husimi_samples(std::istream& in) {
  std::vector<HusimiSample> samples;
  std::string line;
  bool header_seen = false;
  bool has_weight = false;
  size_t line_no = 0;
  const auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : text) {
      if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    fields.push_back(cur);
    return fields;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line);
    if (!header_seen) {
      if (fields.size() < 3 || fields[0] != "theta_rad" || fields[1] != "phi_rad" ||
          fields[2] != "q_value" || (fields.size() == 4 && fields[3] != "weight") ||
          fields.size() > 4)
        throw std::domain_error(
            "read_husimi_samples: expected header theta_rad,phi_rad,q_value[,weight]");
      has_weight = fields.size() == 4;
      header_seen = true;
      continue;
    }
    if (fields.size() != size_t(has_weight ? 4 : 3))
      throw std::domain_error("read_husimi_samples: wrong field count on line " +
                              std::to_string(line_no));
    try {
      HusimiSample s;
      s.n = Direction(std::stod(fields[0]), std::stod(fields[1]));
      s.value = std::stod(fields[2]);
      if (has_weight) s.weight = std::stod(fields[3]);
      samples.push_back(s);
    } catch (const std::invalid_argument&) {
      throw std::domain_error("read_husimi_samples: malformed number on line " +
                              std::to_string(line_no));
    }
  }
  if (!header_seen) throw std::domain_error("read_husimi_samples: missing header row");
  return samples;
}

inline std::vector<HusimiSample> read_husimi_samples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::domain_error("read_husimi_samples: cannot open '" + path + "'");
  return read_husimi_samples(in);
}

inline PairReconstruction reconstruct_pair_state(const MultipoleCoefficients& coeffs) {
  const auto ops = multipole_operators();
  Matrix rho = Matrix::Identity(3, 3) / 3.0;
  for (int m = -1; m <= 1; ++m) rho += coeffs.lambda(1, m) * ops.l_op(m);
  for (int m = -2; m <= 2; ++m) rho += coeffs.lambda(2, m) * ops.q_op(m);
  rho = 0.5 * (rho + Matrix(rho.adjoint()));
  PairReconstruction rec{std::move(rho), Eigen::Vector3d::Zero(), false};
  Eigen::SelfAdjointEigenSolver<Matrix> es(rec.matrix, Eigen::EigenvaluesOnly);
  rec.eigenvalues = es.eigenvalues();
  rec.physical = rec.eigenvalues.minCoeff() >= -1e-6;
  return rec;
}

}  // namespace tomography
}  // namespace spinpart
