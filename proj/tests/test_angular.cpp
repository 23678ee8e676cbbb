#include "spinpart/angular.hpp"
#include "spinpart/states.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace spinpart;
using angular::AngularMomentum;
using angular::Direction;

TEST_CASE("angular momentum bookkeeping") {
  const AngularMomentum j(16);
  REQUIRE(j.dim() == 17);
  REQUIRE(j.j() == 8.0);
  for (int i = 0; i < j.dim(); ++i) REQUIRE(j.index_of(j.two_m_at(i)) == i);
  REQUIRE(j.two_m_at(0) == -16);
  REQUIRE(j.two_m_at(16) == 16);
  REQUIRE_THROWS_AS(AngularMomentum(-1), std::domain_error);
  REQUIRE_THROWS_AS(j.index_of(17), std::domain_error);   // wrong parity
  REQUIRE_THROWS_AS(j.index_of(18), std::domain_error);   // out of range
  const AngularMomentum half(1);
  REQUIRE(half.dim() == 2);
  REQUIRE(half.two_m_at(0) == -1);
}

TEST_CASE("direction antipode") {
  DeterministicRng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Direction n = testutil::random_direction(rng);
    const Direction a = n.antipode();
    REQUIRE(std::abs(a.theta - (angular::pi - n.theta)) < 1e-12);
    const double dphi = std::remainder(a.phi - n.phi - angular::pi, 2.0 * angular::pi);
    REQUIRE(std::abs(dphi) < 1e-12);
    const auto u = n.unit_vector(), v = a.unit_vector();
    for (int axis = 0; axis < 3; ++axis) REQUIRE(std::abs(u[axis] + v[axis]) < 1e-12);
  }
}

TEST_CASE("spin operator matrix elements") {
  SECTION("spin one half") {
    const auto ops = angular::spin_operators(AngularMomentum(1));
    REQUIRE(std::abs(ops.jz.matrix(0, 0) - cd(-0.5, 0)) < 1e-15);
    REQUIRE(std::abs(ops.jz.matrix(1, 1) - cd(0.5, 0)) < 1e-15);
  }
  SECTION("spin one ladder element") {
    const auto ops = angular::spin_operators(AngularMomentum(2));
    // <m=0| J+ |m=-1> = sqrt(2)
    REQUIRE(std::abs(ops.jplus.matrix(1, 0) - cd(std::sqrt(2.0), 0)) < 1e-14);
  }
  SECTION("spin eight Jz^2 trace") {
    const auto ops = angular::spin_operators(AngularMomentum(16));
    REQUIRE(std::abs((ops.jz.matrix * ops.jz.matrix).trace().real() - 408.0) < 1e-10);
  }
}

TEST_CASE("commutator identity across spins") {
  for (int two_j : {1, 2, 3, 5, 8, 11, 16}) {
    const auto ops = angular::spin_operators(AngularMomentum(two_j));
    const Matrix comm = ops.jx.matrix * ops.jy.matrix - ops.jy.matrix * ops.jx.matrix;
    const Matrix expected = cd(0, 1) * ops.jz.matrix;
    REQUIRE(testutil::max_abs_diff(comm, expected) < 1e-10);
  }
}

TEST_CASE("rotation unitary conventions") {
  SECTION("identity at the pole") {
    const Matrix r = angular::rotation_unitary(AngularMomentum(16), Direction::z_axis());
    REQUIRE(testutil::max_abs_diff(r, Matrix::Identity(17, 17)) < 1e-14);
  }
  SECTION("spin flip for spin one half") {
    const Matrix r = angular::rotation_unitary(AngularMomentum(1), {angular::pi, 0.0});
    // R |up> must be proportional to |down>; basis order is (-1/2, +1/2).
    REQUIRE(std::abs(r(1, 1)) < 1e-14);
    REQUIRE(std::abs(std::abs(r(0, 1)) - 1.0) < 1e-14);
  }
  SECTION("columns are eigenvectors of the projected spin") {
    DeterministicRng rng(21);
    const AngularMomentum j(16);
    for (int k = 0; k < 5; ++k) {
      const Direction n = testutil::random_direction(rng);
      const Matrix r = angular::rotation_unitary(j, n);
      const Matrix jn = angular::spin_along(j, n).matrix;
      REQUIRE(testutil::max_abs_diff(r * r.adjoint(), Matrix::Identity(17, 17)) < 1e-12);
      const Vector top = r.col(16);
      REQUIRE((jn * top - 8.0 * top).cwiseAbs().maxCoeff() < 1e-10);
      // Full spectrum check: R^dag (J.n) R diagonal with entries -J..J.
      const Matrix diag = r.adjoint() * jn * r;
      for (int i = 0; i < 17; ++i) {
        REQUIRE(std::abs(diag(i, i) - cd(0.5 * j.two_m_at(i), 0)) < 1e-10);
        for (int c = 0; c < 17; ++c)
          if (c != i) REQUIRE(std::abs(diag(i, c)) < 1e-10);
      }
    }
  }
}

TEST_CASE("clebsch gordan anchor values") {
  REQUIRE(std::abs(angular::clebsch_gordan(16, 16, 2, 2, 18, 18) - 1.0) < 1e-14);
  REQUIRE(std::abs(angular::clebsch_gordan(16, 16, 2, -2, 18, 14) - 1.0 / std::sqrt(153.0)) <
          1e-14);
  REQUIRE(std::abs(angular::clebsch_gordan(16, -16, 2, 0, 18, -16) - 1.0 / 3.0) < 1e-14);
  // Projection mismatch gives zero, not an error.
  REQUIRE(angular::clebsch_gordan(16, 16, 2, -2, 18, 18) == 0.0);
  // Triangle violation and out-of-range projections are domain errors.
  REQUIRE_THROWS_AS(angular::clebsch_gordan(16, 0, 2, 0, 22, 0), std::domain_error);
  REQUIRE_THROWS_AS(angular::clebsch_gordan(16, 18, 2, 0, 18, 18), std::domain_error);
}

TEST_CASE("clebsch gordan unitarity for all small spin pairs") {
  for (int two_j1 = 0; two_j1 <= 20; ++two_j1) {
    for (int two_j2 = 0; two_j1 + two_j2 <= 20; ++two_j2) {
      const int d1 = two_j1 + 1, d2 = two_j2 + 1;
      // Columns indexed by (J, M), rows by (m1, m2).
      std::vector<std::pair<int, int>> jm;
      for (int two_J = std::abs(two_j1 - two_j2); two_J <= two_j1 + two_j2; two_J += 2)
        for (int two_M = -two_J; two_M <= two_J; two_M += 2) jm.emplace_back(two_J, two_M);
      Matrix u(d1 * d2, jm.size());
      for (int i1 = 0; i1 < d1; ++i1)
        for (int i2 = 0; i2 < d2; ++i2)
          for (size_t c = 0; c < jm.size(); ++c)
            u(i1 * d2 + i2, Eigen::Index(c)) =
                angular::clebsch_gordan(two_j1, 2 * i1 - two_j1, two_j2, 2 * i2 - two_j2,
                                        jm[c].first, jm[c].second);
      const Matrix gram = u.adjoint() * u;
      REQUIRE(testutil::max_abs_diff(gram, Matrix::Identity(gram.rows(), gram.cols())) < 1e-12);
    }
  }
}

TEST_CASE("hermitian generator evolution") {
  DeterministicRng rng(31);
  const AngularMomentum j(16);
  const auto ops = angular::spin_operators(j);
  const angular::SpinState state = testutil::random_spin_state(j, rng);

  SECTION("zero time is the identity map") {
    const auto out = angular::evolve(state, ops.jx, 0.0);
    REQUIRE(testutil::max_abs_diff(out.matrix, state.matrix) < 1e-14);
  }
  SECTION("full Larmor period for integer spin") {
    const auto out = angular::evolve(state, ops.jz, 2.0 * angular::pi);
    REQUIRE(testutil::max_abs_diff(out.matrix, state.matrix) < 1e-10);
  }
  SECTION("trace, hermiticity and spectrum are preserved") {
    Matrix h = testutil::ginibre_density(j.dim(), rng);  // random Hermitian generator
    const auto out = angular::evolve(state, {j, h}, 0.731);
    REQUIRE(std::abs(out.matrix.trace().real() - 1.0) < 1e-12);
    REQUIRE(testutil::max_abs_diff(out.matrix, out.matrix.adjoint()) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> before(state.matrix), after(out.matrix);
    REQUIRE((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("non-hermitian generator is rejected") {
    Matrix h = Matrix::Zero(j.dim(), j.dim());
    h(0, 1) = 1.0;  // no conjugate partner
    REQUIRE_THROWS_AS(angular::evolve(state, {j, h}, 1.0), std::domain_error);
  }
}

TEST_CASE("expectation values") {
  const AngularMomentum j(16);
  const auto ops = angular::spin_operators(j);
  SECTION("stretched state") {
    REQUIRE(std::abs(angular::expectation(states::dicke(j, -16), ops.jz) - cd(-8.0, 0)) < 1e-12);
  }
  SECTION("maximally mixed") {
    REQUIRE(std::abs(angular::expectation(states::maximally_mixed(j), ops.jz)) < 1e-13);
  }
  SECTION("coherent state projection follows cos theta") {
    DeterministicRng rng(41);
    for (int k = 0; k < 8; ++k) {
      const Direction n = testutil::random_direction(rng);
      const auto state = states::coherent(j, n);
      REQUIRE(std::abs(angular::expectation(state, ops.jz).real() - 8.0 * std::cos(n.theta)) <
              1e-10);
    }
  }
  SECTION("dimension mismatch is rejected") {
    const auto small_ops = angular::spin_operators(AngularMomentum(2));
    REQUIRE_THROWS_AS(angular::expectation(states::dicke(j, 0), small_ops.jz),
                      std::domain_error);
  }
}

TEST_CASE("state validation contracts") {
  const AngularMomentum j(2);
  Matrix bad = Matrix::Zero(3, 3);
  bad(0, 0) = 0.5;
  bad(1, 1) = 0.5;
  bad(0, 1) = cd(0.0, 0.3);  // not Hermitian without its partner
  REQUIRE_THROWS_AS(angular::validate_state({j, bad}, 1e-12, 1e-12, 1e-9), std::domain_error);
  Matrix off_trace = Matrix::Identity(3, 3);
  REQUIRE_THROWS_AS(angular::validate_state({j, off_trace}, 1e-12, 1e-12, 1e-9),
                    std::domain_error);
}
