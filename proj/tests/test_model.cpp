#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "core/model.hpp"

using namespace aah;

TEST_CASE("rational validation") {
  CHECK(Rational::make(3, 8) == Rational{3, 8});
  CHECK_THROWS_AS(Rational::make(2, 8), Error);
  CHECK_THROWS_AS(Rational::make(0, 4), Error);
  CHECK_THROWS_AS(Rational::make(5, 4), Error);
  CHECK_THROWS_AS(Rational::make(1, -4), Error);
}

TEST_CASE("modulation folds negative amplitude and wraps the phase") {
  const auto m = Modulation::make(-1.0, Rational::make(1, 4), 0.25 * kPi);
  CHECK(m.V == doctest::Approx(1.0));
  CHECK(m.delta == doctest::Approx(1.25 * kPi));
  CHECK(Modulation::make(1.0, Rational::make(1, 4), -0.4 * kPi).delta == doctest::Approx(1.6 * kPi));
  CHECK_THROWS_AS(Modulation::make(std::nan(""), Rational::make(1, 4), 0.0), Error);
}

TEST_CASE("potential values") {
  const auto zero = Modulation::make(0.0, Rational::make(3, 8), 1.234);
  CHECK(potential_value(zero, 7) == 0.0);

  const auto quarter = Modulation::make(1.0, Rational::make(1, 4), 0.0);
  const double expect[] = {0.0, 1.0, 0.0, -1.0};
  for (int n = 0; n < 4; ++n) CHECK(potential_value(quarter, n) == doctest::Approx(expect[n]).epsilon(1e-15));

  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  for (long long n = -20; n < 200; ++n) CHECK(potential_value(m, n + 8) == potential_value(m, n));
}

TEST_CASE("site labels start at the first-site label in every domain") {
  const auto a = Modulation::make(1.0, Rational::make(1, 4), 0.3);
  const auto b = Modulation::make(0.7, Rational::make(3, 8), 1.1);
  Lattice l;
  l.domains = {{a, 5}, {b, 6}};
  auto v = onsite_profile(l);
  REQUIRE(v.size() == 11u);
  for (int n = 0; n < 5; ++n) CHECK(v[n] == potential_value(a, n + kFirstSiteLabel));
  for (int n = 0; n < 6; ++n) CHECK(v[5 + n] == potential_value(b, n + kFirstSiteLabel));

  l.indexing = SiteIndexing::Global;
  v = onsite_profile(l);
  for (int n = 0; n < 6; ++n) CHECK(v[5 + n] == potential_value(b, 5 + n + kFirstSiteLabel));
  CHECK(l.walls() == std::vector<int>{5});
  CHECK(l.domain_of(4) == 0);
  CHECK(l.domain_of(5) == 1);
}

TEST_CASE("uniform chain spectrum") {
  const auto l = Lattice::single(Modulation::make(0.0, Rational::make(1, 4), 0.0), 4);
  const CMat H = build_open_hamiltonian(l);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(H(i, j) == cplx(std::abs(i - j) == 1 ? 1.0 : 0.0, 0.0));
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  for (int j = 1; j <= 4; ++j) {
    const double e = 2.0 * std::cos(j * kPi / 5.0);
    CHECK((es.eigenvalues().array() - e).abs().minCoeff() < 1e-12);
  }
}

TEST_CASE("open Hamiltonian carries i V_n on the diagonal") {
  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  const auto l = Lattice::single(m, 16);
  const CMat H = build_open_hamiltonian(l);
  for (int n = 0; n < 16; ++n) CHECK(std::abs(H(n, n) - cplx(0.0, potential_value(m, n + kFirstSiteLabel))) < 1e-15);
  CHECK((H - H.transpose()).norm() == 0.0);
}

TEST_CASE("Bloch Hamiltonian of the free chain folds the cosine band") {
  const auto m = Modulation::make(0.0, Rational::make(1, 4), 0.0);
  Eigen::ComplexEigenSolver<CMat> es(build_bloch_hamiltonian(m, 0.0));
  std::vector<double> re;
  for (int i = 0; i < 4; ++i) re.push_back(es.eigenvalues()(i).real());
  std::sort(re.begin(), re.end());
  const double expect[] = {-2.0, 0.0, 0.0, 2.0};
  for (int i = 0; i < 4; ++i) CHECK(re[i] == doctest::Approx(expect[i]).epsilon(1e-12));

  const double k = 0.37;
  const auto m2 = Modulation::make(0.0, Rational::make(3, 8), 0.0);
  Eigen::ComplexEigenSolver<CMat> es2(build_bloch_hamiltonian(m2, k));
  for (int s = 0; s < 8; ++s) {
    const double e = 2.0 * std::cos((k + kTwoPi * s) / 8.0);
    CHECK((es2.eigenvalues().array() - e).abs().minCoeff() < 1e-12);
  }
}

TEST_CASE("Bloch spectrum is symmetric under E -> -conj(E)") {
  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  for (int j = 0; j < 64; ++j) {
    Eigen::ComplexEigenSolver<CMat> es(build_bloch_hamiltonian(m, kTwoPi * j / 64));
    const CVec e = es.eigenvalues();
    for (int i = 0; i < e.size(); ++i) CHECK((e.array() + std::conj(e(i))).abs().minCoeff() < 1e-10);
  }
}

TEST_CASE("period-4 gain and loss pattern") {
  // delta = pi/4 puts sites 1..4 at V sin(3pi/4 + 2pi(n-1)/4): {g1, -g2, -g1, g2} with g1 = g2.
  const auto m = Modulation::make(1.0, Rational::make(1, 4), kPi / 4);
  const auto l = Lattice::single(m, 4);
  const auto v = onsite_profile(l);
  CHECK(v[0] > 0);
  CHECK(v[1] < 0);
  CHECK(v[2] == doctest::Approx(-v[0]));
  CHECK(v[3] == doctest::Approx(-v[1]));
}

TEST_CASE("symmetry operator") {
  CHECK(symmetry_operator(2).diag == std::vector<int>{1, -1});
  CHECK(symmetry_operator(4).diag == std::vector<int>{1, -1, 1, -1});
  const auto c = symmetry_operator(200);
  for (int i = 0; i < 200; ++i) CHECK(c.diag[i] == (i % 2 ? -1 : 1));
  CHECK_THROWS_AS(symmetry_operator(3), Error);
  CHECK_THROWS_AS(symmetry_operator(0), Error);
}

TEST_CASE("chiral-type anticommutation") {
  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  const CMat H = build_open_hamiltonian(Lattice::single(m, 200));
  const auto C = symmetry_operator(200);
  CHECK(ct_anticommutation_residual(H, C) < 1e-12);

  CMat broken = H;
  broken(3, 3) += 0.2;
  CHECK(ct_anticommutation_residual(broken, C) > 0.1);

  for (int j = 0; j < 16; ++j) {
    const CMat Hk = build_bloch_hamiltonian(m, kTwoPi * j / 16 + 0.1);
    CHECK(bloch_ct_residual(Hk, symmetry_operator(8)) < 1e-12);
  }
}
