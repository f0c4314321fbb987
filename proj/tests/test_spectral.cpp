#include <doctest.h>

#include <cmath>
#include <random>

#include "core/spectral.hpp"

using namespace aah;

namespace {

Lattice wall_lattice() {
  Lattice l;
  l.domains = {{Modulation::make(1.5, Rational::make(3, 8), 0.4 * kPi), 24},
               {Modulation::make(1.5, Rational::make(1, 4), -0.4 * kPi), 24}};
  return l;
}

}  // namespace

TEST_CASE("diagonal 2x2") {
  CMat H = CMat::Zero(2, 2);
  H(0, 0) = cplx(0, 1);
  H(1, 1) = cplx(0, -1);
  const auto es = eigendecompose(H);
  CHECK(es.exceptional == std::vector<bool>{false, false});
  for (int j = 0; j < 2; ++j) {
    const int site = std::abs(es.values(j) - cplx(0, 1)) < 1e-14 ? 0 : 1;
    CHECK(std::abs(es.values(j) - H(site, site)) < 1e-14);
    CHECK(std::abs(std::abs(es.right(site, j)) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(es.left(site, j)) - 1.0) < 1e-14);
  }
}

TEST_CASE("biorthonormal reconstruction of a random matrix") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CMat H(40, 40);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) H(i, j) = cplx(g(rng), g(rng));
  const auto es = eigendecompose(H);
  const CMat rec = es.right * es.values.asDiagonal() * es.left.adjoint();
  CHECK((rec - H).norm() < 1e-8 * H.norm());
  CHECK((es.left.adjoint() * es.right - CMat::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate eigenvalues keep a biorthonormal basis") {
  // Uniform chain with even length has no repeated values; a block-diagonal copy does.
  const auto m = Modulation::make(0.9, Rational::make(1, 4), 0.3);
  const CMat h = build_open_hamiltonian(Lattice::single(m, 10));
  CMat H = CMat::Zero(20, 20);
  H.topLeftCorner(10, 10) = h;
  H.bottomRightCorner(10, 10) = h;
  const auto es = eigendecompose(H);
  CHECK(es.degenerate);
  CHECK((es.left.adjoint() * es.right - CMat::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("spectral symmetry residual") {
  CVec a(2);
  a << cplx(1, 0.2), cplx(-1, 0.2);
  CHECK(spectral_symmetry_residual(a) == 0.0);
  CVec b(2);
  b << cplx(0, 0.5), cplx(0, 0.1);
  CHECK(spectral_symmetry_residual(b) == 0.0);
  CVec c(2);
  c << cplx(1, 0), cplx(2, 0);
  CHECK(spectral_symmetry_residual(c) > 2.9);

  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  CHECK(spectral_symmetry_residual(eigendecompose(build_open_hamiltonian(Lattice::single(m, 200)))) < 1e-9);
}

TEST_CASE("real-line gap") {
  CHECK_FALSE(real_line_gap(Modulation::make(0.0, Rational::make(3, 8), 0.0)).gapped);
  CHECK(real_line_gap(Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi)).gapped);
  const double x = 1.2, y = 2.0;
  CHECK_FALSE(real_line_gap(Modulation::make(std::hypot(x, y), Rational::make(3, 8), std::atan2(y, x))).gapped);
  CHECK_THROWS_AS(real_line_gap(Modulation::make(1.0, Rational::make(3, 8), 0.0), 16), Error);
}

TEST_CASE("decay fit recovers an exponential") {
  Eigen::VectorXd amp(60);
  for (int i = 0; i < 60; ++i) amp(i) = std::exp(-i / 4.0) * (i % 3 == 0 ? 1.0 : 0.3);
  const auto f = fit_decay(amp, 0, 3, 10, 1e-10);
  CHECK(f.length == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(f.residual < 1e-12);
  CHECK(f.samples == 11);
}

TEST_CASE("inverse participation ratio") {
  CVec e = CVec::Zero(10);
  e(3) = 2.0;
  CHECK(inverse_participation_ratio(e) == doctest::Approx(1.0));
  CHECK(inverse_participation_ratio(CVec::Ones(10)) == doctest::Approx(0.1));
}

TEST_CASE("edge zero modes in a nontrivial spoke") {
  const auto m = Modulation::make(1.4, Rational::make(3, 8), 0.4 * kPi);
  const auto l = Lattice::single(m, 200);
  const auto es = eigendecompose(build_open_hamiltonian(l));
  const auto modes = find_zero_modes(es, l);
  REQUIRE(modes.size() == 2u);
  int left = 0, right = 0;
  for (const auto& z : modes) {
    CHECK(z.re_energy_abs < 1e-6);
    CHECK(z.is_protected);
    CHECK(std::isfinite(z.decay_length));
    CHECK(z.fit_residual < 0.1);
    CHECK(z.ct_residual < 1e-6);
    left += z.anchor.kind == AnchorKind::LeftEdge;
    right += z.anchor.kind == AnchorKind::RightEdge;
  }
  CHECK(left == 1);
  CHECK(right == 1);
}

TEST_CASE("no zero modes in a trivial spoke or without modulation") {
  for (double d : {1.1 * kPi, 0.65 * kPi}) {
    const auto l = Lattice::single(Modulation::make(1.4, Rational::make(3, 8), d), 200);
    CHECK(find_zero_modes(eigendecompose(build_open_hamiltonian(l)), l).empty());
  }
  std::vector<double> deltas;
  for (int j = 0; j < 12; ++j) deltas.push_back(kTwoPi * j / 12);
  for (const auto& row : delta_sweep(Modulation::make(0.0, Rational::make(3, 8), 0.0), 40, deltas)) {
    CHECK(row.modes.empty());
    CHECK(row.values.imag().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("domain wall hosts the mode with the largest Im E") {
  const auto l = wall_lattice();
  const auto es = eigendecompose(build_open_hamiltonian(l));
  const auto modes = find_zero_modes(es, l);
  int wall = 0;
  for (const auto& z : modes) {
    if (z.anchor.kind != AnchorKind::Wall) continue;
    ++wall;
    CHECK(z.anchor.wall == 24);
    CHECK(z.is_protected);
    for (int i = 0; i < es.values.size(); ++i)
      if (i != z.index) CHECK(es.values(i).imag() < z.energy.imag());
  }
  CHECK(wall == 1);
}

TEST_CASE("delta sweep validates its input") {
  const auto m = Modulation::make(1.0, Rational::make(3, 8), 0.0);
  CHECK_THROWS_AS(delta_sweep(m, 7, {0.0}), Error);
  const auto rows = delta_sweep(m, 16, {0.1, 0.2}, {}, 2);
  CHECK(rows.size() == 2u);
  CHECK(rows[1].delta == 0.2);
}
