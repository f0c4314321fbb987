#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "core/error.hpp"

namespace aah {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Label of the first site of a chain or unit cell in the modulation phase.
inline constexpr long long kFirstSiteLabel = 1;

struct Rational {
  int q = 1;
  int p = 2;

  // Validates 0 < q < p and gcd(q, p) = 1.
  static Rational make(int q, int p);
  double value() const { return static_cast<double>(q) / p; }
  bool operator==(const Rational&) const = default;
};

struct Modulation {
  double V = 0.0;
  Rational alpha;
  double delta = 0.0;  // in [0, 2pi)

  // V < 0 folds into delta + pi; delta wraps into [0, 2pi).
  static Modulation make(double V, Rational alpha, double delta);
};

struct Domain {
  Modulation mod;
  int length = 0;
};

enum class SiteIndexing { DomainLocal, Global };

struct Lattice {
  std::vector<Domain> domains;
  double hopping = 1.0;
  SiteIndexing indexing = SiteIndexing::DomainLocal;

  static Lattice single(const Modulation& m, int n);
  int size() const;
  // Index of the first site of every domain after the first.
  std::vector<int> walls() const;
  int domain_of(int site) const;
};

double wrap_angle(double x);

double potential_value(const Modulation& m, long long n);

// V_n for every site, using the lattice's labeling convention.
std::vector<double> onsite_profile(const Lattice& l);

CMat build_open_hamiltonian(const Lattice& l);

// Periodic gauge: the Bloch phase sits only on the bond between cells.
CMat build_bloch_hamiltonian(const Modulation& m, double k);

struct SymmetryOperator {
  std::vector<int> diag;
  int dimension() const { return static_cast<int>(diag.size()); }
};

SymmetryOperator symmetry_operator(int dim);

// max |C conj(H) C + H|.
double ct_anticommutation_residual(const CMat& H, const SymmetryOperator& C);

// max |C H^dagger C + H|, the momentum-space form of the same symmetry.
double bloch_ct_residual(const CMat& Hk, const SymmetryOperator& C);

}  // namespace aah
