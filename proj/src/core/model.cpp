#include "core/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace aah {

Rational Rational::make(int q, int p) {
  if (p <= 0 || q <= 0 || q >= p)
    fail(ErrorKind::InvalidArgument, "alpha = q/p requires 0 < q < p, got " + std::to_string(q) + "/" +
                                         std::to_string(p));
  if (std::gcd(q, p) != 1)
    fail(ErrorKind::InvalidArgument,
         "alpha = q/p requires coprime q and p, got " + std::to_string(q) + "/" + std::to_string(p));
  return Rational{q, p};
}

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Modulation Modulation::make(double V, Rational alpha, double delta) {
  if (!std::isfinite(V) || !std::isfinite(delta))
    fail(ErrorKind::InvalidArgument, "modulation parameters must be finite");
  alpha = Rational::make(alpha.q, alpha.p);
  if (V < 0) {
    V = -V;
    delta += kPi;
  }
  return Modulation{V, alpha, wrap_angle(delta)};
}

Lattice Lattice::single(const Modulation& m, int n) {
  Lattice l;
  l.domains.push_back(Domain{m, n});
  return l;
}

int Lattice::size() const {
  int n = 0;
  for (const auto& d : domains) n += d.length;
  return n;
}

std::vector<int> Lattice::walls() const {
  std::vector<int> w;
  int start = 0;
  for (std::size_t i = 0; i + 1 < domains.size(); ++i) {
    start += domains[i].length;
    w.push_back(start);
  }
  return w;
}

int Lattice::domain_of(int site) const {
  int start = 0;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    start += domains[i].length;
    if (site < start) return static_cast<int>(i);
  }
  return static_cast<int>(domains.size()) - 1;
}

double potential_value(const Modulation& m, long long n) {
  const long long p = m.alpha.p;
  long long r = (static_cast<long long>(m.alpha.q) * (n % p)) % p;
  if (r < 0) r += p;
  return m.V * std::sin(kTwoPi * static_cast<double>(r) / static_cast<double>(p) + m.delta);
}

std::vector<double> onsite_profile(const Lattice& l) {
  std::vector<double> v;
  v.reserve(l.size());
  long long global = 0;
  for (const auto& d : l.domains) {
    if (d.length < 1) fail(ErrorKind::InvalidArgument, "domain length must be at least 1");
    for (int j = 0; j < d.length; ++j, ++global) {
      const long long label = (l.indexing == SiteIndexing::Global ? global : j) + kFirstSiteLabel;
      v.push_back(potential_value(d.mod, label));
    }
  }
  return v;
}

CMat build_open_hamiltonian(const Lattice& l) {
  if (l.domains.empty()) fail(ErrorKind::InvalidArgument, "lattice has no domains");
  const int n = l.size();
  if (n < 2) fail(ErrorKind::InvalidArgument, "lattice needs at least 2 sites");
  const auto v = onsite_profile(l);
  CMat H = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = cplx(0.0, v[i]);
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = l.hopping;
  }
  return H;
}

CMat build_bloch_hamiltonian(const Modulation& m, double k) {
  const int p = m.alpha.p;
  CMat H = CMat::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    H(i, i) = cplx(0.0, potential_value(m, i + kFirstSiteLabel));
    if (i + 1 < p) H(i, i + 1) = H(i + 1, i) = 1.0;
  }
  // Accumulate so that p = 2 keeps both the intra- and inter-cell bond.
  H(p - 1, 0) += std::polar(1.0, k);
  H(0, p - 1) += std::polar(1.0, -k);
  return H;
}

SymmetryOperator symmetry_operator(int dim) {
  if (dim <= 0 || dim % 2 != 0)
    fail(ErrorKind::InvalidArgument,
         "symmetry operator needs an even dimension (I ⊗ sigma_z acts on pairs of sites), got " +
             std::to_string(dim));
  SymmetryOperator C;
  C.diag.resize(dim);
  for (int i = 0; i < dim; ++i) C.diag[i] = (i % 2 == 0) ? 1 : -1;
  return C;
}

namespace {
void check_dims(const CMat& H, const SymmetryOperator& C) {
  if (H.rows() != H.cols() || H.rows() != C.dimension())
    fail(ErrorKind::InvalidArgument, "matrix and symmetry operator dimensions differ");
}
}  // namespace

double ct_anticommutation_residual(const CMat& H, const SymmetryOperator& C) {
  check_dims(H, C);
  double r = 0.0;
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j)
      r = std::max(r, std::abs(static_cast<double>(C.diag[i] * C.diag[j]) * std::conj(H(i, j)) + H(i, j)));
  return r;
}

double bloch_ct_residual(const CMat& Hk, const SymmetryOperator& C) {
  check_dims(Hk, C);
  double r = 0.0;
  for (int i = 0; i < Hk.rows(); ++i)
    for (int j = 0; j < Hk.cols(); ++j)
      r = std::max(r, std::abs(static_cast<double>(C.diag[i] * C.diag[j]) * std::conj(Hk(j, i)) + Hk(i, j)));
  return r;
}

}  // namespace aah
