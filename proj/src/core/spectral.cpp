#include "core/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <complex>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/parallel.hpp"

namespace aah {

namespace {

constexpr double kDegenerate = 1e-10;

std::string fingerprint(const CMat& H) {
  std::ostringstream os;
  os << H.rows() << "x" << H.cols() << " |H|_F=" << H.norm() << " trace=" << H.trace();
  return os.str();
}

// Minimum-cost assignment; returns match[i] = column assigned to row i.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n);
  for (int j = 1; j <= n; ++j) match[p[j] - 1] = j - 1;
  return match;
}

}  // namespace

EigenSystem eigendecompose(const CMat& H, double ep_threshold) {
  if (H.rows() != H.cols() || H.rows() == 0) fail(ErrorKind::InvalidArgument, "eigendecompose needs a square matrix");
  if (!H.allFinite()) fail(ErrorKind::InvalidArgument, "eigendecompose: non-finite entries");
  const int n = static_cast<int>(H.rows());

  EigenSystem es;
  es.values.resize(n);
  es.right.resize(n, n);
  es.left.resize(n, n);
  CMat A = H;
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'V', 'V', n, A.data(), n, es.values.data(),
                                        es.left.data(), n, es.right.data(), n);
  if (info != 0)
    fail(ErrorKind::Numerical, "zgeev failed (info " + std::to_string(info) + ") for " + fingerprint(H));

  // Inside a cluster of numerically equal eigenvalues the left and right bases are unrelated,
  // so the cluster block of left vectors is re-fitted to the right block.
  std::vector<char> in_cluster(n, 0);
  const double scale = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  for (int a = 0; a < n; ++a) {
    if (in_cluster[a]) continue;
    std::vector<int> cl{a};
    for (int b = a + 1; b < n; ++b)
      if (!in_cluster[b] && std::abs(es.values(a) - es.values(b)) < kDegenerate * scale) cl.push_back(b);
    if (cl.size() < 2) continue;
    es.degenerate = true;
    const int m = static_cast<int>(cl.size());
    CMat R(n, m), L(n, m);
    for (int c = 0; c < m; ++c) {
      in_cluster[cl[c]] = 1;
      R.col(c) = es.right.col(cl[c]);
      L.col(c) = es.left.col(cl[c]);
    }
    const CMat S = L.adjoint() * R;
    Eigen::FullPivLU<CMat> lu(S);
    if (lu.isInvertible()) {
      const CMat Lfit = L * lu.inverse().adjoint();
      for (int c = 0; c < m; ++c) es.left.col(cl[c]) = Lfit.col(c);
    }
  }

  es.exceptional.assign(n, false);
  es.biorth_condition = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const cplx s = es.left.col(j).dot(es.right.col(j));
    const double cond = std::abs(s) / std::max(es.left.col(j).norm(), 1e-300);
    es.biorth_condition = std::min(es.biorth_condition, cond);
    if (cond < ep_threshold) {
      es.exceptional[j] = true;
      continue;
    }
    es.left.col(j) /= std::conj(s);
  }
  return es;
}

double spectral_symmetry_residual(const CVec& values) {
  const int n = static_cast<int>(values.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = std::abs(values(i) + std::conj(values(j)));
  const auto match = hungarian(cost);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, cost(i, match[i]));
  return worst;
}

GapReport real_line_gap(const Modulation& m, int k_samples, double eps_gap) {
  const int p = m.alpha.p;
  if (k_samples == 0) k_samples = 8 * p;
  if (k_samples < 4 * p) fail(ErrorKind::InvalidArgument, "real_line_gap needs at least 4p k samples");
  if (!(eps_gap > 0)) fail(ErrorKind::InvalidArgument, "eps_gap must be positive");
  GapReport g;
  g.k_samples = k_samples;
  g.eps_gap = eps_gap;
  g.min_abs_re = std::numeric_limits<double>::infinity();
  for (int j = 0; j < k_samples; ++j) {
    const double k = kTwoPi * j / k_samples;
    Eigen::ComplexEigenSolver<CMat> es(build_bloch_hamiltonian(m, k), false);
    if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "Bloch eigensolver did not converge");
    g.min_abs_re = std::min(g.min_abs_re, es.eigenvalues().real().cwiseAbs().minCoeff());
  }
  g.gapped = g.min_abs_re > eps_gap;
  return g;
}

std::string anchor_name(const Anchor& a) {
  switch (a.kind) {
    case AnchorKind::LeftEdge:
      return "left";
    case AnchorKind::RightEdge:
      return "right";
    case AnchorKind::Wall:
      return "wall:" + std::to_string(a.wall);
  }
  return "?";
}

double inverse_participation_ratio(const CVec& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 == 0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < psi.size(); ++i) s += std::norm(psi(i)) * std::norm(psi(i));
  return s / (n2 * n2);
}

DecayFit fit_decay(const Eigen::VectorXd& amp, int peak, int stride, int samples, double floor) {
  const int n = static_cast<int>(amp.size());
  const double cut = floor * amp(peak);
  std::vector<int> best;
  for (int side : {1, -1}) {
    std::vector<int> idx;
    for (int j = 1; j <= samples; ++j) {
      const int s = peak + side * stride * j;
      if (s < 0 || s >= n) break;
      if (amp(s) > cut) idx.push_back(s);
    }
    if (idx.size() < 2) continue;
    if (best.empty() || amp(idx.front()) > amp(best.front())) best = idx;
  }
  DecayFit fit;
  if (best.empty()) return fit;
  best.insert(best.begin(), peak);
  const int m = static_cast<int>(best.size());
  Eigen::VectorXd d(m), y(m);
  for (int i = 0; i < m; ++i) {
    d(i) = std::abs(best[i] - peak);
    y(i) = std::log(amp(best[i]));
  }
  const double dm = d.mean(), ym = y.mean();
  const double sxx = (d.array() - dm).square().sum();
  const double slope = ((d.array() - dm) * (y.array() - ym)).sum() / sxx;
  const double icpt = ym - slope * dm;
  fit.residual = (y.array() - (icpt + slope * d.array())).abs().maxCoeff();
  fit.samples = m;
  if (slope < 0) fit.length = -1.0 / slope;
  return fit;
}

std::vector<ZeroModeReport> find_zero_modes(const EigenSystem& es, const Lattice& l, const ZeroModeOptions& opt) {
  if (!(opt.eps_re > 0)) fail(ErrorKind::InvalidArgument, "eps_re must be positive");
  const int n = static_cast<int>(es.values.size());
  if (n != l.size()) fail(ErrorKind::InvalidArgument, "eigensystem and lattice sizes differ");
  const auto C = symmetry_operator(n);
  const auto walls = l.walls();

  struct Cand {
    ZeroModeReport r;
    int group_tol = 0;
  };
  std::vector<Cand> loc;
  for (int i = 0; i < n; ++i) {
    const cplx E = es.values(i);
    if (!(std::abs(E.real()) < opt.eps_re)) continue;
    const CVec psi = es.right.col(i).normalized();
    const Eigen::VectorXd amp = psi.cwiseAbs();
    int peak = 0;
    amp.maxCoeff(&peak);

    Anchor anchor{AnchorKind::LeftEdge, -1};
    int dist = peak;
    if (n - 1 - peak < dist) {
      anchor = {AnchorKind::RightEdge, -1};
      dist = n - 1 - peak;
    }
    for (int w : walls) {
      const int dw = std::min(std::abs(peak - (w - 1)), std::abs(peak - w));
      if (dw < dist) {
        anchor = {AnchorKind::Wall, w};
        dist = dw;
      }
    }
    const int stride = l.domains[l.domain_of(peak)].mod.alpha.p;
    const DecayFit fit = fit_decay(amp, peak, stride, opt.fit_samples, opt.fit_floor);
    if (!std::isfinite(fit.length)) continue;
    // Same-edge partners can peak up to one unit cell inside the boundary.
    if (dist > std::max(opt.anchor_tol, stride - 1)) continue;

    Cand c;
    c.group_tol = std::max(opt.anchor_tol, stride - 1);
    ZeroModeReport& r = c.r;
    r.index = i;
    r.energy = E;
    r.re_energy_abs = std::abs(E.real());
    r.ipr = inverse_participation_ratio(psi);
    r.decay_length = fit.length;
    r.fit_residual = fit.residual;
    r.fit_samples = fit.samples;
    r.anchor = anchor;
    r.peak_site = peak;
    r.anchor_distance = dist;
    cplx acc = 0.0;
    for (int s = 0; s < n; ++s) acc += static_cast<double>(C.diag[s]) * psi(s) * psi(s);
    r.ct_phase = std::arg(acc);
    const cplx ph = std::polar(1.0, r.ct_phase);
    double res2 = 0.0;
    for (int s = 0; s < n; ++s) res2 += std::norm(psi(s) - ph * static_cast<double>(C.diag[s]) * std::conj(psi(s)));
    r.ct_residual = std::sqrt(res2);
    loc.push_back(c);
  }

  // Separation from states on the Re E = 0 line that are not localized candidates.
  std::vector<char> is_loc(n, 0);
  for (const auto& c : loc) is_loc[c.r.index] = 1;
  for (auto& c : loc) {
    for (int j = 0; j < n; ++j) {
      if (is_loc[j] || !(std::abs(es.values(j).real()) < opt.eps_re)) continue;
      c.r.im_separation = std::min(c.r.im_separation, std::abs(es.values(j).imag() - c.r.energy.imag()));
    }
  }
  if (opt.require_im_separation) {
    const double min_sep = opt.im_separation_factor * opt.eps_re;
    std::erase_if(loc, [&](const Cand& c) { return !(c.r.im_separation > min_sep); });
  }

  std::vector<ZeroModeReport> out;
  for (const auto& c : loc) {
    if (c.r.anchor_distance > opt.anchor_tol) continue;
    ZeroModeReport r = c.r;
    r.anchor_count = 0;
    for (const auto& o : loc)
      if (o.r.anchor == r.anchor && o.r.anchor_distance <= o.group_tol) ++r.anchor_count;
    r.is_protected = r.anchor_count % 2 == 1;
    out.push_back(r);
  }
  return out;
}

std::vector<SweepRow> delta_sweep(const Modulation& m, int n, const std::vector<double>& deltas,
                                  const ZeroModeOptions& opt, int threads) {
  if (n < 2 || n % 2 != 0) fail(ErrorKind::InvalidArgument, "delta_sweep needs an even chain length");
  std::vector<SweepRow> rows(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), threads, [&](int i) {
    const Lattice l = Lattice::single(Modulation::make(m.V, m.alpha, deltas[i]), n);
    const auto es = eigendecompose(build_open_hamiltonian(l));
    SweepRow& row = rows[i];
    row.delta = deltas[i];
    row.values = es.values;
    row.modes = find_zero_modes(es, l, opt);
    row.zero.assign(n, false);
    for (const auto& z : row.modes) row.zero[z.index] = true;
  });
  return rows;
}

}  // namespace aah
