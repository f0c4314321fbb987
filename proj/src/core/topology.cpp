#include "core/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/parallel.hpp"

namespace aah {

namespace {

struct Frame {
  CMat R, L;
  CVec E;
};

Frame bloch_frame(const Modulation& m, int j, int nk, const GaugeFn& gauge) {
  const double k = kTwoPi * j / nk;
  auto es = eigendecompose(build_bloch_hamiltonian(m, k));
  for (std::size_t b = 0; b < es.exceptional.size(); ++b)
    if (es.exceptional[b]) {
      std::ostringstream os;
      os << "exceptional point in Bloch spectrum at k=" << k << " (biorthogonal pairing below threshold); refine the grid";
      fail(ErrorKind::Numerical, os.str());
    }
  if (gauge) {
    for (int b = 0; b < es.right.cols(); ++b) {
      const cplx c = gauge(j, b);
      es.right.col(b) *= c;
      es.left.col(b) /= std::conj(c);
    }
  }
  return Frame{std::move(es.right), std::move(es.left), std::move(es.values)};
}

std::vector<int> select_bands(const CVec& E, int sign, double eps_gap, double k) {
  std::vector<int> idx;
  for (int b = 0; b < E.size(); ++b) {
    const double re = E(b).real();
    if (std::abs(re) < eps_gap) {
      std::ostringstream os;
      os << "real line gap violated at k=" << k << " (|Re E|=" << std::abs(re) << ")";
      fail(ErrorKind::Numerical, os.str());
    }
    if (sign * re > 0) idx.push_back(b);
  }
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return E(a).real() < E(b).real(); });
  return idx;
}

CMat columns(const CMat& A, const std::vector<int>& idx) {
  CMat out(A.rows(), static_cast<int>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) out.col(static_cast<int>(c)) = A.col(idx[c]);
  return out;
}

struct Loop {
  double phase = 0.0;  // -arg prod det, in (-pi, pi]
  std::vector<double> track;
  int count = 0;
};

// Closed loop over frames[0], frames[step], ...; sign selects Re E < 0 (-1), Re E > 0 (+1), or all bands (0).
Loop subspace_loop(const std::vector<Frame>& frames, int step, int sign, double eps_gap, int p) {
  const int n = static_cast<int>(frames.size()) / step;
  std::vector<CMat> R(n), L(n);
  Loop loop;
  for (int j = 0; j < n; ++j) {
    const Frame& f = frames[j * step];
    if (sign == 0) {
      R[j] = f.R;
      L[j] = f.L;
      loop.count = p;
      continue;
    }
    const auto idx = select_bands(f.E, sign, eps_gap, kTwoPi * j / n);
    if (static_cast<int>(idx.size()) != p / 2) {
      std::ostringstream os;
      os << "expected " << p / 2 << " bands with " << (sign < 0 ? "Re E < 0" : "Re E > 0") << " at k=" << kTwoPi * j / n
         << ", found " << idx.size();
      fail(ErrorKind::Numerical, os.str());
    }
    R[j] = columns(f.R, idx);
    L[j] = columns(f.L, idx);
    loop.count = static_cast<int>(idx.size());
  }
  cplx prod = 1.0;
  loop.track.reserve(n);
  for (int j = 0; j < n; ++j) {
    const cplx d = (L[j].adjoint() * R[(j + 1) % n]).determinant();
    if (!(std::abs(d) > 0)) fail(ErrorKind::Numerical, "singular overlap matrix in Wilson loop");
    loop.track.push_back(std::arg(d));
    prod *= d / std::abs(d);
  }
  loop.phase = -std::arg(prod);
  return loop;
}

double fraction(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

double reduce_subspace_phase(double theta) { return theta < -kPi / 2 ? theta + kTwoPi : theta; }

std::vector<Frame> frames_for(const Modulation& m, int nk, const GaugeFn& gauge) {
  std::vector<Frame> frames;
  frames.reserve(nk);
  for (int j = 0; j < nk; ++j) frames.push_back(bloch_frame(m, j, nk, gauge));
  return frames;
}

void check_nk(const Modulation& m, int nk) {
  if (m.alpha.p % 2 != 0) fail(ErrorKind::InvalidArgument, "Wilson loop needs an even number of bands");
  if (nk < 64) fail(ErrorKind::InvalidArgument, "Wilson loop needs nk >= 64");
}

}  // namespace

double circular_distance(double x) {
  const double f = fraction(x);
  return std::min(f, 1.0 - f);
}

std::vector<int> occupied_bands(const Modulation& m, double k, double eps_gap) {
  Eigen::ComplexEigenSolver<CMat> es(build_bloch_hamiltonian(m, k), false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "Bloch eigensolver did not converge");
  const auto idx = select_bands(es.eigenvalues(), -1, eps_gap, k);
  if (static_cast<int>(idx.size()) != m.alpha.p / 2) fail(ErrorKind::Numerical, "occupied band count differs from p/2");
  return idx;
}

namespace {

WilsonLoopResult wilson_from_frames(const std::vector<Frame>& frames, const Modulation& m, const WilsonOptions& opt) {
  const int p = m.alpha.p;
  const int fine = static_cast<int>(frames.size());
  const int step = fine / opt.nk;
  const Loop coarse = subspace_loop(frames, step, -1, opt.eps_gap, p);
  WilsonLoopResult r;
  r.nk = opt.nk;
  r.loop_phase = coarse.phase;
  r.det_track = coarse.track;
  r.occupied_count = coarse.count;
  r.polarization = fraction(coarse.phase / kTwoPi);
  if (step > 1) {
    const Loop dense = subspace_loop(frames, 1, -1, opt.eps_gap, p);
    const double diff = circular_distance((dense.phase - coarse.phase) / kTwoPi);
    if (diff > opt.convergence_tol) {
      std::ostringstream os;
      os << "polarization not converged: nk=" << opt.nk << " vs " << fine << " differ by " << diff;
      fail(ErrorKind::Numerical, os.str());
    }
  }
  return r;
}

BerryPhase berry_from_frames(const std::vector<Frame>& frames, const Modulation& m, const WilsonOptions& opt) {
  const int p = m.alpha.p;
  const int fine = static_cast<int>(frames.size());
  const int step = fine / opt.nk;
  auto total = [&](int s) {
    const Loop occ = subspace_loop(frames, s, -1, opt.eps_gap, p);
    const Loop un = subspace_loop(frames, s, +1, opt.eps_gap, p);
    BerryPhase b;
    b.occupied = reduce_subspace_phase(occ.phase);
    b.unoccupied = reduce_subspace_phase(un.phase);
    b.total = b.occupied + b.unoccupied;
    return b;
  };
  BerryPhase b = total(step);
  b.det_track = subspace_loop(frames, step, 0, opt.eps_gap, p).track;
  if (step > 1) {
    const BerryPhase d = total(1);
    if (std::abs(d.total - b.total) > opt.convergence_tol * kTwoPi) {
      std::ostringstream os;
      os << "global Berry phase not converged: nk=" << opt.nk << " gives " << b.total << ", nk=" << fine << " gives "
         << d.total;
      fail(ErrorKind::Numerical, os.str());
    }
  }
  return b;
}

std::vector<Frame> frames_checked(const Modulation& m, const WilsonOptions& opt) {
  check_nk(m, opt.nk);
  return frames_for(m, opt.check_convergence ? 2 * opt.nk : opt.nk, opt.gauge);
}

}  // namespace

WilsonLoopResult wilson_polarization(const Modulation& m, const WilsonOptions& opt) {
  return wilson_from_frames(frames_checked(m, opt), m, opt);
}

BerryPhase global_berry_phase(const Modulation& m, const WilsonOptions& opt) {
  return berry_from_frames(frames_checked(m, opt), m, opt);
}

std::string label_name(PhaseLabel l) {
  switch (l) {
    case PhaseLabel::Nontrivial:
      return "nontrivial";
    case PhaseLabel::Trivial:
      return "trivial";
    case PhaseLabel::Gapless:
      return "gapless";
  }
  return "?";
}

Classification classify_point(const Modulation& m, const ClassifyOptions& opt) {
  Classification c;
  c.gap = real_line_gap(m, opt.k_samples, opt.eps_gap);
  if (!c.gap.gapped) return c;
  WilsonOptions wo;
  wo.nk = opt.nk;
  wo.eps_gap = opt.eps_gap;
  const auto frames = frames_checked(m, wo);
  const auto w = wilson_from_frames(frames, m, wo);
  const auto b = berry_from_frames(frames, m, wo);
  c.has_invariants = true;
  c.polarization = w.polarization;
  c.global_phase = b.total;
  if (circular_distance(w.polarization - 0.5) < opt.label_tol) {
    c.label = PhaseLabel::Nontrivial;
  } else if (circular_distance(w.polarization) < opt.label_tol) {
    c.label = PhaseLabel::Trivial;
  } else {
    std::ostringstream os;
    os << "unquantized polarization " << w.polarization << "; det_track:";
    for (double d : w.det_track) os << ' ' << d;
    fail(ErrorKind::Numerical, os.str());
  }
  return c;
}

PhaseDiagram phase_diagram(Rational alpha, double v_max, int nv, int ndelta, const ClassifyOptions& opt, int threads) {
  if (nv < 8 || ndelta < 8) fail(ErrorKind::InvalidArgument, "phase diagram needs nv, ndelta >= 8");
  if (!(v_max > 0)) fail(ErrorKind::InvalidArgument, "phase diagram needs v_max > 0");
  alpha = Rational::make(alpha.q, alpha.p);
  PhaseDiagram d;
  d.alpha = alpha;
  for (int i = 0; i < nv; ++i) d.v_grid.push_back(v_max * (i + 1) / nv);
  for (int j = 0; j < ndelta; ++j) d.delta_grid.push_back(kTwoPi * j / ndelta);
  d.cells.resize(static_cast<std::size_t>(nv) * ndelta);
  parallel_for(nv * ndelta, threads, [&](int cell) {
    const int iv = cell / ndelta, id = cell % ndelta;
    const Modulation m = Modulation::make(d.v_grid[iv], alpha, d.delta_grid[id]);
    try {
      d.cells[cell] = classify_point(m, opt);
    } catch (const Error& e) {
      Classification c;
      c.gap = real_line_gap(m, opt.k_samples, opt.eps_gap);
      c.label = PhaseLabel::Gapless;
      c.diagnostic = e.what();
      d.cells[cell] = c;
    }
  });
  return d;
}

SpokeCensus spoke_census(const PhaseDiagram& d, double v_ring) {
  if (d.v_grid.empty() || d.delta_grid.empty()) fail(ErrorKind::InvalidArgument, "empty phase diagram");
  const double spacing = d.v_grid.size() > 1 ? d.v_grid[1] - d.v_grid[0] : d.v_grid[0];
  int iv = 0;
  for (int i = 0; i < static_cast<int>(d.v_grid.size()); ++i)
    if (std::abs(d.v_grid[i] - v_ring) < std::abs(d.v_grid[iv] - v_ring)) iv = i;
  if (std::abs(d.v_grid[iv] - v_ring) > 0.5 * spacing + 1e-12)
    fail(ErrorKind::InvalidArgument, "v_ring lies outside the diagram's radial grid");

  const int n = static_cast<int>(d.delta_grid.size());
  std::vector<PhaseLabel> ring(n);
  for (int j = 0; j < n; ++j) ring[j] = d.at(iv, j).label;

  SpokeCensus s;
  s.v_ring = d.v_grid[iv];
  int start = -1;
  for (int j = 0; j < n; ++j)
    if (ring[j] != ring[(j + n - 1) % n]) {
      start = j;
      break;
    }
  if (start < 0) {
    if (ring[0] != PhaseLabel::Gapless) {
      s.count = 1;
      s.arcs.push_back(ring[0]);
    }
    return s;
  }
  for (int t = 0; t < n; ++t) {
    const int j = (start + t) % n;
    if (ring[j] == PhaseLabel::Gapless) continue;
    if (t == 0 || ring[j] != ring[(j + n - 1) % n]) s.arcs.push_back(ring[j]);
  }
  s.count = static_cast<int>(s.arcs.size());
  for (int a = 0; a < s.count && s.count > 1; ++a)
    if (s.arcs[a] == s.arcs[(a + 1) % s.count]) s.alternating = false;
  return s;
}

}  // namespace aah
