#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/spectral.hpp"

namespace aah {

// Rescales band `band` at grid point `k_index`; left vectors get the inverse conjugate factor.
using GaugeFn = std::function<cplx(int k_index, int band)>;

struct WilsonOptions {
  int nk = 128;
  double eps_gap = kDefaultEpsGap;
  bool check_convergence = true;  // compares nk against 2nk
  double convergence_tol = 1e-6;
  GaugeFn gauge;
};

struct WilsonLoopResult {
  double polarization = 0.0;  // in [0, 1)
  int nk = 0;
  std::vector<double> det_track;  // arg det of each overlap step
  int occupied_count = 0;
  double loop_phase = 0.0;  // -arg of the closed determinant product
};

struct BerryPhase {
  double total = 0.0;
  double occupied = 0.0;    // in [-pi/2, 3pi/2)
  double unoccupied = 0.0;  // in [-pi/2, 3pi/2)
  std::vector<double> det_track;  // full-space overlap steps
};

std::vector<int> occupied_bands(const Modulation& m, double k, double eps_gap = kDefaultEpsGap);

WilsonLoopResult wilson_polarization(const Modulation& m, const WilsonOptions& opt = {});

// Sum of the occupied and unoccupied subspace loop phases: 2pi in the nontrivial phase, 0 in the trivial one.
BerryPhase global_berry_phase(const Modulation& m, const WilsonOptions& opt = {});

// Distance of x from the nearest integer.
double circular_distance(double x);

enum class PhaseLabel { Nontrivial, Trivial, Gapless };

std::string label_name(PhaseLabel l);

struct ClassifyOptions {
  int k_samples = 0;
  double eps_gap = kDefaultEpsGap;
  int nk = 128;
  double label_tol = 0.05;
};

struct Classification {
  PhaseLabel label = PhaseLabel::Gapless;
  GapReport gap;
  bool has_invariants = false;
  double polarization = 0.0;
  double global_phase = 0.0;
  std::string diagnostic;
};

// Throws on unquantized polarization; the message carries the determinant track.
Classification classify_point(const Modulation& m, const ClassifyOptions& opt = {});

struct PhaseDiagram {
  Rational alpha;
  std::vector<double> v_grid;
  std::vector<double> delta_grid;
  std::vector<Classification> cells;  // v-major

  const Classification& at(int iv, int id) const { return cells[iv * delta_grid.size() + id]; }
};

// Radii v_max*(i+1)/nv, angles 2pi*j/ndelta. Cell failures become Gapless with a diagnostic.
PhaseDiagram phase_diagram(Rational alpha, double v_max, int nv, int ndelta, const ClassifyOptions& opt = {},
                           int threads = 1);

struct SpokeCensus {
  int count = 0;
  bool alternating = true;
  double v_ring = 0.0;  // ring actually used
  std::vector<PhaseLabel> arcs;
};

// Arcs end at gapless cells and at label changes.
SpokeCensus spoke_census(const PhaseDiagram& d, double v_ring);

}  // namespace aah
