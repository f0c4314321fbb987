#pragma once

#include <limits>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace aah {

struct EigenSystem {
  CVec values;
  CMat right;  // columns
  CMat left;   // columns, <left_i|right_j> = delta_ij off exceptional points
  double biorth_condition = 0.0;   // smallest |<L|R>| before normalization
  std::vector<bool> exceptional;   // |<L|R>| below threshold
  bool degenerate = false;  // some eigenvalues coincide to 1e-10 relative
};

EigenSystem eigendecompose(const CMat& H, double ep_threshold = 1e-8);

// Largest mismatch in the optimal matching of {E} with {-conj(E)}.
double spectral_symmetry_residual(const CVec& values);
inline double spectral_symmetry_residual(const EigenSystem& es) { return spectral_symmetry_residual(es.values); }

struct GapReport {
  double min_abs_re = 0.0;
  bool gapped = false;
  int k_samples = 0;
  double eps_gap = 1e-4;
};

inline constexpr double kDefaultEpsGap = 1e-4;

// k_samples = 0 picks 8p.
GapReport real_line_gap(const Modulation& m, int k_samples = 0, double eps_gap = kDefaultEpsGap);

enum class AnchorKind { LeftEdge, RightEdge, Wall };

struct Anchor {
  AnchorKind kind = AnchorKind::LeftEdge;
  int wall = -1;  // first site of the right-hand domain
  bool operator==(const Anchor&) const = default;
};

std::string anchor_name(const Anchor& a);

struct ZeroModeReport {
  int index = -1;
  cplx energy;
  double re_energy_abs = 0.0;
  double ipr = 0.0;
  double decay_length = std::numeric_limits<double>::infinity();
  double fit_residual = 0.0;
  int fit_samples = 0;
  Anchor anchor;
  int peak_site = -1;
  int anchor_distance = 0;
  double ct_phase = 0.0;
  double ct_residual = 0.0;
  // Localized |Re E| ~ 0 states bound to the same anchor, this one included.
  int anchor_count = 0;
  bool is_protected = false;
  double im_separation = std::numeric_limits<double>::infinity();
};

struct ZeroModeOptions {
  double eps_re = 1e-6;
  int anchor_tol = 2;
  int fit_samples = 10;
  double fit_floor = 1e-10;
  bool require_im_separation = false;
  double im_separation_factor = 10.0;
};

double inverse_participation_ratio(const CVec& psi);

struct DecayFit {
  double length = std::numeric_limits<double>::infinity();
  double residual = 0.0;
  int samples = 0;
};

// Semi-log fit of |psi| on the sites peak +- j*stride, j = 1..samples, on the side with the larger first sample.
DecayFit fit_decay(const Eigen::VectorXd& amp, int peak, int stride, int samples, double floor);

std::vector<ZeroModeReport> find_zero_modes(const EigenSystem& es, const Lattice& l,
                                            const ZeroModeOptions& opt = {});

struct SweepRow {
  double delta = 0.0;
  CVec values;
  std::vector<bool> zero;  // per eigenvalue
  std::vector<ZeroModeReport> modes;
};

std::vector<SweepRow> delta_sweep(const Modulation& m, int n, const std::vector<double>& deltas,
                                  const ZeroModeOptions& opt = {}, int threads = 1);

}  // namespace aah
