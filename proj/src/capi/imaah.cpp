#include "imaah/imaah.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/experiments.hpp"
#include "core/laser.hpp"
#include "core/output.hpp"

struct imaah_lattice {
  aah::Lattice lattice;
};

struct imaah_eigensystem {
  aah::EigenSystem es;
};

namespace {

thread_local std::string g_error;

imaah_status code(aah::ErrorKind k) {
  switch (k) {
    case aah::ErrorKind::InvalidArgument: return IMAAH_ERR_ARGUMENT;
    case aah::ErrorKind::Numerical: return IMAAH_ERR_NUMERICAL;
    case aah::ErrorKind::Config: return IMAAH_ERR_CONFIG;
    case aah::ErrorKind::Io: return IMAAH_ERR_IO;
  }
  return IMAAH_ERR_INTERNAL;
}

template <class F>
imaah_status guard(F&& f) {
  try {
    f();
    g_error.clear();
    return IMAAH_OK;
  } catch (const aah::Error& e) {
    g_error = e.what();
    return code(e.kind());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
  } catch (const std::exception& e) {
    g_error = e.what();
  } catch (...) {
    g_error = "unknown error";
  }
  return IMAAH_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) aah::fail(aah::ErrorKind::InvalidArgument, std::string(what) + " is null");
}

aah::Modulation modulation(const imaah_modulation* m) {
  need(m, "modulation");
  return aah::Modulation::make(m->V, aah::Rational::make(m->q, m->p), m->delta);
}

void split(const aah::CMat& H, double* re, double* im) {
  need(re, "re");
  need(im, "im");
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j) {
      re[i * H.cols() + j] = H(i, j).real();
      im[i * H.cols() + j] = H(i, j).imag();
    }
}

char* copy(const std::string& s) {
  char* c = static_cast<char*>(std::malloc(s.size() + 1));
  if (!c) throw std::bad_alloc();
  std::memcpy(c, s.c_str(), s.size() + 1);
  return c;
}

}  // namespace

extern "C" {

const char* imaah_last_error(void) { return g_error.c_str(); }

const char* imaah_version(void) {
  static const std::string v = aah::version_string();
  return v.c_str();
}

void imaah_string_free(char* s) { std::free(s); }

imaah_status imaah_lattice_single(const imaah_modulation* m, int sites, imaah_lattice** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    if (sites < 2) aah::fail(aah::ErrorKind::InvalidArgument, "sites must be at least 2");
    *out = new imaah_lattice{aah::Lattice::single(modulation(m), sites)};
  });
}

imaah_status imaah_lattice_from_json(const char* text, imaah_lattice** out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    *out = nullptr;
    *out = new imaah_lattice{aah::lattice_from_json(aah::parse_json(text, "lattice"))};
  });
}

void imaah_lattice_free(imaah_lattice* l) { delete l; }

int imaah_lattice_size(const imaah_lattice* l) { return l ? l->lattice.size() : 0; }

imaah_status imaah_hamiltonian(const imaah_lattice* l, double* re, double* im) {
  return guard([&] {
    need(l, "lattice");
    split(aah::build_open_hamiltonian(l->lattice), re, im);
  });
}

imaah_status imaah_ct_residual(const imaah_lattice* l, double* out) {
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    const auto H = aah::build_open_hamiltonian(l->lattice);
    *out = aah::ct_anticommutation_residual(H, aah::symmetry_operator(static_cast<int>(H.rows())));
  });
}

imaah_status imaah_bloch_hamiltonian(const imaah_modulation* m, double k, double* re, double* im) {
  return guard([&] { split(aah::build_bloch_hamiltonian(modulation(m), k), re, im); });
}

imaah_status imaah_bloch_ct_residual(const imaah_modulation* m, double k, double* out) {
  return guard([&] {
    need(out, "out");
    const auto H = aah::build_bloch_hamiltonian(modulation(m), k);
    *out = aah::bloch_ct_residual(H, aah::symmetry_operator(static_cast<int>(H.rows())));
  });
}

imaah_status imaah_eigensystem_compute(const imaah_lattice* l, imaah_eigensystem** out) {
  return guard([&] {
    need(l, "lattice");
    need(out, "out");
    *out = nullptr;
    *out = new imaah_eigensystem{aah::eigendecompose(aah::build_open_hamiltonian(l->lattice))};
  });
}

void imaah_eigensystem_free(imaah_eigensystem* es) { delete es; }

int imaah_eigensystem_size(const imaah_eigensystem* es) { return es ? static_cast<int>(es->es.values.size()) : 0; }

imaah_status imaah_eigensystem_values(const imaah_eigensystem* es, double* re, double* im) {
  return guard([&] {
    need(es, "eigensystem");
    need(re, "re");
    need(im, "im");
    for (int i = 0; i < es->es.values.size(); ++i) {
      re[i] = es->es.values(i).real();
      im[i] = es->es.values(i).imag();
    }
  });
}

imaah_status imaah_eigensystem_vector(const imaah_eigensystem* es, int index, double* re, double* im) {
  return guard([&] {
    need(es, "eigensystem");
    need(re, "re");
    need(im, "im");
    if (index < 0 || index >= es->es.values.size())
      aah::fail(aah::ErrorKind::InvalidArgument, "eigenvector index out of range");
    const aah::CVec v = es->es.right.col(index).normalized();
    for (int i = 0; i < v.size(); ++i) {
      re[i] = v(i).real();
      im[i] = v(i).imag();
    }
  });
}

imaah_status imaah_eigensystem_symmetry_residual(const imaah_eigensystem* es, double* out) {
  return guard([&] {
    need(es, "eigensystem");
    need(out, "out");
    *out = aah::spectral_symmetry_residual(es->es);
  });
}

imaah_status imaah_eigensystem_biorth_condition(const imaah_eigensystem* es, double* out) {
  return guard([&] {
    need(es, "eigensystem");
    need(out, "out");
    *out = es->es.biorth_condition;
  });
}

void imaah_zero_mode_options_default(imaah_zero_mode_options* opt) {
  if (!opt) return;
  const aah::ZeroModeOptions d;
  *opt = {d.eps_re, d.anchor_tol, d.fit_samples, d.fit_floor, d.require_im_separation ? 1 : 0, d.im_separation_factor};
}

imaah_status imaah_find_zero_modes(const imaah_eigensystem* es, const imaah_lattice* l,
                                   const imaah_zero_mode_options* opt, imaah_zero_mode* out, int capacity,
                                   int* count) {
  return guard([&] {
    need(es, "eigensystem");
    need(l, "lattice");
    need(count, "count");
    if (capacity > 0) need(out, "out");
    aah::ZeroModeOptions o;
    if (opt) {
      o.eps_re = opt->eps_re;
      o.anchor_tol = opt->anchor_tol;
      o.fit_samples = opt->fit_samples;
      o.fit_floor = opt->fit_floor;
      o.require_im_separation = opt->require_im_separation != 0;
      o.im_separation_factor = opt->im_separation_factor;
    }
    if (es->es.values.size() != l->lattice.size())
      aah::fail(aah::ErrorKind::InvalidArgument, "eigensystem and lattice sizes differ");
    const auto modes = aah::find_zero_modes(es->es, l->lattice, o);
    *count = static_cast<int>(modes.size());
    for (int i = 0; i < capacity && i < *count; ++i) {
      const auto& z = modes[i];
      out[i] = {z.index,
                z.energy.real(),
                z.energy.imag(),
                z.ipr,
                z.decay_length,
                z.fit_residual,
                z.ct_residual,
                z.im_separation,
                static_cast<int>(z.anchor.kind),
                z.anchor.wall,
                z.peak_site,
                z.anchor_count,
                z.is_protected ? 1 : 0};
    }
  });
}

imaah_status imaah_real_line_gap(const imaah_modulation* m, int k_samples, double eps_gap, double* min_abs_re,
                                 int* gapped) {
  return guard([&] {
    need(min_abs_re, "min_abs_re");
    need(gapped, "gapped");
    const auto g = aah::real_line_gap(modulation(m), k_samples, eps_gap);
    *min_abs_re = g.min_abs_re;
    *gapped = g.gapped ? 1 : 0;
  });
}

imaah_status imaah_wilson_polarization(const imaah_modulation* m, int nk, double eps_gap, double* out) {
  return guard([&] {
    need(out, "out");
    aah::WilsonOptions o;
    o.nk = nk;
    o.eps_gap = eps_gap;
    *out = aah::wilson_polarization(modulation(m), o).polarization;
  });
}

imaah_status imaah_global_berry_phase(const imaah_modulation* m, int nk, double eps_gap, double* out) {
  return guard([&] {
    need(out, "out");
    aah::WilsonOptions o;
    o.nk = nk;
    o.eps_gap = eps_gap;
    *out = aah::global_berry_phase(modulation(m), o).total;
  });
}

imaah_status imaah_classify(const imaah_modulation* m, int nk, double eps_gap, imaah_classification* out) {
  return guard([&] {
    need(out, "out");
    aah::ClassifyOptions o;
    o.nk = nk;
    o.eps_gap = eps_gap;
    const auto c = aah::classify_point(modulation(m), o);
    *out = {static_cast<int>(c.label), c.has_invariants ? 1 : 0, c.polarization, c.global_phase, c.gap.min_abs_re};
  });
}

imaah_status imaah_laser_linear_threshold(const char* text, double* out) {
  return guard([&] {
    need(text, "json");
    need(out, "out");
    const auto cfg = aah::parse_json(text, "laser");
    aah::json resolved, extra;
    *out = aah::linear_threshold(aah::laser_gain_model(cfg, resolved, extra));
  });
}

imaah_status imaah_run_experiment(const char* kind, const char* config_json, const char* out_dir, int has_seed,
                                  uint64_t seed, int threads, char** summary) {
  return guard([&] {
    need(kind, "kind");
    need(config_json, "config");
    need(out_dir, "out_dir");
    if (summary) *summary = nullptr;
    if (threads < 0) aah::fail(aah::ErrorKind::Config, "threads must be non-negative");
    aah::RunOptions opt;
    if (has_seed) opt.seed = seed;
    opt.threads = threads;
    const auto cfg = aah::parse_json(config_json, "config");
    const auto result = aah::run_experiment(kind, cfg, out_dir, opt);
    if (summary) *summary = copy(result.dump(2));
  });
}

}  // extern "C"
