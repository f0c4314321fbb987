#ifndef IMAAH_IMAAH_H
#define IMAAH_IMAAH_H

#include <stddef.h>
#include <stdint.h>

#if defined(IMAAH_BUILDING_LIBRARY)
#define IMAAH_API __attribute__((visibility("default")))
#else
#define IMAAH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  IMAAH_OK = 0,
  IMAAH_ERR_ARGUMENT = 1,
  IMAAH_ERR_NUMERICAL = 2,
  IMAAH_ERR_CONFIG = 3,
  IMAAH_ERR_IO = 4,
  IMAAH_ERR_INTERNAL = 5
} imaah_status;

typedef struct imaah_lattice imaah_lattice;
typedef struct imaah_eigensystem imaah_eigensystem;

/* Message of the last failed call on this thread; empty after a success. */
IMAAH_API const char* imaah_last_error(void);
IMAAH_API const char* imaah_version(void);
/* Frees strings returned through char** out-parameters. */
IMAAH_API void imaah_string_free(char* s);

typedef struct {
  double V;
  int q;
  int p;
  double delta;
} imaah_modulation;

IMAAH_API imaah_status imaah_lattice_single(const imaah_modulation* m, int sites, imaah_lattice** out);
/* {"domains": [{"V", "q", "p", "delta" | "delta_pi", "length"}, ...], "t", "indexing": "local" | "global"} */
IMAAH_API imaah_status imaah_lattice_from_json(const char* json, imaah_lattice** out);
IMAAH_API void imaah_lattice_free(imaah_lattice* l);
IMAAH_API int imaah_lattice_size(const imaah_lattice* l);

/* Row-major n x n, n = imaah_lattice_size. */
IMAAH_API imaah_status imaah_hamiltonian(const imaah_lattice* l, double* re, double* im);
IMAAH_API imaah_status imaah_ct_residual(const imaah_lattice* l, double* out);
/* Row-major p x p. */
IMAAH_API imaah_status imaah_bloch_hamiltonian(const imaah_modulation* m, double k, double* re, double* im);
IMAAH_API imaah_status imaah_bloch_ct_residual(const imaah_modulation* m, double k, double* out);

IMAAH_API imaah_status imaah_eigensystem_compute(const imaah_lattice* l, imaah_eigensystem** out);
IMAAH_API void imaah_eigensystem_free(imaah_eigensystem* es);
IMAAH_API int imaah_eigensystem_size(const imaah_eigensystem* es);
IMAAH_API imaah_status imaah_eigensystem_values(const imaah_eigensystem* es, double* re, double* im);
/* Normalized right eigenvector `index`. */
IMAAH_API imaah_status imaah_eigensystem_vector(const imaah_eigensystem* es, int index, double* re, double* im);
IMAAH_API imaah_status imaah_eigensystem_symmetry_residual(const imaah_eigensystem* es, double* out);
IMAAH_API imaah_status imaah_eigensystem_biorth_condition(const imaah_eigensystem* es, double* out);

typedef enum { IMAAH_ANCHOR_LEFT_EDGE = 0, IMAAH_ANCHOR_RIGHT_EDGE = 1, IMAAH_ANCHOR_WALL = 2 } imaah_anchor_kind;

typedef struct {
  int index;
  double re_energy;
  double im_energy;
  double ipr;
  double decay_length;
  double fit_residual;
  double ct_residual;
  double im_separation;
  int anchor_kind;
  int anchor_wall;
  int peak_site;
  int anchor_count;
  int is_protected;
} imaah_zero_mode;

typedef struct {
  double eps_re;
  int anchor_tol;
  int fit_samples;
  double fit_floor;
  int require_im_separation;
  double im_separation_factor;
} imaah_zero_mode_options;

IMAAH_API void imaah_zero_mode_options_default(imaah_zero_mode_options* opt);
/* Writes up to `capacity` reports; *count receives the total. opt may be NULL. */
IMAAH_API imaah_status imaah_find_zero_modes(const imaah_eigensystem* es, const imaah_lattice* l,
                                             const imaah_zero_mode_options* opt, imaah_zero_mode* out, int capacity,
                                             int* count);

/* k_samples 0 picks 8p. */
IMAAH_API imaah_status imaah_real_line_gap(const imaah_modulation* m, int k_samples, double eps_gap,
                                           double* min_abs_re, int* gapped);
IMAAH_API imaah_status imaah_wilson_polarization(const imaah_modulation* m, int nk, double eps_gap, double* out);
IMAAH_API imaah_status imaah_global_berry_phase(const imaah_modulation* m, int nk, double eps_gap, double* out);

typedef enum { IMAAH_NONTRIVIAL = 0, IMAAH_TRIVIAL = 1, IMAAH_GAPLESS = 2 } imaah_phase_label;

typedef struct {
  int label;
  int has_invariants;
  double polarization;
  double global_phase;
  double min_abs_re;
} imaah_classification;

IMAAH_API imaah_status imaah_classify(const imaah_modulation* m, int nk, double eps_gap, imaah_classification* out);

/* Laser config with "model" and its "pump" or "loss" block. */
IMAAH_API imaah_status imaah_laser_linear_threshold(const char* json, double* out);

/* kind: spectrum, phase-diagram, domain-wall, laser, trajectory. threads 0 uses every core.
   *summary (may be NULL) receives the result JSON; free it with imaah_string_free. */
IMAAH_API imaah_status imaah_run_experiment(const char* kind, const char* config_json, const char* out_dir,
                                            int has_seed, uint64_t seed, int threads, char** summary);

#ifdef __cplusplus
}
#endif

#endif
