#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace aah {

struct PumpModulatedConfig {
  double gamma_pump = 0.0;
  Rational alpha;
  double delta = 0.0;
  double passive_loss = 0.0;
  int sites = 0;
};

struct LossModulatedConfig {
  double gamma_pump = 0.0;
  std::vector<double> loss_profile;  // gamma_n
  double offset = 0.0;               // gamma
};

// On-site rate V_n = gamma_pump * gain_n / (1 + |psi_n|^2) + bias_n.
struct GainModel {
  double gamma_pump = 0.0;
  std::vector<double> gain;
  std::vector<double> bias;
  int sites() const { return static_cast<int>(gain.size()); }
};

double pump_profile(Rational alpha, double delta, long long n);

GainModel gain_model(const PumpModulatedConfig& c);
GainModel gain_model(const LossModulatedConfig& c);

// Im E of the wall-anchored zero mode of the lattice; throws if there is none.
double wall_zero_mode_im(const Lattice& l, double eps_re = 1e-6);

// gamma_n from the lattice potential, offset = Im(E0) + margin.
LossModulatedConfig loss_modulated_from_lattice(const Lattice& l, double gamma_pump, double margin = 0.5);

void nonlinear_rhs(const GainModel& m, const CVec& psi, CVec& out);

// H(psi) with saturation evaluated at psi; the zero field gives the small-signal operator.
CMat linearized_hamiltonian(const GainModel& m, const CVec& psi);
CMat linearized_hamiltonian(const GainModel& m);

double max_gain(const GainModel& m);

struct SimConfig {
  double dt = 0.01;
  double t_end = 5000.0;
  int sample_stride = 10;
  std::uint64_t seed = 1;
  double init_scale = 0.01;
  double t1 = 2000.0;
  double t2 = 5000.0;
  double blowup = 1e6;

  void validate() const;
};

// Standard normal pair number `index` of stream `seed`: splitmix64 on seed + counter, then Box-Muller.
void normal_pair(std::uint64_t seed, std::uint64_t index, double& a, double& b);

CVec initial_field(int sites, std::uint64_t seed, double scale);

struct TimeTrace {
  int sites = 0;
  double dt = 0.0;
  int stride = 0;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::vector<double> times;
  std::vector<cplx> data;  // sample-major

  std::size_t samples() const { return times.size(); }
  cplx at(std::size_t s, int n) const { return data[s * sites + n]; }
  CVec sample(std::size_t s) const;
};

TimeTrace integrate(const GainModel& m, const SimConfig& sim, const std::string& fingerprint = "");

void write_trace(const TimeTrace& t, const std::string& path);
TimeTrace read_trace(const std::string& path);

double output_intensity(const TimeTrace& t, double t1, double t2);

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> power;  // peak normalized to 1
};

// Hann-tapered DFT of psi_site(t) on [t1, t2]; psi ~ exp(-i omega t) peaks at +omega.
Spectrum emission_spectrum(const TimeTrace& t, int site, double t1, double t2, double omega_max = 5.0);

// Sum of the per-site power spectra: the output of equal outcoupling from every site.
Spectrum output_spectrum(const TimeTrace& t, double t1, double t2, double omega_max = 5.0);

enum class ModeClass { BelowThreshold, SingleMode, MultiMode };

std::string mode_name(ModeClass c);

struct PeakRule {
  double relative_power = 0.1;
  double intensity_floor = 1e-6;
};

std::vector<int> spectral_peaks(const Spectrum& s, double relative_power);

ModeClass classify_lasing(double i_out, const Spectrum& s, const PeakRule& rule = {});

struct LasingReport {
  double gamma_pump = 0.0;
  std::uint64_t seed = 0;
  double i_out = 0.0;
  Spectrum spectrum;
  ModeClass mode = ModeClass::BelowThreshold;
  std::vector<double> profile;  // |psi_n|^2 at t_end
  int peak_site = -1;
  double peak_omega = 0.0;
  int peaks = 0;
};

LasingReport analyse(const TimeTrace& t, const SimConfig& sim, double gamma_pump, const PeakRule& rule = {});

LasingReport simulate(const GainModel& m, const SimConfig& sim, const PeakRule& rule = {});

// Smallest pump with max Im E = 0 for the small-signal operator, by bisection.
double linear_threshold(GainModel m, double lo = 0.0, double hi = 10.0, double tol = 1e-6);

}  // namespace aah
