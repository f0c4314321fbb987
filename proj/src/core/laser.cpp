#include "core/laser.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "core/spectral.hpp"

namespace aah {

double pump_profile(Rational alpha, double delta, long long n) {
  const long long p = alpha.p;
  long long r = (static_cast<long long>(alpha.q) * (n % p)) % p;
  if (r < 0) r += p;
  return 0.5 * (1.0 + std::sin(kTwoPi * static_cast<double>(r) / static_cast<double>(p) + delta));
}

GainModel gain_model(const PumpModulatedConfig& c) {
  if (c.sites < 2) fail(ErrorKind::InvalidArgument, "laser lattice needs at least 2 sites");
  const Rational a = Rational::make(c.alpha.q, c.alpha.p);
  GainModel m;
  m.gamma_pump = c.gamma_pump;
  for (int i = 0; i < c.sites; ++i) {
    m.gain.push_back(pump_profile(a, c.delta, i + kFirstSiteLabel));
    m.bias.push_back(-c.passive_loss);
  }
  return m;
}

GainModel gain_model(const LossModulatedConfig& c) {
  if (c.loss_profile.size() < 2) fail(ErrorKind::InvalidArgument, "laser lattice needs at least 2 sites");
  GainModel m;
  m.gamma_pump = c.gamma_pump;
  for (double g : c.loss_profile) {
    m.gain.push_back(1.0);
    m.bias.push_back(g - c.offset);
  }
  return m;
}

double wall_zero_mode_im(const Lattice& l, double eps_re) {
  const auto es = eigendecompose(build_open_hamiltonian(l));
  ZeroModeOptions opt;
  opt.eps_re = eps_re;
  const auto modes = find_zero_modes(es, l, opt);
  const ZeroModeReport* best = nullptr;
  for (const auto& z : modes)
    if (z.anchor.kind == AnchorKind::Wall && (!best || z.energy.imag() > best->energy.imag())) best = &z;
  if (!best) fail(ErrorKind::Numerical, "lattice has no wall-anchored zero mode to set the loss offset");
  return best->energy.imag();
}

LossModulatedConfig loss_modulated_from_lattice(const Lattice& l, double gamma_pump, double margin) {
  LossModulatedConfig c;
  c.gamma_pump = gamma_pump;
  c.loss_profile = onsite_profile(l);
  c.offset = wall_zero_mode_im(l) + margin;
  return c;
}

void nonlinear_rhs(const GainModel& m, const CVec& psi, CVec& out) {
  const int n = m.sites();
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a2 = std::norm(psi(i));
    const double v = m.gamma_pump * m.gain[i] / (1.0 + a2) + m.bias[i];
    cplx h = cplx(0.0, v) * psi(i);
    if (i > 0) h += psi(i - 1);
    if (i + 1 < n) h += psi(i + 1);
    // -i * h
    out(i) = cplx(h.imag(), -h.real());
  }
}

CMat linearized_hamiltonian(const GainModel& m, const CVec& psi) {
  const int n = m.sites();
  CMat H = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = cplx(0.0, m.gamma_pump * m.gain[i] / (1.0 + std::norm(psi(i))) + m.bias[i]);
    if (i + 1 < n) H(i, i + 1) = H(i + 1, i) = 1.0;
  }
  return H;
}

CMat linearized_hamiltonian(const GainModel& m) { return linearized_hamiltonian(m, CVec::Zero(m.sites())); }

double max_gain(const GainModel& m) {
  Eigen::ComplexEigenSolver<CMat> es(linearized_hamiltonian(m), false);
  if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigensolver failed in max_gain");
  return es.eigenvalues().imag().maxCoeff();
}

void SimConfig::validate() const {
  if (!(dt > 0)) fail(ErrorKind::InvalidArgument, "dt must be positive");
  if (sample_stride < 1) fail(ErrorKind::InvalidArgument, "sample_stride must be at least 1");
  if (!(t_end > 0)) fail(ErrorKind::InvalidArgument, "t_end must be positive");
  if (!(t1 >= 0 && t1 < t2 && t2 <= t_end + 1e-9))
    fail(ErrorKind::InvalidArgument, "averaging window must satisfy 0 <= t1 < t2 <= t_end");
  if (kPi / (dt * sample_stride) < 5.0)
    fail(ErrorKind::InvalidArgument, "dt * sample_stride too coarse to resolve |omega| up to 5");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in (0, 1].
double unit(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t x = splitmix64(seed + counter * 0x9E3779B97F4A7C15ULL);
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

void normal_pair(std::uint64_t seed, std::uint64_t index, double& a, double& b) {
  const double u1 = unit(seed, 2 * index);
  const double u2 = unit(seed, 2 * index + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  a = r * std::cos(kTwoPi * u2);
  b = r * std::sin(kTwoPi * u2);
}

CVec initial_field(int sites, std::uint64_t seed, double scale) {
  CVec psi(sites);
  for (int n = 0; n < sites; ++n) {
    double a, b;
    normal_pair(seed, static_cast<std::uint64_t>(n), a, b);
    psi(n) = cplx(a, b) * scale;
  }
  return psi;
}

CVec TimeTrace::sample(std::size_t s) const {
  CVec v(sites);
  for (int n = 0; n < sites; ++n) v(n) = at(s, n);
  return v;
}

TimeTrace integrate(const GainModel& m, const SimConfig& sim, const std::string& fingerprint) {
  sim.validate();
  const int n = m.sites();
  if (n < 2) fail(ErrorKind::InvalidArgument, "laser lattice needs at least 2 sites");
  TimeTrace tr;
  tr.sites = n;
  tr.dt = sim.dt;
  tr.stride = sim.sample_stride;
  tr.seed = sim.seed;
  tr.fingerprint = fingerprint;
  const long steps = std::lround(sim.t_end / sim.dt);
  const std::size_t nsamp = static_cast<std::size_t>(steps / sim.sample_stride) + 1;
  tr.times.reserve(nsamp);
  tr.data.reserve(nsamp * n);

  CVec psi = initial_field(n, sim.seed, sim.init_scale);
  CVec k1(n), k2(n), k3(n), k4(n), tmp(n);
  const double h = sim.dt;
  for (long s = 0;; ++s) {
    if (s % sim.sample_stride == 0) {
      for (int i = 0; i < n; ++i) {
        const cplx v = psi(i);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > sim.blowup) {
          std::ostringstream os;
          os << "field blow-up at t=" << s * h << " (site " << i << ")";
          fail(ErrorKind::Numerical, os.str());
        }
        tr.data.push_back(v);
      }
      tr.times.push_back(s * h);
    }
    if (s == steps) break;
    nonlinear_rhs(m, psi, k1);
    tmp = psi + 0.5 * h * k1;
    nonlinear_rhs(m, tmp, k2);
    tmp = psi + 0.5 * h * k2;
    nonlinear_rhs(m, tmp, k3);
    tmp = psi + h * k3;
    nonlinear_rhs(m, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

namespace {

constexpr char kTraceMagic[8] = {'I', 'M', 'A', 'A', 'H', 'T', 'R', '1'};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(ErrorKind::Io, "truncated trace file");
  return v;
}

}  // namespace

void write_trace(const TimeTrace& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  os.write(kTraceMagic, sizeof(kTraceMagic));
  put<std::int32_t>(os, t.sites);
  put<std::uint64_t>(os, t.samples());
  put<double>(os, t.dt);
  put<std::int32_t>(os, t.stride);
  put<std::uint64_t>(os, t.seed);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.fingerprint.size()));
  os.write(t.fingerprint.data(), static_cast<std::streamsize>(t.fingerprint.size()));
  for (const cplx& v : t.data) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) fail(ErrorKind::Io, "write failed for " + path);
}

TimeTrace read_trace(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0) fail(ErrorKind::Io, path + " is not a trace file");
  TimeTrace t;
  t.sites = get<std::int32_t>(is);
  const auto samples = get<std::uint64_t>(is);
  t.dt = get<double>(is);
  t.stride = get<std::int32_t>(is);
  t.seed = get<std::uint64_t>(is);
  const auto len = get<std::uint32_t>(is);
  t.fingerprint.resize(len);
  is.read(t.fingerprint.data(), len);
  t.data.resize(samples * static_cast<std::uint64_t>(t.sites));
  for (auto& v : t.data) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    v = cplx(re, im);
  }
  for (std::uint64_t s = 0; s < samples; ++s) t.times.push_back(static_cast<double>(s) * t.stride * t.dt);
  return t;
}

namespace {

std::pair<std::size_t, std::size_t> window(const TimeTrace& t, double t1, double t2) {
  if (t.samples() == 0 || t.times.front() > t1 + 1e-9 || t.times.back() < t2 - 1e-9)
    fail(ErrorKind::InvalidArgument, "trace does not cover the averaging window");
  const double eps = 1e-9 * std::max(1.0, t2);
  std::size_t a = 0;
  while (a < t.samples() && t.times[a] < t1 - eps) ++a;
  std::size_t b = a;
  while (b < t.samples() && t.times[b] <= t2 + eps) ++b;
  if (b - a < 2) fail(ErrorKind::InvalidArgument, "averaging window holds fewer than 2 samples");
  return {a, b};
}

std::mutex fftw_planner_mutex;

// Power |sum_j w_j x_j e^{+i omega t_j}|^2 per site, accumulated into acc (unnormalized).
void accumulate_power(const TimeTrace& t, int site, std::size_t a, std::size_t b, std::vector<double>& acc) {
  const int m = static_cast<int>(b - a);
  fftw_complex* in = fftw_alloc_complex(m);
  fftw_complex* out = fftw_alloc_complex(m);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan = fftw_plan_dft_1d(m, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (int j = 0; j < m; ++j) {
    const double w = 0.5 - 0.5 * std::cos(kTwoPi * j / (m - 1));
    const cplx v = t.at(a + j, site) * w;
    in[j][0] = v.real();
    in[j][1] = v.imag();
  }
  fftw_execute(plan);
  acc.resize(m, 0.0);
  for (int j = 0; j < m; ++j) acc[j] += out[j][0] * out[j][0] + out[j][1] * out[j][1];
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
}

Spectrum finish_spectrum(const std::vector<double>& acc, double step, double omega_max) {
  const int m = static_cast<int>(acc.size());
  Spectrum s;
  for (int j = -(m / 2); j <= (m - 1) / 2; ++j) {
    const double om = kTwoPi * j / (m * step);
    if (std::abs(om) > omega_max) continue;
    s.omega.push_back(om);
    s.power.push_back(acc[(j + m) % m]);
  }
  const double mx = s.power.empty() ? 0.0 : *std::max_element(s.power.begin(), s.power.end());
  if (mx > 0)
    for (double& p : s.power) p /= mx;
  return s;
}

}  // namespace

double output_intensity(const TimeTrace& t, double t1, double t2) {
  const auto [a, b] = window(t, t1, t2);
  double acc = 0.0;
  for (std::size_t s = a; s < b; ++s)
    for (int n = 0; n < t.sites; ++n) acc += std::norm(t.at(s, n));
  return acc / (static_cast<double>(b - a) * t.sites);
}

Spectrum emission_spectrum(const TimeTrace& t, int site, double t1, double t2, double omega_max) {
  if (site < 0 || site >= t.sites) fail(ErrorKind::InvalidArgument, "spectrum site outside the lattice");
  const auto [a, b] = window(t, t1, t2);
  std::vector<double> acc;
  accumulate_power(t, site, a, b, acc);
  return finish_spectrum(acc, t.dt * t.stride, omega_max);
}

Spectrum output_spectrum(const TimeTrace& t, double t1, double t2, double omega_max) {
  const auto [a, b] = window(t, t1, t2);
  std::vector<double> acc;
  for (int n = 0; n < t.sites; ++n) accumulate_power(t, n, a, b, acc);
  return finish_spectrum(acc, t.dt * t.stride, omega_max);
}

std::string mode_name(ModeClass c) {
  switch (c) {
    case ModeClass::BelowThreshold:
      return "BelowThreshold";
    case ModeClass::SingleMode:
      return "SingleMode";
    case ModeClass::MultiMode:
      return "MultiMode";
  }
  return "?";
}

std::vector<int> spectral_peaks(const Spectrum& s, double relative_power) {
  std::vector<int> peaks;
  const int n = static_cast<int>(s.power.size());
  for (int i = 0; i < n; ++i) {
    const double p = s.power[i];
    if (p < relative_power) continue;
    const bool left = i == 0 || p > s.power[i - 1];
    const bool right = i + 1 == n || p >= s.power[i + 1];
    if (left && right) peaks.push_back(i);
  }
  return peaks;
}

ModeClass classify_lasing(double i_out, const Spectrum& s, const PeakRule& rule) {
  if (i_out < rule.intensity_floor) return ModeClass::BelowThreshold;
  return spectral_peaks(s, rule.relative_power).size() == 1 ? ModeClass::SingleMode : ModeClass::MultiMode;
}

LasingReport analyse(const TimeTrace& t, const SimConfig& sim, double gamma_pump, const PeakRule& rule) {
  LasingReport r;
  r.gamma_pump = gamma_pump;
  r.seed = t.seed;
  r.i_out = output_intensity(t, sim.t1, sim.t2);
  r.spectrum = output_spectrum(t, sim.t1, sim.t2);
  r.peaks = static_cast<int>(spectral_peaks(r.spectrum, rule.relative_power).size());
  r.mode = classify_lasing(r.i_out, r.spectrum, rule);
  const std::size_t last = t.samples() - 1;
  r.profile.resize(t.sites);
  for (int n = 0; n < t.sites; ++n) r.profile[n] = std::norm(t.at(last, n));
  // No emission: peak position and frequency are undefined.
  if (r.mode == ModeClass::BelowThreshold) {
    r.peak_omega = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.peak_site = static_cast<int>(std::max_element(r.profile.begin(), r.profile.end()) - r.profile.begin());
  if (!r.spectrum.power.empty()) {
    const auto it = std::max_element(r.spectrum.power.begin(), r.spectrum.power.end());
    r.peak_omega = r.spectrum.omega[it - r.spectrum.power.begin()];
  }
  return r;
}

LasingReport simulate(const GainModel& m, const SimConfig& sim, const PeakRule& rule) {
  return analyse(integrate(m, sim), sim, m.gamma_pump, rule);
}

double linear_threshold(GainModel m, double lo, double hi, double tol) {
  auto f = [&](double g) {
    m.gamma_pump = g;
    return max_gain(m);
  };
  if (f(lo) >= 0) fail(ErrorKind::Numerical, "small-signal gain is non-negative at the lower bracket: always lasing");
  int expand = 0;
  while (f(hi) < 0) {
    if (++expand > 10) fail(ErrorKind::Numerical, "no sign change in threshold bracket: never lases");
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 0.1 * tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace aah
