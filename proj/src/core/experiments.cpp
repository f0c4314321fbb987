#include "core/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <set>

#include "core/laser.hpp"
#include "core/output.hpp"
#include "core/parallel.hpp"

namespace aah {

namespace fs = std::filesystem;

namespace {

void check_kind(const json& cfg, const std::string& kind) {
  if (cfg.contains("kind") && cfg.at("kind") != kind)
    fail(ErrorKind::Config, "config kind '" + cfg.at("kind").dump() + "' does not match subcommand '" + kind + "'");
}

std::vector<double> number_list(const json& cfg, const char* key, const std::string& where) {
  std::vector<double> v;
  if (!cfg.contains(key)) return v;
  if (!cfg.at(key).is_array()) fail(ErrorKind::Config, where + ": '" + key + "' must be an array");
  for (const auto& x : cfg.at(key)) {
    if (!x.is_number()) fail(ErrorKind::Config, where + ": '" + key + "' must hold numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

double tidy(double x) { return std::round(x * 1e9) / 1e9; }

std::string tag(double x) {
  std::string s = fmt(tidy(x));
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

void write_wavefunction(const fs::path& path, const json& cfg, const CVec& psi) {
  Csv csv(path, cfg, {"site", "re_psi", "im_psi", "abs_psi"});
  const CVec v = psi.normalized();
  for (int n = 0; n < v.size(); ++n) csv.row(n, v(n).real(), v(n).imag(), std::abs(v(n)));
}

void write_profile_svg(const fs::path& path, const json& cfg, const CVec& psi, const std::string& title,
                       const std::vector<int>& walls) {
  Series s;
  s.color = "#2ca02c";
  s.radius = 2.0;
  const CVec v = psi.normalized();
  for (int n = 0; n < v.size(); ++n) {
    s.x.push_back(n);
    s.y.push_back(std::max(std::abs(v(n)), 1e-16));
  }
  std::vector<Series> all{s};
  for (int w : walls) {
    Series line;
    line.line = true;
    line.color = "#888888";
    line.x = {w - 0.5, w - 0.5};
    line.y = {1e-16, 1.0};
    all.push_back(line);
  }
  PlotSpec spec;
  spec.title = title;
  spec.xlabel = "site n";
  spec.ylabel = "log10 |psi_n|";
  spec.logy = true;
  write_svg_plot(path, cfg, spec, all);
}

json mode_json(const ZeroModeReport& z) {
  return json{{"index", z.index},
              {"re_E", z.energy.real()},
              {"im_E", z.energy.imag()},
              {"anchor", anchor_name(z.anchor)},
              {"peak_site", z.peak_site},
              {"ipr", z.ipr},
              {"decay_length", std::isfinite(z.decay_length) ? json(z.decay_length) : json(nullptr)},
              {"fit_residual", z.fit_residual},
              {"anchor_count", z.anchor_count},
              {"protected", z.is_protected},
              {"ct_residual", z.ct_residual}};
}

std::vector<std::string> mode_columns(const std::string& lead) {
  return {lead,           "index",        "re_E",         "im_E",      "anchor",      "peak_site", "ipr",
          "decay_length", "fit_residual", "anchor_count", "protected", "ct_residual", "im_separation"};
}

void mode_row(Csv& csv, double lead, const ZeroModeReport& z) {
  csv.row(lead, z.index, z.energy.real(), z.energy.imag(), anchor_name(z.anchor), z.peak_site, z.ipr, z.decay_length,
          z.fit_residual, z.anchor_count, z.is_protected, z.ct_residual, z.im_separation);
}

void write_sidecar(const fs::path& out, const std::string& kind, double seconds) {
  std::ofstream os(out / "run.log", std::ios::app);
  const std::time_t now = std::time(nullptr);
  os << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << ' ' << kind << ' ' << version_string() << " wall "
     << std::fixed << std::setprecision(3) << seconds << "s\n";
}

}  // namespace

json run_spectrum(const json& cfg_in, const fs::path& out, const RunOptions& opt) {
  const std::string where = "spectrum";
  check_kind(cfg_in, "spectrum");
  require_keys(cfg_in, {"kind", "V", "q", "p", "N", "n_delta", "eps_re", "profiles_delta_pi"}, where);
  const double V = get_number(cfg_in, "V", where);
  const int q = get_int(cfg_in, "q", where), p = get_int(cfg_in, "p", where);
  const int N = get_int(cfg_in, "N", where);
  const int nd = get_int(cfg_in, "n_delta", where, 200);
  const double eps = get_number(cfg_in, "eps_re", where, 1e-6);
  const auto profiles = number_list(cfg_in, "profiles_delta_pi", where);
  if (N < 2 || N % 2 != 0) fail(ErrorKind::Config, where + ": 'N' must be even and at least 2");
  if (nd < 1) fail(ErrorKind::Config, where + ": 'n_delta' must be positive");
  if (!(eps > 0)) fail(ErrorKind::Config, where + ": 'eps_re' must be positive");
  Modulation m;
  try {
    m = Modulation::make(V, Rational::make(q, p), 0.0);
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ": " + e.what());
  }
  json cfg{{"kind", "spectrum"}, {"V", V},         {"q", q}, {"p", p}, {"N", N}, {"n_delta", nd},
           {"eps_re", eps},      {"profiles_delta_pi", profiles}};

  std::vector<double> deltas;
  for (int j = 0; j < nd; ++j) deltas.push_back(kTwoPi * j / nd);
  ZeroModeOptions zopt;
  zopt.eps_re = eps;
  const auto rows = delta_sweep(m, N, deltas, zopt, opt.threads);

  ensure_dir(out);
  Csv spec(out / "spectrum.csv", cfg, {"delta", "index", "re_E", "im_E", "is_zero_mode"});
  Csv modes(out / "zero_modes.csv", cfg, mode_columns("delta"));
  Series bulk_re, bulk_im, zero_re, zero_im;
  bulk_re.color = bulk_im.color = "#9a9a9a";
  bulk_re.radius = bulk_im.radius = 0.8;
  zero_re.color = zero_im.color = "#d62728";
  zero_re.radius = zero_im.radius = 2.0;
  zero_re.label = zero_im.label = "protected zero modes";
  json windows = json::array();
  for (const auto& r : rows) {
    bool any = false;
    for (int i = 0; i < r.values.size(); ++i) {
      spec.row(r.delta, i, r.values(i).real(), r.values(i).imag(), static_cast<bool>(r.zero[i]));
      Series& sr = r.zero[i] ? zero_re : bulk_re;
      Series& si = r.zero[i] ? zero_im : bulk_im;
      sr.x.push_back(r.delta / kPi);
      sr.y.push_back(r.values(i).real());
      si.x.push_back(r.delta / kPi);
      si.y.push_back(r.values(i).imag());
    }
    for (const auto& z : r.modes) {
      mode_row(modes, r.delta, z);
      any = any || z.is_protected;
    }
    if (any) windows.push_back(r.delta);
  }
  PlotSpec ps;
  ps.title = "Re E vs delta";
  ps.xlabel = "delta / pi";
  ps.ylabel = "Re E";
  write_svg_plot(out / "spectrum_re.svg", cfg, ps, {bulk_re, zero_re});
  ps.title = "Im E vs delta";
  ps.ylabel = "Im E";
  write_svg_plot(out / "spectrum_im.svg", cfg, ps, {bulk_im, zero_im});

  json files = json::array();
  for (double dp : profiles) {
    const Lattice l = Lattice::single(Modulation::make(V, m.alpha, kPi * dp), N);
    const auto es = eigendecompose(build_open_hamiltonian(l));
    for (const auto& z : find_zero_modes(es, l, zopt)) {
      const std::string stem = "wavefunction_d" + tag(dp) + "pi_m" + std::to_string(z.index);
      write_wavefunction(out / (stem + ".csv"), cfg, es.right.col(z.index));
      write_profile_svg(out / (stem + ".svg"), cfg, es.right.col(z.index),
                        "zero mode at delta = " + fmt(tidy(dp)) + " pi, anchor " + anchor_name(z.anchor), {});
      files.push_back(stem);
    }
  }
  return json{{"deltas_with_protected_zero_modes", windows}, {"wavefunctions", files}};
}

json run_domain_wall(const json& cfg_in, const fs::path& out, const RunOptions&) {
  const std::string where = "domain-wall";
  check_kind(cfg_in, "domain-wall");
  require_keys(cfg_in, {"kind", "lattice", "eps_re"}, where);
  if (!cfg_in.contains("lattice")) fail(ErrorKind::Config, where + ": missing key 'lattice'");
  const Lattice l = lattice_from_json(cfg_in.at("lattice"));
  if (l.domains.size() < 2) fail(ErrorKind::Config, where + ": needs two or more domains");
  if (l.size() % 2 != 0) fail(ErrorKind::Config, where + ": total site count must be even");
  const double eps = get_number(cfg_in, "eps_re", where, 1e-6);
  const json cfg{{"kind", "domain-wall"}, {"lattice", lattice_to_json(l)}, {"eps_re", eps}};

  const auto es = eigendecompose(build_open_hamiltonian(l));
  ZeroModeOptions zopt;
  zopt.eps_re = eps;
  const auto modes = find_zero_modes(es, l, zopt);
  std::vector<bool> zero(es.values.size(), false);
  for (const auto& z : modes) zero[z.index] = true;

  ensure_dir(out);
  {
    Csv pot(out / "potential.csv", cfg, {"site", "V_n"});
    const auto v = onsite_profile(l);
    for (std::size_t n = 0; n < v.size(); ++n) pot.row(static_cast<int>(n), v[n]);
  }
  Csv spec(out / "spectrum.csv", cfg, {"index", "re_E", "im_E", "is_zero_mode"});
  Series bulk, zm;
  bulk.color = "#9a9a9a";
  bulk.radius = 2.5;
  zm.color = "#2ca02c";
  zm.radius = 4.0;
  zm.label = "zero modes";
  double max_im = -1e300;
  for (int i = 0; i < es.values.size(); ++i) {
    spec.row(i, es.values(i).real(), es.values(i).imag(), static_cast<bool>(zero[i]));
    Series& s = zero[i] ? zm : bulk;
    s.x.push_back(es.values(i).real());
    s.y.push_back(es.values(i).imag());
    max_im = std::max(max_im, es.values(i).imag());
  }
  PlotSpec ps;
  ps.title = "complex spectrum";
  ps.xlabel = "Re E";
  ps.ylabel = "Im E";
  write_svg_plot(out / "spectrum.svg", cfg, ps, {bulk, zm});

  Csv mcsv(out / "zero_modes.csv", cfg, mode_columns("lattice"));
  json jm = json::array();
  int wall_modes = 0;
  bool wall_max = false;
  for (const auto& z : modes) {
    mode_row(mcsv, 0.0, z);
    jm.push_back(mode_json(z));
    const std::string stem = "wavefunction_m" + std::to_string(z.index);
    write_wavefunction(out / (stem + ".csv"), cfg, es.right.col(z.index));
    write_profile_svg(out / (stem + ".svg"), cfg, es.right.col(z.index), "zero mode, anchor " + anchor_name(z.anchor),
                      l.walls());
    if (z.anchor.kind == AnchorKind::Wall) {
      ++wall_modes;
      wall_max = wall_max || z.energy.imag() >= max_im - 1e-12;
    }
  }
  json labels = json::array();
  for (const auto& d : l.domains) {
    std::string label;
    try {
      label = label_name(classify_point(d.mod).label);
    } catch (const Error& e) {
      label = std::string("error: ") + e.what();
    }
    labels.push_back(label);
  }
  return json{{"wall_zero_mode", wall_modes > 0},
              {"wall_zero_mode_count", wall_modes},
              {"wall_mode_has_max_im", wall_max},
              {"domain_labels", labels},
              {"zero_modes", jm}};
}

json run_phase_diagram(const json& cfg_in, const fs::path& out, const RunOptions& opt) {
  const std::string where = "phase-diagram";
  check_kind(cfg_in, "phase-diagram");
  require_keys(cfg_in, {"kind", "alphas", "v_max", "nv", "ndelta", "nk", "eps_gap", "k_samples", "v_ring"}, where);
  if (!cfg_in.contains("alphas") || !cfg_in.at("alphas").is_array() || cfg_in.at("alphas").empty())
    fail(ErrorKind::Config, where + ": 'alphas' must be a non-empty array of [q, p] pairs");
  std::vector<Rational> alphas;
  for (const auto& a : cfg_in.at("alphas")) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer() || !a[1].is_number_integer())
      fail(ErrorKind::Config, where + ": each alpha must be [q, p]");
    try {
      alphas.push_back(Rational::make(a[0].get<int>(), a[1].get<int>()));
    } catch (const Error& e) {
      fail(ErrorKind::Config, where + ": " + e.what());
    }
  }
  const double v_max = get_number(cfg_in, "v_max", where, 2.0);
  const int nv = get_int(cfg_in, "nv", where, 40), nd = get_int(cfg_in, "ndelta", where, 40);
  ClassifyOptions co;
  co.nk = get_int(cfg_in, "nk", where, co.nk);
  co.eps_gap = get_number(cfg_in, "eps_gap", where, co.eps_gap);
  co.k_samples = get_int(cfg_in, "k_samples", where, co.k_samples);
  if (nv < 8 || nd < 8) fail(ErrorKind::Config, where + ": 'nv' and 'ndelta' must be at least 8");
  if (!(v_max > 0)) fail(ErrorKind::Config, where + ": 'v_max' must be positive");
  if (co.nk < 64) fail(ErrorKind::Config, where + ": 'nk' must be at least 64");
  json jal = json::array();
  for (const auto& a : alphas) jal.push_back({a.q, a.p});
  json cfg{{"kind", "phase-diagram"}, {"alphas", jal}, {"v_max", v_max}, {"nv", nv}, {"ndelta", nd},
           {"nk", co.nk},             {"eps_gap", co.eps_gap},           {"k_samples", co.k_samples}};
  std::optional<double> ring;
  if (cfg_in.contains("v_ring")) {
    ring = get_number(cfg_in, "v_ring", where);
    cfg["v_ring"] = *ring;
  }

  ensure_dir(out);
  json per = json::array();
  for (const auto& a : alphas) {
    const auto d = phase_diagram(a, v_max, nv, nd, co, opt.threads);
    const std::string stem = "phase_" + std::to_string(a.q) + "_" + std::to_string(a.p);
    Csv csv(out / (stem + ".csv"), cfg, {"v", "delta", "label", "polarization", "global_phase", "min_abs_re"});
    int counts[3] = {0, 0, 0}, diagnostics = 0;
    for (int iv = 0; iv < nv; ++iv)
      for (int id = 0; id < nd; ++id) {
        const auto& c = d.at(iv, id);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        csv.row(d.v_grid[iv], d.delta_grid[id], label_name(c.label), c.has_invariants ? c.polarization : nan,
                c.has_invariants ? c.global_phase : nan, c.gap.min_abs_re);
        ++counts[static_cast<int>(c.label)];
        diagnostics += c.diagnostic.empty() ? 0 : 1;
      }
    write_polar_diagram(out / (stem + ".svg"), cfg, d);
    json entry{{"alpha", {a.q, a.p}},
               {"nontrivial", counts[0]},
               {"trivial", counts[1]},
               {"gapless", counts[2]},
               {"cells_with_diagnostic", diagnostics}};
    if (ring) {
      const auto s = spoke_census(d, *ring);
      entry["spokes"] = {{"v_ring", s.v_ring}, {"count", s.count}, {"alternating", s.alternating}};
    }
    per.push_back(entry);
  }
  return json{{"diagrams", per}};
}

std::vector<TrajectoryPoint> trajectory_sweep(Rational alpha, int sites, double v_sin, double x_min, double x_max,
                                              int points, const ZeroModeOptions& zopt, int threads) {
  if (points < 2) fail(ErrorKind::InvalidArgument, "trajectory needs at least 2 points");
  std::vector<TrajectoryPoint> pts(points);
  parallel_for(points, threads, [&](int i) {
    TrajectoryPoint& t = pts[i];
    t.x = tidy(x_min + (x_max - x_min) * i / (points - 1));
    t.mod = Modulation::make(std::hypot(v_sin, t.x), alpha, std::atan2(v_sin, t.x));
    try {
      t.cls = classify_point(t.mod);
    } catch (const Error& e) {
      t.cls.gap = real_line_gap(t.mod);
      t.cls.diagnostic = e.what();
    }
    const Lattice l = Lattice::single(t.mod, sites);
    const auto es = eigendecompose(build_open_hamiltonian(l));
    ZeroModeOptions o = zopt;
    o.require_im_separation = !t.cls.gap.gapped;
    t.values = es.values;
    t.modes = find_zero_modes(es, l, o);
  });
  return pts;
}

json run_trajectory(const json& cfg_in, const fs::path& out, const RunOptions& opt) {
  const std::string where = "trajectory";
  check_kind(cfg_in, "trajectory");
  require_keys(cfg_in, {"kind", "q", "p", "N", "v_sin", "x_min", "x_max", "points", "eps_re"}, where);
  const int q = get_int(cfg_in, "q", where), p = get_int(cfg_in, "p", where);
  const int N = get_int(cfg_in, "N", where, 200);
  const double v_sin = get_number(cfg_in, "v_sin", where, 2.0);
  const double x_min = get_number(cfg_in, "x_min", where, -1.5), x_max = get_number(cfg_in, "x_max", where, 1.5);
  const int points = get_int(cfg_in, "points", where, 61);
  const double eps = get_number(cfg_in, "eps_re", where, 1e-6);
  if (N < 2 || N % 2 != 0) fail(ErrorKind::Config, where + ": 'N' must be even and at least 2");
  if (points < 2) fail(ErrorKind::Config, where + ": 'points' must be at least 2");
  Rational a;
  try {
    a = Rational::make(q, p);
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ": " + e.what());
  }
  const json cfg{{"kind", "trajectory"}, {"q", q},         {"p", p},           {"N", N},   {"v_sin", v_sin},
                 {"x_min", x_min},       {"x_max", x_max}, {"points", points}, {"eps_re", eps}};
  ZeroModeOptions zopt;
  zopt.eps_re = eps;
  const auto pts = trajectory_sweep(a, N, v_sin, x_min, x_max, points, zopt, opt.threads);

  ensure_dir(out);
  Csv spec(out / "trajectory.csv", cfg,
           {"x", "V", "delta", "label", "min_abs_re", "index", "re_E", "im_E", "is_zero_mode"});
  Csv modes(out / "zero_modes.csv", cfg, mode_columns("x"));
  Series bre, bim, zre, zim;
  bre.color = bim.color = "#9a9a9a";
  bre.radius = bim.radius = 0.8;
  zre.color = zim.color = "#d62728";
  zre.radius = zim.radius = 2.2;
  zre.label = zim.label = "zero modes";
  json summary = json::array();
  for (const auto& t : pts) {
    std::vector<bool> zero(t.values.size(), false);
    double min_ipr = 1.0;
    for (const auto& z : t.modes) {
      zero[z.index] = true;
      mode_row(modes, t.x, z);
      min_ipr = std::min(min_ipr, z.ipr);
    }
    for (int i = 0; i < t.values.size(); ++i) {
      spec.row(t.x, t.mod.V, t.mod.delta, label_name(t.cls.label), t.cls.gap.min_abs_re, i, t.values(i).real(),
               t.values(i).imag(), static_cast<bool>(zero[i]));
      Series& sr = zero[i] ? zre : bre;
      Series& si = zero[i] ? zim : bim;
      sr.x.push_back(t.x);
      sr.y.push_back(t.values(i).real());
      si.x.push_back(t.x);
      si.y.push_back(t.values(i).imag());
    }
    summary.push_back({{"x", t.x},
                       {"label", label_name(t.cls.label)},
                       {"zero_modes", t.modes.size()},
                       {"min_ipr", t.modes.empty() ? json(nullptr) : json(min_ipr)}});
  }
  PlotSpec ps;
  ps.title = "Re E along V sin(delta) = " + fmt(v_sin);
  ps.xlabel = "V cos(delta)";
  ps.ylabel = "Re E";
  write_svg_plot(out / "trajectory_re.svg", cfg, ps, {bre, zre});
  ps.title = "Im E along V sin(delta) = " + fmt(v_sin);
  ps.ylabel = "Im E";
  write_svg_plot(out / "trajectory_im.svg", cfg, ps, {bim, zim});
  return json{{"points", summary}};
}

GainModel laser_gain_model(const json& cfg, json& resolved, json& extra) {
  const std::string where = "laser";
  if (!cfg.contains("model") || !cfg.at("model").is_string())
    fail(ErrorKind::Config, where + ": 'model' must be \"pump\" or \"loss\"");
  const std::string model = cfg.at("model").get<std::string>();
  resolved["model"] = model;
  GainModel base;
  if (model == "pump") {
    if (!cfg.contains("pump")) fail(ErrorKind::Config, where + ": missing key 'pump'");
    const json& j = cfg.at("pump");
    const std::string w = where + ".pump";
    require_keys(j, {"q", "p", "delta", "delta_pi", "loss", "sites"}, w);
    PumpModulatedConfig pc;
    try {
      pc.alpha = Rational::make(get_int(j, "q", w), get_int(j, "p", w));
    } catch (const Error& e) {
      fail(ErrorKind::Config, w + ": " + e.what());
    }
    pc.delta = get_phase(j, w);
    pc.passive_loss = get_number(j, "loss", w);
    pc.sites = get_int(j, "sites", w);
    if (pc.sites < 2) fail(ErrorKind::Config, w + ": 'sites' must be at least 2");
    resolved["pump"] = {{"q", pc.alpha.q}, {"p", pc.alpha.p}, {"delta", pc.delta}, {"loss", pc.passive_loss},
                   {"sites", pc.sites}};
    base = gain_model(pc);
  } else if (model == "loss") {
    if (!cfg.contains("loss")) fail(ErrorKind::Config, where + ": missing key 'loss'");
    const json& j = cfg.at("loss");
    const std::string w = where + ".loss";
    require_keys(j, {"lattice", "margin"}, w);
    if (!j.contains("lattice")) fail(ErrorKind::Config, w + ": missing key 'lattice'");
    const Lattice l = lattice_from_json(j.at("lattice"));
    const double margin = get_number(j, "margin", w, 0.5);
    const auto lc = loss_modulated_from_lattice(l, 0.0, margin);
    resolved["loss"] = {{"lattice", lattice_to_json(l)}, {"margin", margin}};
    extra["offset"] = lc.offset;
    extra["wall_zero_mode_im"] = lc.offset - margin;
    base = gain_model(lc);
  } else {
    fail(ErrorKind::Config, where + ": 'model' must be \"pump\" or \"loss\"");
  }

  return base;
}

json run_laser(const json& cfg_in, const fs::path& out, const RunOptions& opt) {
  const std::string where = "laser";
  check_kind(cfg_in, "laser");
  require_keys(cfg_in,
               {"kind", "model", "pump", "loss", "gamma", "gamma_values", "spectra_at", "seeds", "seed", "sim",
                "peak_rule", "save_traces"},
               where);
  json cfg{{"kind", "laser"}};
  json extra;
  const GainModel base = laser_gain_model(cfg_in, cfg, extra);

  std::vector<double> gammas = number_list(cfg_in, "gamma_values", where);
  if (cfg_in.contains("gamma")) {
    const json& g = cfg_in.at("gamma");
    require_keys(g, {"start", "stop", "step"}, where + ".gamma");
    const double a = get_number(g, "start", where), b = get_number(g, "stop", where), s = get_number(g, "step", where);
    if (!(s > 0) || b < a) fail(ErrorKind::Config, where + ".gamma: need step > 0 and stop >= start");
    for (int i = 0; a + i * s <= b + 1e-9; ++i) gammas.push_back(tidy(a + i * s));
  }
  const auto spectra_at = number_list(cfg_in, "spectra_at", where);
  for (double g : spectra_at) gammas.push_back(tidy(g));
  std::sort(gammas.begin(), gammas.end());
  gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());
  if (gammas.empty()) fail(ErrorKind::Config, where + ": no pump values given");

  std::vector<std::uint64_t> seeds;
  if (cfg_in.contains("seeds")) {
    if (!cfg_in.at("seeds").is_array()) fail(ErrorKind::Config, where + ": 'seeds' must be an array");
    for (const auto& s : cfg_in.at("seeds")) {
      if (!s.is_number_unsigned()) fail(ErrorKind::Config, where + ": seeds must be non-negative integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (cfg_in.contains("seed")) {
    if (!cfg_in.at("seed").is_number_unsigned()) fail(ErrorKind::Config, where + ": 'seed' must be a non-negative integer");
    seeds.push_back(cfg_in.at("seed").get<std::uint64_t>());
  }
  if (opt.seed) seeds = {*opt.seed};
  if (seeds.empty()) seeds = {1};

  const SimConfig sim = sim_from_json(cfg_in.value("sim", json::object()), where + ".sim");
  PeakRule rule;
  if (cfg_in.contains("peak_rule")) {
    const json& pr = cfg_in.at("peak_rule");
    require_keys(pr, {"relative_power", "intensity_floor"}, where + ".peak_rule");
    rule.relative_power = get_number(pr, "relative_power", where, rule.relative_power);
    rule.intensity_floor = get_number(pr, "intensity_floor", where, rule.intensity_floor);
  }
  bool save = false;
  if (cfg_in.contains("save_traces")) {
    if (!cfg_in.at("save_traces").is_boolean()) fail(ErrorKind::Config, where + ": 'save_traces' must be a boolean");
    save = cfg_in.at("save_traces").get<bool>();
  }
  cfg["gamma_values"] = gammas;
  cfg["spectra_at"] = spectra_at;
  cfg["seeds"] = seeds;
  cfg["sim"] = sim_to_json(sim);
  cfg["peak_rule"] = {{"relative_power", rule.relative_power}, {"intensity_floor", rule.intensity_floor}};
  cfg["save_traces"] = save;
  cfg["i_out_normalization"] = "i_out: per-site mean, i_out_total: summed over sites";
  cfg["spectrum_estimator"] = "Hann-tapered DFT, per-site power summed over sites";

  ensure_dir(out);
  const int jobs = static_cast<int>(gammas.size() * seeds.size());
  std::vector<LasingReport> reports(jobs);
  std::vector<std::string> errors(jobs);
  const std::string fp = std::to_string(std::hash<std::string>{}(cfg.dump()));
  parallel_for(jobs, opt.threads, [&](int k) {
    GainModel gm = base;
    gm.gamma_pump = gammas[k / seeds.size()];
    SimConfig s = sim;
    s.seed = seeds[k % seeds.size()];
    try {
      const auto trace = integrate(gm, s, fp);
      if (save)
        write_trace(trace, out / ("trace_G" + tag(gm.gamma_pump) + "_s" + std::to_string(s.seed) + ".bin"));
      reports[k] = analyse(trace, s, gm.gamma_pump, rule);
    } catch (const Error& e) {
      reports[k].gamma_pump = gm.gamma_pump;
      reports[k].seed = s.seed;
      errors[k] = e.what();
    }
  });

  Csv sweep(out / "sweep.csv", cfg, {"Gamma", "seed", "i_out", "i_out_total", "mode_class", "peaks", "peak_omega", "peak_site"});
  std::vector<Series> curves;
  json failures = json::array();
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    Series c;
    c.line = true;
    c.color = si == 0 ? "#1f77b4" : "#aec7e8";
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      const auto& r = reports[gi * seeds.size() + si];
      const auto& err = errors[gi * seeds.size() + si];
      if (!err.empty()) {
        sweep.row(r.gamma_pump, static_cast<unsigned long long>(r.seed), std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN(), std::string("error"), 0, 0.0, -1);
        failures.push_back({{"Gamma", r.gamma_pump}, {"seed", r.seed}, {"error", err}});
        continue;
      }
      sweep.row(r.gamma_pump, static_cast<unsigned long long>(r.seed), r.i_out, r.i_out * base.sites(),
                mode_name(r.mode), r.peaks,
                r.peak_omega, r.peak_site);
      c.x.push_back(r.gamma_pump);
      c.y.push_back(r.i_out);
    }
    curves.push_back(c);
  }
  PlotSpec ps;
  ps.title = "output intensity";
  ps.xlabel = "Gamma";
  ps.ylabel = "I_out (per-site mean)";
  write_svg_plot(out / "i_out.svg", cfg, ps, curves);

  for (double g : spectra_at) {
    for (std::size_t si = 0; si < seeds.size(); ++si) {
      const auto gi = std::find(gammas.begin(), gammas.end(), tidy(g)) - gammas.begin();
      const auto& r = reports[gi * seeds.size() + si];
      if (!errors[gi * seeds.size() + si].empty()) continue;
      const std::string stem = "G" + tag(g) + "_s" + std::to_string(seeds[si]);
      Csv sc(out / ("spectrum_" + stem + ".csv"), cfg, {"omega", "power"});
      Series s;
      s.line = true;
      s.color = "#ff7f0e";
      for (std::size_t i = 0; i < r.spectrum.omega.size(); ++i) {
        sc.row(r.spectrum.omega[i], r.spectrum.power[i]);
        s.x.push_back(r.spectrum.omega[i]);
        s.y.push_back(r.spectrum.power[i]);
      }
      PlotSpec sp;
      sp.title = "output spectrum, Gamma = " + fmt(tidy(g)) + " (" + mode_name(r.mode) + ")";
      sp.xlabel = "omega";
      sp.ylabel = "power (peak = 1)";
      write_svg_plot(out / ("spectrum_" + stem + ".svg"), cfg, sp, {s});
      Series prof;
      prof.bars = true;
      prof.color = "#2ca02c";
      Csv pc(out / ("profile_" + stem + ".csv"), cfg, {"site", "intensity"});
      for (std::size_t n = 0; n < r.profile.size(); ++n) {
        pc.row(static_cast<int>(n), r.profile[n]);
        prof.x.push_back(static_cast<double>(n));
        prof.y.push_back(r.profile[n]);
      }
      PlotSpec pp;
      pp.title = "|psi_n|^2 at t_end, Gamma = " + fmt(tidy(g));
      pp.xlabel = "site n";
      pp.ylabel = "|psi_n|^2";
      write_svg_plot(out / ("profile_" + stem + ".svg"), cfg, pp, {prof});
    }
  }

  json summary = extra;
  try {
    summary["linear_threshold"] = linear_threshold(base);
  } catch (const Error& e) {
    summary["linear_threshold_error"] = e.what();
  }
  json onsets = json::array();
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    json onset = nullptr;
    json classes = json::array();
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      const auto& r = reports[gi * seeds.size() + si];
      if (!errors[gi * seeds.size() + si].empty()) continue;
      classes.push_back(mode_name(r.mode));
      if (onset.is_null() && r.mode != ModeClass::BelowThreshold) onset = r.gamma_pump;
    }
    onsets.push_back({{"seed", seeds[si]}, {"onset_Gamma", onset}, {"classes", classes}});
  }
  summary["per_seed"] = onsets;
  summary["failures"] = failures;
  return summary;
}

json run_experiment(const std::string& kind, const json& config, const fs::path& out, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  json summary;
  if (kind == "spectrum") {
    summary = run_spectrum(config, out, opt);
  } else if (kind == "phase-diagram") {
    summary = run_phase_diagram(config, out, opt);
  } else if (kind == "domain-wall") {
    summary = run_domain_wall(config, out, opt);
  } else if (kind == "laser") {
    summary = run_laser(config, out, opt);
  } else if (kind == "trajectory") {
    summary = run_trajectory(config, out, opt);
  } else {
    fail(ErrorKind::Config, "unknown experiment kind '" + kind + "'");
  }
  json doc{{"version", version_string()}, {"kind", kind}, {"config", config}, {"result", summary}};
  write_json(out / "summary.json", doc);
  write_sidecar(out, kind, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return summary;
}

}  // namespace aah
