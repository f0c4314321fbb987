#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/experiments.hpp"
#include "core/output.hpp"

using namespace aah;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("imaah_test_" + name);
  fs::remove_all(p);
  return p;
}

const char* kWall = R"({"domains": [{"V": 1.5, "q": 3, "p": 8, "delta_pi": 0.4, "length": 24},
                                    {"V": 1.5, "q": 1, "p": 4, "delta_pi": -0.4, "length": 24}]})";

}  // namespace

TEST_CASE("lattice JSON") {
  const auto l = lattice_from_json(json::parse(kWall));
  CHECK(l.size() == 48);
  CHECK(l.domains[1].mod.delta == doctest::Approx(1.6 * kPi));
  CHECK(l.indexing == SiteIndexing::DomainLocal);
  const auto back = lattice_from_json(lattice_to_json(l));
  CHECK(back.domains[0].mod.delta == l.domains[0].mod.delta);

  CHECK(kind_of([] { lattice_from_json(json::parse(R"({"domains": [], "x": 1})")); }) == ErrorKind::Config);
  CHECK(kind_of([] {
          lattice_from_json(json::parse(R"({"domains": [{"V": 1, "q": 2, "p": 8, "delta": 0, "length": 4}]})"));
        }) == ErrorKind::Config);
  CHECK(kind_of([] {
          lattice_from_json(
              json::parse(R"({"domains": [{"V": 1, "q": 1, "p": 4, "delta": 0, "delta_pi": 0, "length": 4}]})"));
        }) == ErrorKind::Config);
  CHECK(kind_of([] {
          lattice_from_json(json::parse(R"({"domains": [{"V": 1, "q": 1, "p": 4, "delta": 0, "length": 4, "W": 2}]})"));
        }) == ErrorKind::Config);
  CHECK(kind_of([] { parse_json("{\"V\": ", "x"); }) == ErrorKind::Config);
}

TEST_CASE("simulation JSON") {
  const auto s = sim_from_json(json::parse(R"({"t_end": 100, "t1": 20})"), "sim");
  CHECK(s.t2 == 100);
  CHECK(kind_of([] { sim_from_json(json::parse(R"({"dt": 0.5})"), "sim"); }) == ErrorKind::Config);
  CHECK(kind_of([] { sim_from_json(json::parse(R"({"tend": 5})"), "sim"); }) == ErrorKind::Config);
}

TEST_CASE("csv and svg carry version and config") {
  const auto dir = scratch("csv");
  ensure_dir(dir);
  const json cfg{{"a", 1}, {"b", "x--y"}};
  {
    Csv c(dir / "t.csv", cfg, {"x", "y", "name"});
    c.row(0.1, 2, std::string("z"));
  }
  const auto text = slurp(dir / "t.csv");
  CHECK(text.find("# " + version_string()) == 0);
  CHECK(text.find("# config " + cfg.dump()) != std::string::npos);
  CHECK(text.find("x,y,name\n0.1,2,z\n") != std::string::npos);

  Series s;
  s.x = {0, 1};
  s.y = {1, 2};
  write_svg_plot(dir / "t.svg", cfg, PlotSpec{}, {s});
  const auto svg = slurp(dir / "t.svg");
  CHECK(svg.find(version_string()) != std::string::npos);
  CHECK(svg.find("x- -y") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("domain-wall experiment") {
  const auto dir = scratch("dw");
  const auto r = run_experiment("domain-wall", json{{"lattice", json::parse(kWall)}}, dir, {});
  CHECK(r.at("wall_zero_mode") == true);
  CHECK(r.at("wall_mode_has_max_im") == true);
  CHECK(r.at("domain_labels") == json::array({"nontrivial", "trivial"}));
  for (const char* f : {"summary.json", "run.log", "spectrum.csv", "spectrum.svg", "zero_modes.csv", "potential.csv"})
    CHECK(fs::exists(dir / f));
  const auto first = slurp(dir / "spectrum.csv");
  run_experiment("domain-wall", json{{"lattice", json::parse(kWall)}}, dir, {});
  CHECK(slurp(dir / "spectrum.csv") == first);
  fs::remove_all(dir);
}

TEST_CASE("unmodulated spectrum run writes no wavefunctions") {
  const auto dir = scratch("flat");
  const auto r = run_experiment(
      "spectrum", json{{"V", 0.0}, {"q", 3}, {"p", 8}, {"N", 20}, {"n_delta", 8}, {"profiles_delta_pi", {0.4}}}, dir, {});
  CHECK(r.at("deltas_with_protected_zero_modes").empty());
  CHECK(r.at("wavefunctions").empty());
  for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename().string().rfind("wavefunction", 0) != 0);
  fs::remove_all(dir);
}

TEST_CASE("strict experiment schemas") {
  const auto dir = scratch("strict");
  CHECK(kind_of([&] { run_experiment("spectrum", json{{"V", 1.0}, {"q", 3}, {"p", 8}, {"N", 20}, {"Nn", 1}}, dir, {}); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { run_experiment("spectrum", json{{"V", 1.0}, {"q", 3}, {"p", 8}, {"N", 21}}, dir, {}); }) ==
        ErrorKind::Config);
  CHECK(kind_of([&] { run_experiment("nope", json::object(), dir, {}); }) == ErrorKind::Config);
  CHECK(kind_of([&] { run_experiment("laser", json{{"model", "both"}}, dir, {}); }) == ErrorKind::Config);
  CHECK(kind_of([&] {
          run_experiment("phase-diagram", json{{"kind", "spectrum"}, {"alphas", {{1, 4}}}}, dir, {});
        }) == ErrorKind::Config);
  fs::remove_all(dir);
}

TEST_CASE("laser run is reproducible from its seed") {
  const json cfg = json::parse(R"({
    "model": "pump",
    "pump": {"q": 3, "p": 8, "delta_pi": 0.4, "loss": 3, "sites": 48},
    "gamma_values": [3.6],
    "spectra_at": [3.6],
    "seeds": [1, 2],
    "sim": {"t_end": 300, "t1": 100, "t2": 300}
  })");
  const auto a = scratch("laser_a"), b = scratch("laser_b");
  RunOptions opt;
  opt.seed = 5;
  const auto ra = run_experiment("laser", cfg, a, opt);
  run_experiment("laser", cfg, b, opt);
  CHECK(ra.at("per_seed").size() == 1u);
  CHECK(ra.at("per_seed")[0].at("seed") == 5);
  CHECK(slurp(a / "sweep.csv") == slurp(b / "sweep.csv"));
  CHECK(slurp(a / "spectrum_G3.6_s5.csv") == slurp(b / "spectrum_G3.6_s5.csv"));
  CHECK(ra.at("linear_threshold").get<double>() > 0);
  fs::remove_all(a);
  fs::remove_all(b);
}
