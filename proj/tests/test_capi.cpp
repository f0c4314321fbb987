#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "imaah/imaah.h"

TEST_CASE("version and error state") {
  CHECK(std::string(imaah_version()).rfind("imaah ", 0) == 0);
  imaah_lattice* l = nullptr;
  CHECK(imaah_lattice_from_json("{\"domains\": ", &l) == IMAAH_ERR_CONFIG);
  CHECK(l == nullptr);
  CHECK(std::string(imaah_last_error()).find("malformed") != std::string::npos);
  const imaah_modulation bad{1.0, 2, 8, 0.0};
  CHECK(imaah_lattice_single(&bad, 10, &l) == IMAAH_ERR_ARGUMENT);
  CHECK(imaah_lattice_single(nullptr, 10, &l) == IMAAH_ERR_ARGUMENT);
  const imaah_modulation ok{1.0, 3, 8, 0.0};
  CHECK(imaah_lattice_single(&ok, 10, &l) == IMAAH_OK);
  CHECK(std::string(imaah_last_error()).empty());
  CHECK(imaah_lattice_size(l) == 10);
  imaah_lattice_free(l);
  imaah_lattice_free(nullptr);
}

TEST_CASE("open chain through the C API") {
  const imaah_modulation m{1.4, 3, 8, 0.4 * M_PI};
  imaah_lattice* l = nullptr;
  REQUIRE(imaah_lattice_single(&m, 200, &l) == IMAAH_OK);
  std::vector<double> re(200 * 200), im(200 * 200);
  REQUIRE(imaah_hamiltonian(l, re.data(), im.data()) == IMAAH_OK);
  CHECK(re[1] == 1.0);
  CHECK(im[0] == doctest::Approx(1.4 * std::sin(2 * M_PI * 3 / 8 + 0.4 * M_PI)));
  double r = 1;
  REQUIRE(imaah_ct_residual(l, &r) == IMAAH_OK);
  CHECK(r < 1e-12);

  imaah_eigensystem* es = nullptr;
  REQUIRE(imaah_eigensystem_compute(l, &es) == IMAAH_OK);
  CHECK(imaah_eigensystem_size(es) == 200);
  REQUIRE(imaah_eigensystem_symmetry_residual(es, &r) == IMAAH_OK);
  CHECK(r < 1e-9);
  std::vector<double> er(200), ei(200);
  REQUIRE(imaah_eigensystem_values(es, er.data(), ei.data()) == IMAAH_OK);
  CHECK(imaah_eigensystem_vector(es, 200, er.data(), ei.data()) == IMAAH_ERR_ARGUMENT);

  int count = -1;
  REQUIRE(imaah_find_zero_modes(es, l, nullptr, nullptr, 0, &count) == IMAAH_OK);
  CHECK(count == 2);
  std::vector<imaah_zero_mode> modes(count);
  imaah_zero_mode_options opt;
  imaah_zero_mode_options_default(&opt);
  CHECK(opt.eps_re == 1e-6);
  REQUIRE(imaah_find_zero_modes(es, l, &opt, modes.data(), count, &count) == IMAAH_OK);
  int edges = 0;
  for (const auto& z : modes) {
    CHECK(std::abs(z.re_energy) < 1e-6);
    CHECK(z.is_protected == 1);
    edges += z.anchor_kind == IMAAH_ANCHOR_LEFT_EDGE || z.anchor_kind == IMAAH_ANCHOR_RIGHT_EDGE;
  }
  CHECK(edges == 2);
  imaah_eigensystem_free(es);
  imaah_lattice_free(l);
}

TEST_CASE("bulk invariants through the C API") {
  const imaah_modulation n{1.4, 3, 8, 0.4 * M_PI};
  double gap = 0;
  int gapped = 0;
  REQUIRE(imaah_real_line_gap(&n, 0, 1e-4, &gap, &gapped) == IMAAH_OK);
  CHECK(gapped == 1);
  double pol = 0, phase = 0;
  REQUIRE(imaah_wilson_polarization(&n, 128, 1e-4, &pol) == IMAAH_OK);
  CHECK(std::abs(pol - 0.5) < 1e-3);
  REQUIRE(imaah_global_berry_phase(&n, 128, 1e-4, &phase) == IMAAH_OK);
  CHECK(std::abs(phase - 2 * M_PI) < 1e-2);
  imaah_classification c;
  REQUIRE(imaah_classify(&n, 128, 1e-4, &c) == IMAAH_OK);
  CHECK(c.label == IMAAH_NONTRIVIAL);

  const imaah_modulation free{0.0, 3, 8, 0.0};
  CHECK(imaah_wilson_polarization(&free, 128, 1e-4, &pol) == IMAAH_ERR_NUMERICAL);
  REQUIRE(imaah_classify(&free, 128, 1e-4, &c) == IMAAH_OK);
  CHECK(c.label == IMAAH_GAPLESS);

  std::vector<double> re(64), im(64);
  REQUIRE(imaah_bloch_hamiltonian(&n, 0.3, re.data(), im.data()) == IMAAH_OK);
  double r = 1;
  REQUIRE(imaah_bloch_ct_residual(&n, 0.3, &r) == IMAAH_OK);
  CHECK(r < 1e-12);
}

TEST_CASE("laser threshold and experiments through the C API") {
  const char* cfg = R"({"model": "loss", "loss": {"lattice": {"domains": [
      {"V": 1.5, "q": 3, "p": 8, "delta_pi": 0.4, "length": 24},
      {"V": 1.5, "q": 1, "p": 4, "delta_pi": -0.4, "length": 24}]}}})";
  double th = 0;
  REQUIRE(imaah_laser_linear_threshold(cfg, &th) == IMAAH_OK);
  CHECK(th == doctest::Approx(0.5).epsilon(1e-6));

  char* summary = nullptr;
  const std::string dw = std::string(R"({"lattice": {"domains": [
      {"V": 1.5, "q": 3, "p": 8, "delta_pi": 0.4, "length": 24},
      {"V": 1.5, "q": 1, "p": 4, "delta_pi": -0.4, "length": 24}]}})");
  const std::string out = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/imaah_capi_dw";
  REQUIRE(imaah_run_experiment("domain-wall", dw.c_str(), out.c_str(), 0, 0, 1, &summary) == IMAAH_OK);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("\"wall_zero_mode\": true") != std::string::npos);
  imaah_string_free(summary);
  CHECK(imaah_run_experiment("domain-wall", "{", out.c_str(), 0, 0, 1, nullptr) == IMAAH_ERR_CONFIG);
  CHECK(imaah_run_experiment("domain-wall", dw.c_str(), out.c_str(), 0, 0, -1, nullptr) == IMAAH_ERR_CONFIG);
}
