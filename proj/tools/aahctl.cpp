// Command-line driver over the imaah C API.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "imaah/imaah.h"

namespace {

constexpr int kExitPhysics = 1;
constexpr int kExitConfig = 2;

int exit_code(imaah_status s) {
  switch (s) {
    case IMAAH_OK: return 0;
    case IMAAH_ERR_CONFIG:
    case IMAAH_ERR_IO: return kExitConfig;
    default: return kExitPhysics;
  }
}

int default_threads() {
  const char* env = std::getenv("IMAAH_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    std::cerr << "aahctl: ignoring invalid IMAAH_THREADS='" << env << "'\n";
    return 0;
  }
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-potential Aubry-Andre-Harper toolkit"};
  app.set_version_flag("--version", std::string(imaah_version()));
  app.require_subcommand(1);

  std::string config, out;
  std::uint64_t seed = 0;
  int threads = default_threads();
  const char* kinds[][2] = {{"spectrum", "eigenvalues and zero modes of an open chain over a delta sweep"},
                            {"phase-diagram", "bulk labels on a polar (V, delta) grid"},
                            {"domain-wall", "spectrum and zero modes of a multi-domain chain"},
                            {"laser", "nonlinear laser sweeps over the pump strength"},
                            {"trajectory", "zero modes along a line of constant V sin(delta)"}};
  for (const auto& k : kinds) {
    auto* sub = app.add_subcommand(k[0], k[1]);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--seed", seed, "override the laser seed list with one seed");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores (default from IMAAH_THREADS)")
        ->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  std::ifstream in(config);
  if (!in) {
    std::cerr << "aahctl: cannot read " << config << '\n';
    return kExitConfig;
  }
  std::ostringstream text;
  text << in.rdbuf();

  const bool has_seed = sub->count("--seed") > 0;
  char* summary = nullptr;
  const imaah_status s =
      imaah_run_experiment(sub->get_name().c_str(), text.str().c_str(), out.c_str(), has_seed, seed, threads, &summary);
  if (s != IMAAH_OK) {
    std::cerr << "aahctl " << sub->get_name() << ": " << imaah_last_error() << '\n';
    return exit_code(s);
  }
  std::cout << summary << '\n';
  imaah_string_free(summary);
  return 0;
}
