#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/laser.hpp"
#include "core/spectral.hpp"
#include "core/topology.hpp"

namespace aah {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: hardware concurrency
};

// kind: spectrum, phase-diagram, domain-wall, laser, trajectory. Returns the summary also written to summary.json.
json run_experiment(const std::string& kind, const json& config, const std::filesystem::path& out_dir,
                    const RunOptions& opt);

json run_spectrum(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt);
json run_phase_diagram(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt);
json run_domain_wall(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt);
json run_laser(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt);
json run_trajectory(const json& config, const std::filesystem::path& out_dir, const RunOptions& opt);

// The "model" plus "pump" or "loss" part of a laser config; `extra` receives derived loss-model numbers.
GainModel laser_gain_model(const json& config, json& resolved, json& extra);

struct TrajectoryPoint {
  double x = 0.0;  // V cos delta
  Modulation mod;
  Classification cls;
  CVec values;
  std::vector<ZeroModeReport> modes;
};

// Points along V sin(delta) = v_sin with V cos(delta) evenly spaced on [x_min, x_max].
std::vector<TrajectoryPoint> trajectory_sweep(Rational alpha, int sites, double v_sin, double x_min, double x_max,
                                              int points, const ZeroModeOptions& zopt, int threads);

}  // namespace aah
