#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/topology.hpp"

namespace aah {

std::string version_string();

// Shortest round-trip decimal.
std::string fmt(double x);

void ensure_dir(const std::filesystem::path& dir);

class Csv {
 public:
  Csv(const std::filesystem::path& path, const json& config, const std::vector<std::string>& columns);

  template <class... A>
  void row(const A&... cells) {
    std::ostringstream os;
    bool first = true;
    ((os << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << os.str() << '\n';
  }

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(unsigned long x) { return std::to_string(x); }
  static std::string cell(unsigned long long x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }

  std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& j);

struct Series {
  std::vector<double> x, y;
  std::string color = "#000000";
  double radius = 1.5;
  bool line = false;
  bool bars = false;
  std::string label;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;  // equal bounds mean autoscale
  bool logy = false;
};

void write_svg_plot(const std::filesystem::path& path, const json& config, const PlotSpec& spec,
                    const std::vector<Series>& series);

// Annular sectors colored orange (nontrivial), blue (trivial), black (gapless).
void write_polar_diagram(const std::filesystem::path& path, const json& config, const PhaseDiagram& d);

}  // namespace aah
