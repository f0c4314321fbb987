#include "core/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#ifndef IMAAH_VERSION_STRING
#define IMAAH_VERSION_STRING "unknown"
#endif

namespace aah {

namespace fs = std::filesystem;

std::string version_string() { return std::string("imaah ") + IMAAH_VERSION_STRING; }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory " + dir.string() + ": " + ec.message());
}

Csv::Csv(const fs::path& path, const json& config, const std::vector<std::string>& columns) : out_(path) {
  if (!out_) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out_ << "# " << version_string() << '\n' << "# config " << config.dump() << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

namespace {

constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 55;

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

std::string comment(const json& config) {
  std::string c = config.dump();
  // "--" may not appear inside an XML comment.
  std::string o;
  for (char ch : c) {
    if (ch == '-' && !o.empty() && o.back() == '-') o += ' ';
    o += ch;
  }
  return "<!-- " + version_string() + " config " + o + " -->\n";
}

std::ofstream open_svg(const fs::path& path, const json& config, double w, double h) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << comment(config) << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os;
}

}  // namespace

void write_svg_plot(const fs::path& path, const json& config, const PlotSpec& spec, const std::vector<Series>& series) {
  double xmin = spec.xmin, xmax = spec.xmax, ymin = spec.ymin, ymax = spec.ymax;
  auto ty = [&](double y) { return spec.logy ? std::log10(std::max(y, 1e-300)) : y; };
  if (xmin == xmax || ymin == ymax) {
    double a = 1e300, b = -1e300, c = 1e300, d = -1e300;
    for (const auto& s : series) {
      for (double x : s.x) a = std::min(a, x), b = std::max(b, x);
      for (double y : s.y) c = std::min(c, ty(y)), d = std::max(d, ty(y));
      if (s.bars) c = std::min(c, 0.0), d = std::max(d, 0.0);
    }
    if (a > b) a = 0, b = 1;
    if (c > d) c = 0, d = 1;
    if (a == b) a -= 1, b += 1;
    if (c == d) c -= 1, d += 1;
    const double px = 0.03 * (b - a), py = 0.05 * (d - c);
    if (xmin == xmax) xmin = a - px, xmax = b + px;
    if (ymin == ymax) ymin = c - py, ymax = d + py;
  } else if (spec.logy) {
    ymin = ty(ymin), ymax = ty(ymax);
  }
  const double pw = kW - kL - kR, ph = kH - kT - kB;
  auto sx = [&](double x) { return kL + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kT + (1.0 - (ty(y) - ymin) / (ymax - ymin)) * ph; };

  auto os = open_svg(path, config, kW, kH);
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
     << "</text>\n";
  os << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4, yv = ymin + (ymax - ymin) * i / 4;
    const double X = kL + pw * i / 4, Y = kT + ph * (1 - i / 4.0);
    os << "<text x=\"" << X << "\" y=\"" << kT + ph + 16 << "\" text-anchor=\"middle\">" << fmt(std::round(xv * 1000) / 1000)
       << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
       << (spec.logy ? "1e" : "") << fmt(std::round(yv * 1000) / 1000) << "</text>\n";
  }
  os << "<text x=\"" << kL + pw / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << escape(spec.xlabel)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << kT + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kT + ph / 2
     << ")\">" << escape(spec.ylabel) << "</text>\n";
  os << "<g>\n";
  int legend = 0;
  for (const auto& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.line && n > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < n; ++i) os << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i])) << ' ';
      os << "\"/>\n";
    } else if (s.bars) {
      const double w = n > 1 ? 0.6 * pw / n : 4.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double y0 = sy(0.0), y1 = sy(s.y[i]);
        os << "<rect x=\"" << fmt(sx(s.x[i]) - w / 2) << "\" y=\"" << fmt(std::min(y0, y1)) << "\" width=\"" << fmt(w)
           << "\" height=\"" << fmt(std::abs(y1 - y0)) << "\" fill=\"" << s.color << "\"/>\n";
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        os << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\"" << fmt(sy(s.y[i])) << "\" r=\"" << s.radius
           << "\" fill=\"" << s.color << "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = kT + 14 + 14 * legend++;
      os << "<rect x=\"" << kL + pw - 150 << "\" y=\"" << ly - 8 << "\" width=\"10\" height=\"8\" fill=\"" << s.color
         << "\"/><text x=\"" << kL + pw - 135 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    }
  }
  os << "</g>\n</svg>\n";
}

void write_polar_diagram(const fs::path& path, const json& config, const PhaseDiagram& d) {
  const double size = 420, c = size / 2, rmax = 0.45 * size;
  auto os = open_svg(path, config, size, size + 30);
  os << "<text x=\"" << c << "\" y=\"" << size + 20 << "\" text-anchor=\"middle\">alpha = " << d.alpha.q << '/'
     << d.alpha.p << ", V up to " << fmt(d.v_grid.back()) << "</text>\n";
  const int nv = static_cast<int>(d.v_grid.size()), nd = static_cast<int>(d.delta_grid.size());
  const double dv = d.v_grid.back() / nv;
  const double dd = kTwoPi / nd;
  for (int iv = 0; iv < nv; ++iv) {
    const double r0 = (d.v_grid[iv] - dv / 2) / d.v_grid.back() * rmax;
    const double r1 = (d.v_grid[iv] + dv / 2) / d.v_grid.back() * rmax;
    for (int id = 0; id < nd; ++id) {
      const auto& cell = d.at(iv, id);
      const char* col = cell.label == PhaseLabel::Nontrivial ? "#f28e2b"
                        : cell.label == PhaseLabel::Trivial  ? "#4e79a7"
                                                             : "#000000";
      const double a0 = d.delta_grid[id] - dd / 2, a1 = d.delta_grid[id] + dd / 2;
      // x = V cos(delta), y = V sin(delta) with y up.
      auto X = [&](double r, double a) { return fmt(c + std::max(r, 0.0) * std::cos(a)); };
      auto Y = [&](double r, double a) { return fmt(c - std::max(r, 0.0) * std::sin(a)); };
      os << "<path d=\"M" << X(r0, a0) << ' ' << Y(r0, a0) << " L" << X(r1, a0) << ' ' << Y(r1, a0) << " A" << fmt(r1)
         << ' ' << fmt(r1) << " 0 0 0 " << X(r1, a1) << ' ' << Y(r1, a1) << " L" << X(r0, a1) << ' ' << Y(r0, a1)
         << " A" << fmt(std::max(r0, 0.0)) << ' ' << fmt(std::max(r0, 0.0)) << " 0 0 1 " << X(r0, a0) << ' '
         << Y(r0, a0) << "Z\" fill=\"" << col << "\" stroke=\"" << col << "\" stroke-width=\"0.3\"/>\n";
    }
  }
  os << "<text x=\"" << size - 8 << "\" y=\"" << c - 4 << "\" text-anchor=\"end\" fill=\"#888\">V cos delta</text>\n";
  os << "<text x=\"" << c + 4 << "\" y=\"14\" fill=\"#888\">V sin delta</text>\n";
  os << "</svg>\n";
}

}  // namespace aah
