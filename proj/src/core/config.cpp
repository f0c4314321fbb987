#include "core/config.hpp"

#include <cmath>
#include <limits>

namespace aah {

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, where + ": malformed JSON: " + e.what());
  }
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::Config, where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(ErrorKind::Config, where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorKind::Config, where + ": missing key '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) fail(ErrorKind::Config, where + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ErrorKind::Config, where + ": '" + key + "' must be finite");
  return x;
}

double get_number(const json& j, const char* key, const std::string& where, double fallback) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

int get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(ErrorKind::Config, where + ": missing key '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(ErrorKind::Config, where + ": '" + key + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    fail(ErrorKind::Config, where + ": '" + key + "' out of range");
  return static_cast<int>(x);
}

int get_int(const json& j, const char* key, const std::string& where, int fallback) {
  return j.contains(key) ? get_int(j, key, where) : fallback;
}

double get_phase(const json& j, const std::string& where) {
  const bool rad = j.contains("delta"), pi = j.contains("delta_pi");
  if (rad == pi) fail(ErrorKind::Config, where + ": give exactly one of 'delta' or 'delta_pi'");
  return rad ? get_number(j, "delta", where) : kPi * get_number(j, "delta_pi", where);
}

namespace {
template <class F>
auto as_config(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) fail(ErrorKind::Config, where + ": " + e.what());
    throw;
  }
}
}  // namespace

Modulation modulation_from_json(const json& j, const std::string& where) {
  const double V = get_number(j, "V", where);
  const int q = get_int(j, "q", where);
  const int p = get_int(j, "p", where);
  const double d = get_phase(j, where);
  return as_config(where, [&] { return Modulation::make(V, Rational::make(q, p), d); });
}

json modulation_to_json(const Modulation& m) {
  return json{{"V", m.V}, {"q", m.alpha.q}, {"p", m.alpha.p}, {"delta", m.delta}};
}

Lattice lattice_from_json(const json& j) {
  const std::string where = "lattice";
  require_keys(j, {"domains", "t", "indexing"}, where);
  if (!j.contains("domains") || !j.at("domains").is_array() || j.at("domains").empty())
    fail(ErrorKind::Config, where + ": 'domains' must be a non-empty array");
  Lattice l;
  l.hopping = get_number(j, "t", where, 1.0);
  if (j.contains("indexing")) {
    const auto& ix = j.at("indexing");
    if (ix == "local") {
      l.indexing = SiteIndexing::DomainLocal;
    } else if (ix == "global") {
      l.indexing = SiteIndexing::Global;
    } else {
      fail(ErrorKind::Config, where + ": 'indexing' must be \"local\" or \"global\"");
    }
  }
  int i = 0;
  for (const auto& d : j.at("domains")) {
    const std::string w = where + ".domains[" + std::to_string(i++) + "]";
    require_keys(d, {"V", "q", "p", "delta", "delta_pi", "length"}, w);
    Domain dom;
    dom.mod = modulation_from_json(d, w);
    dom.length = get_int(d, "length", w);
    if (dom.length < 1) fail(ErrorKind::Config, w + ": 'length' must be at least 1");
    l.domains.push_back(dom);
  }
  if (l.size() < 2) fail(ErrorKind::Config, where + ": needs at least 2 sites");
  return l;
}

json lattice_to_json(const Lattice& l) {
  json doms = json::array();
  for (const auto& d : l.domains) {
    json m = modulation_to_json(d.mod);
    m["length"] = d.length;
    doms.push_back(m);
  }
  return json{{"domains", doms},
              {"t", l.hopping},
              {"indexing", l.indexing == SiteIndexing::Global ? "global" : "local"}};
}

SimConfig sim_from_json(const json& j, const std::string& where) {
  require_keys(j, {"dt", "t_end", "sample_stride", "init_scale", "t1", "t2"}, where);
  SimConfig s;
  s.dt = get_number(j, "dt", where, s.dt);
  s.t_end = get_number(j, "t_end", where, s.t_end);
  s.sample_stride = get_int(j, "sample_stride", where, s.sample_stride);
  s.init_scale = get_number(j, "init_scale", where, s.init_scale);
  s.t1 = get_number(j, "t1", where, s.t1);
  s.t2 = get_number(j, "t2", where, std::min(s.t2, s.t_end));
  as_config(where, [&] {
    s.validate();
    return 0;
  });
  return s;
}

json sim_to_json(const SimConfig& s) {
  return json{{"dt", s.dt},     {"t_end", s.t_end}, {"sample_stride", s.sample_stride}, {"init_scale", s.init_scale},
              {"t1", s.t1},     {"t2", s.t2}};
}

}  // namespace aah
