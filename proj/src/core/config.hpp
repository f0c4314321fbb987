#pragma once

#include <initializer_list>
#include <string>

#include "core/laser.hpp"
#include "core/model.hpp"
#include "json.hpp"

namespace aah {

using json = nlohmann::json;

json parse_json(const std::string& text, const std::string& where);

// Rejects keys outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where);

double get_number(const json& j, const char* key, const std::string& where);
double get_number(const json& j, const char* key, const std::string& where, double fallback);
int get_int(const json& j, const char* key, const std::string& where);
int get_int(const json& j, const char* key, const std::string& where, int fallback);

// `delta` in radians or `delta_pi` in units of pi, exactly one.
double get_phase(const json& j, const std::string& where);

Modulation modulation_from_json(const json& j, const std::string& where);
json modulation_to_json(const Modulation& m);

// {"domains": [{"V", "q", "p", "delta", "length"}], "t": 1, "indexing": "local" | "global"}
Lattice lattice_from_json(const json& j);
json lattice_to_json(const Lattice& l);

SimConfig sim_from_json(const json& j, const std::string& where);
json sim_to_json(const SimConfig& s);

}  // namespace aah
