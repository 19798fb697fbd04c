#pragma once

// Small JSON Schema subset for the checked-in schemas: type, const, enum,
// required, properties, additionalProperties, items, minItems, minimum,
// maximum, pattern.

#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include "json.hpp"

namespace schema_check {

using nlohmann::json;

inline json load_schema(const std::string& name) {
  std::ifstream in(std::string(MINENT_SCHEMA_DIR) + "/" + name);
  return json::parse(in);
}

inline bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  return false;
}

/// Appends one message per violation.
inline void validate(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors) {
  auto fail = [&](const std::string& what) { errors.push_back(path + ": " + what); };
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, s["type"].get<std::string>());
    }
    if (!ok) return fail("wrong type, got " + v.dump());
  }
  if (s.contains("const") && v != s["const"]) fail("expected " + s["const"].dump());
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) fail("not in enum: " + v.dump());
  }
  if (v.is_number()) {
    if (s.contains("minimum") && v.get<double>() < s["minimum"].get<double>()) fail("below minimum");
    if (s.contains("maximum") && v.get<double>() > s["maximum"].get<double>()) fail("above maximum");
  }
  if (v.is_string() && s.contains("pattern") &&
      !std::regex_search(v.get<std::string>(), std::regex(s["pattern"].get<std::string>()))) {
    fail("does not match pattern");
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& key : s["required"]) {
        if (!v.contains(key.get<std::string>())) fail("missing " + key.get<std::string>());
      }
    }
    for (const auto& [key, value] : v.items()) {
      if (s.contains("properties") && s["properties"].contains(key)) {
        validate(value, s["properties"][key], path + "." + key, errors);
      } else if (s.contains("additionalProperties")) {
        const auto& extra = s["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) fail("unexpected key " + key);
        } else {
          validate(value, extra, path + "." + key, errors);
        }
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) fail("too few items");
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        validate(v[i], s["items"], path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

inline std::vector<std::string> errors_for(const json& doc, const std::string& schema_name) {
  std::vector<std::string> errors;
  validate(doc, load_schema(schema_name), "$", errors);
  return errors;
}

}  // namespace schema_check
