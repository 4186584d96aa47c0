#pragma once
// Small JSON validator covering the subset of schema keywords the config
// and output documents use: type, required, properties, additionalProperties,
// items, enum, minimum, maximum, minItems. Errors name the offending path.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace slicebench {

namespace detail {

inline const char* json_type_name(const nlohmann::json& v) {
  switch (v.type()) {
    case nlohmann::json::value_t::object: return "object";
    case nlohmann::json::value_t::array: return "array";
    case nlohmann::json::value_t::string: return "string";
    case nlohmann::json::value_t::boolean: return "boolean";
    case nlohmann::json::value_t::number_integer:
    case nlohmann::json::value_t::number_unsigned: return "integer";
    case nlohmann::json::value_t::number_float: return "number";
    case nlohmann::json::value_t::null: return "null";
    default: return "unknown";
  }
}

inline bool type_matches(const std::string& want, const nlohmann::json& v) {
  if (want == "object") return v.is_object();
  if (want == "array") return v.is_array();
  if (want == "string") return v.is_string();
  if (want == "boolean") return v.is_boolean();
  if (want == "integer") return v.is_number_integer();
  if (want == "number") return v.is_number();
  if (want == "null") return v.is_null();
  return false;
}

inline void check_node(const nlohmann::json& schema, const nlohmann::json& value,
                       const std::string& path, std::vector<std::string>& errors) {
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const auto& t : *it) ok = ok || type_matches(t.get<std::string>(), value);
    } else {
      ok = type_matches(it->get<std::string>(), value);
    }
    if (!ok) {
      std::string want = it->is_array() ? it->dump() : "'" + it->get<std::string>() + "'";
      errors.push_back(path + ": expected type " + want + ", got " + json_type_name(value));
      return;  // further keyword checks would just cascade
    }
  }

  if (auto it = schema.find("enum"); it != schema.end()) {
    bool ok = false;
    for (const auto& option : *it) ok = ok || option == value;
    if (!ok) errors.push_back(path + ": value " + value.dump() + " not in " + it->dump());
  }

  if (value.is_number()) {
    if (auto it = schema.find("minimum"); it != schema.end() && value.get<double>() < it->get<double>())
      errors.push_back(path + ": value " + value.dump() + " below minimum " + it->dump());
    if (auto it = schema.find("maximum"); it != schema.end() && value.get<double>() > it->get<double>())
      errors.push_back(path + ": value " + value.dump() + " above maximum " + it->dump());
  }

  if (value.is_object()) {
    const auto props = schema.find("properties");
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& name : *it)
        if (!value.contains(name.get<std::string>()))
          errors.push_back(path + ": missing required property '" + name.get<std::string>() + "'");
    }
    const auto extra = schema.find("additionalProperties");
    const bool closed = extra != schema.end() && extra->is_boolean() && !extra->get<bool>();
    for (const auto& [key, child] : value.items()) {
      const std::string child_path = path + "." + key;
      if (props != schema.end() && props->contains(key)) {
        check_node(props->at(key), child, child_path, errors);
      } else if (closed) {
        errors.push_back(child_path + ": unknown property");
      } else if (extra != schema.end() && extra->is_object()) {
        check_node(*extra, child, child_path, errors);
      }
    }
  }

  if (value.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && value.size() < it->get<std::size_t>())
      errors.push_back(path + ": needs at least " + it->dump() + " items, got " +
                       std::to_string(value.size()));
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        check_node(*it, value[i], path + "[" + std::to_string(i) + "]", errors);
    }
  }
}

}  // namespace detail

inline std::vector<std::string> schema_errors(const nlohmann::json& schema,
                                              const nlohmann::json& value) {
  std::vector<std::string> errors;
  detail::check_node(schema, value, "$", errors);
  return errors;
}

inline void validate_or_throw(const nlohmann::json& schema, const nlohmann::json& value,
                              const std::string& what) {
  const std::vector<std::string> errors = schema_errors(schema, value);
  if (errors.empty()) return;
  std::string msg = what + " failed validation:";
  for (const std::string& e : errors) msg += "\n  " + e;
  throw std::invalid_argument(msg);
}

}  // namespace slicebench
