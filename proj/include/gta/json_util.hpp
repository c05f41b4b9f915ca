#pragma once

// Field accessors for nlohmann::json documents that report the offending key path.

#include "gta/error.hpp"
#include "gta/geometry.hpp"
#include "gta/image.hpp"

#include <json.hpp>

#include <string>

namespace gta::json_util {

using nlohmann::json;

inline std::string key_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

/// Parses text, converting syntax errors into ParseError with line/column.
json parse_document(const std::string& text, const std::string& source);

const json& require(const json& obj, const std::string& key, const std::string& path);
double get_number(const json& obj, const std::string& key, const std::string& path);
double get_number_or(const json& obj, const std::string& key, double fallback, const std::string& path);
int get_int(const json& obj, const std::string& key, const std::string& path);
int get_int_or(const json& obj, const std::string& key, int fallback, const std::string& path);
std::string get_string(const json& obj, const std::string& key, const std::string& path);
std::string get_string_or(const json& obj, const std::string& key, const std::string& fallback,
                          const std::string& path);
Vec2 as_vec2(const json& v, const std::string& path);
Vec3 as_vec3(const json& v, const std::string& path);
Rgb as_rgb(const json& v, const std::string& path);
/// Checks "format" and "version" header fields.
void check_header(const json& doc, const std::string& format, int version, const std::string& source);

}  // namespace gta::json_util
