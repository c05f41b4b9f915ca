#include "gta/json_util.hpp"

#include <cmath>

namespace gta::json_util {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field '" + path + "': " + what);
}

}  // namespace

json parse_document(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": syntax error");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path.empty() ? "<root>" : path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(key_path(path, key), "missing");
  return *it;
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) field_error(key_path(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) field_error(key_path(path, key), "expected a finite number");
  return d;
}

double get_number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  return obj.contains(key) ? get_number(obj, key, path) : fallback;
}

int get_int(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) field_error(key_path(path, key), "expected an integer");
  return v.get<int>();
}

int get_int_or(const json& obj, const std::string& key, int fallback, const std::string& path) {
  return obj.contains(key) ? get_int(obj, key, path) : fallback;
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) field_error(key_path(path, key), "expected a string");
  return v.get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& key, const std::string& fallback,
                          const std::string& path) {
  return obj.contains(key) ? get_string(obj, key, path) : fallback;
}

Vec2 as_vec2(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    field_error(path, "expected an array of 2 numbers");
  return {v[0].get<double>(), v[1].get<double>()};
}

Vec3 as_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
    field_error(path, "expected an array of 3 numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

Rgb as_rgb(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) field_error(path, "expected [r, g, b]");
  Rgb c{};
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer() || v[i].get<int>() < 0 || v[i].get<int>() > 255)
      field_error(path, "color channels must be integers in [0, 255]");
    c[i] = static_cast<std::uint8_t>(v[i].get<int>());
  }
  return c;
}

void check_header(const json& doc, const std::string& format, int version, const std::string& source) {
  if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
  const std::string got = get_string(doc, "format", "");
  if (got != format) throw ParseError(source + ": field 'format': expected \"" + format + "\", got \"" + got + "\"");
  const int v = get_int(doc, "version", "");
  if (v != version) throw ParseError(source + ": field 'version': unsupported version " + std::to_string(v));
}

}  // namespace gta::json_util
