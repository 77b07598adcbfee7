#pragma once

// Minimal TOML reader for flat config files: `key = value` lines with strings,
// integers, floats, booleans, and one-line arrays of those. Comments start
// with '#'. Tables/sections are not supported (configs here are flat).

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace symgame {

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
  std::variant<std::string, std::int64_t, double, bool, TomlArray> v;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_number() const { return is_int() || std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<TomlArray>(v); }

  const std::string& as_string() const { return std::get<std::string>(v); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v); }
  double as_double() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
    return std::get<double>(v);
  }
  bool as_bool() const { return std::get<bool>(v); }
  const TomlArray& as_array() const { return std::get<TomlArray>(v); }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace toml_detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline TomlValue parse_scalar(const std::string& s, std::size_t& i, int line);

inline TomlValue parse_value(const std::string& s, std::size_t& i, int line) {
  skip_ws(s, i);
  if (i < s.size() && s[i] == '[') {
    ++i;
    TomlArray arr;
    skip_ws(s, i);
    if (i < s.size() && s[i] == ']') {
      ++i;
      return TomlValue{arr};
    }
    while (true) {
      arr.push_back(parse_scalar(s, i, line));
      skip_ws(s, i);
      if (i < s.size() && s[i] == ',') {
        ++i;
        skip_ws(s, i);
        if (i < s.size() && s[i] == ']') {  // trailing comma
          ++i;
          break;
        }
        continue;
      }
      if (i < s.size() && s[i] == ']') {
        ++i;
        break;
      }
      throw std::invalid_argument("toml line " + std::to_string(line) +
                                  ": expected ',' or ']' in array");
    }
    return TomlValue{arr};
  }
  return parse_scalar(s, i, line);
}

inline TomlValue parse_scalar(const std::string& s, std::size_t& i, int line) {
  skip_ws(s, i);
  if (i >= s.size())
    throw std::invalid_argument("toml line " + std::to_string(line) +
                                ": missing value");
  if (s[i] == '"' || s[i] == '\'') {
    const char quote = s[i++];
    std::string out;
    while (i < s.size() && s[i] != quote) {
      if (quote == '"' && s[i] == '\\' && i + 1 < s.size()) {
        ++i;
        switch (s[i]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default:
            throw std::invalid_argument("toml line " + std::to_string(line) +
                                        ": unsupported escape");
        }
        ++i;
        continue;
      }
      out += s[i++];
    }
    if (i >= s.size())
      throw std::invalid_argument("toml line " + std::to_string(line) +
                                  ": unterminated string");
    ++i;
    return TomlValue{out};
  }
  std::size_t start = i;
  while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#' &&
         s[i] != ' ' && s[i] != '\t')
    ++i;
  std::string tok = s.substr(start, i - start);
  if (tok == "true") return TomlValue{true};
  if (tok == "false") return TomlValue{false};
  if (tok.empty())
    throw std::invalid_argument("toml line " + std::to_string(line) +
                                ": empty value");
  const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                           tok == "inf" || tok == "nan";
  try {
    std::size_t used = 0;
    if (!looks_float) {
      const std::int64_t n = std::stoll(tok, &used);
      if (used == tok.size()) return TomlValue{n};
    }
    used = 0;
    const double d = std::stod(tok, &used);
    if (used == tok.size()) return TomlValue{d};
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("toml line " + std::to_string(line) +
                              ": cannot parse value '" + tok + "'");
}

}  // namespace toml_detail

inline TomlTable parse_toml(const std::string& text) {
  TomlTable table;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = 0;
    toml_detail::skip_ws(line, i);
    if (i >= line.size() || line[i] == '#') {
      if (pos > text.size()) break;
      continue;
    }
    if (line[i] == '[')
      throw std::invalid_argument("toml line " + std::to_string(line_no) +
                                  ": sections are not supported");
    std::size_t key_start = i;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) ||
                               line[i] == '_' || line[i] == '-' || line[i] == '.'))
      ++i;
    const std::string key = line.substr(key_start, i - key_start);
    if (key.empty())
      throw std::invalid_argument("toml line " + std::to_string(line_no) +
                                  ": expected a key");
    toml_detail::skip_ws(line, i);
    if (i >= line.size() || line[i] != '=')
      throw std::invalid_argument("toml line " + std::to_string(line_no) +
                                  ": expected '=' after key '" + key + "'");
    ++i;
    TomlValue value = toml_detail::parse_value(line, i, line_no);
    toml_detail::skip_ws(line, i);
    if (i < line.size() && line[i] != '#')
      throw std::invalid_argument("toml line " + std::to_string(line_no) +
                                  ": trailing characters after value");
    table[key] = std::move(value);
    if (pos > text.size()) break;
  }
  return table;
}

}  // namespace symgame
