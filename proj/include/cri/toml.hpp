// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reader for the TOML subset used by experiment configs: [table] headers,
// key = value lines with strings, integers, floats, booleans and flat arrays,
// and # comments. Nested tables beyond one level, dates and multiline strings
// are not supported.

#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cri::toml {

struct Value;
using Array = std::vector<Value>;

struct Value {
  std::variant<std::int64_t, double, bool, std::string, Array> data;

  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  double as_float() const {
    if (is_int()) return static_cast<double>(as_int());
    return std::get<double>(data);
  }
  bool as_bool() const { return std::get<bool>(data); }
  const std::string& as_string() const { return std::get<std::string>(data); }
  const Array& as_array() const { return std::get<Array>(data); }
};

// Keys are "table.key" (or bare "key" for the root table).
using Table = std::map<std::string, Value>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("toml line " + std::to_string(line) + ": " + what) {}
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Removes a trailing comment, respecting quoted strings.
inline std::string strip_comment(const std::string& s) {
  bool in_basic = false, in_literal = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_basic) {
      if (c == '\\') ++i;
      else if (c == '"') in_basic = false;
    } else if (in_literal) {
      if (c == '\'') in_literal = false;
    } else if (c == '"') {
      in_basic = true;
    } else if (c == '\'') {
      in_literal = true;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  return s;
}

inline Value parse_scalar(const std::string& raw, std::size_t line);

inline Value parse_value(const std::string& raw, std::size_t line) {
  const std::string v = strip(raw);
  if (v.empty()) throw ParseError(line, "empty value");
  if (v.front() == '[') {
    if (v.back() != ']') throw ParseError(line, "unterminated array");
    Array arr;
    std::string body = v.substr(1, v.size() - 2);
    // Split on commas outside quotes and nested brackets.
    int depth = 0;
    bool in_basic = false, in_literal = false;
    std::string cur;
    auto flush = [&] {
      const std::string item = strip(cur);
      if (!item.empty()) arr.push_back(parse_value(item, line));
      cur.clear();
    };
    for (std::size_t i = 0; i < body.size(); ++i) {
      const char c = body[i];
      if (in_basic) {
        cur.push_back(c);
        if (c == '\\' && i + 1 < body.size()) cur.push_back(body[++i]);
        else if (c == '"') in_basic = false;
      } else if (in_literal) {
        cur.push_back(c);
        if (c == '\'') in_literal = false;
      } else if (c == '"') {
        cur.push_back(c);
        in_basic = true;
      } else if (c == '\'') {
        cur.push_back(c);
        in_literal = true;
      } else if (c == '[') {
        ++depth;
        cur.push_back(c);
      } else if (c == ']') {
        --depth;
        cur.push_back(c);
      } else if (c == ',' && depth == 0) {
        flush();
      } else {
        cur.push_back(c);
      }
    }
    flush();
    return Value{arr};
  }
  return parse_scalar(v, line);
}

inline Value parse_scalar(const std::string& v, std::size_t line) {
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ParseError(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      char c = v[i];
      if (c == '\\' && i + 2 < v.size() + 1) {
        const char n = v[++i];
        switch (n) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: throw ParseError(line, "unsupported escape");
        }
      } else {
        out.push_back(c);
      }
    }
    return Value{out};
  }
  if (v.front() == '\'') {
    if (v.size() < 2 || v.back() != '\'')
      throw ParseError(line, "unterminated literal string");
    return Value{v.substr(1, v.size() - 2)};
  }
  if (v == "true") return Value{true};
  if (v == "false") return Value{false};
  // Number: integer unless it carries a '.', exponent, or special value.
  std::string digits;
  digits.reserve(v.size());
  for (char c : v)
    if (c != '_') digits.push_back(c);
  const bool is_float = digits.find_first_of(".eE") != std::string::npos ||
                        digits == "inf" || digits == "-inf" || digits == "nan";
  try {
    std::size_t used = 0;
    if (is_float) {
      const double d = std::stod(digits, &used);
      if (used != digits.size()) throw std::invalid_argument("trailing");
      return Value{d};
    }
    const std::int64_t i = std::stoll(digits, &used, 10);
    if (used != digits.size()) throw std::invalid_argument("trailing");
    return Value{i};
  } catch (const std::exception&) {
    throw ParseError(line, "cannot parse value '" + v + "'");
  }
}

}  // namespace detail

inline Table parse(const std::string& text) {
  Table table;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++lineno;
    line = detail::strip(detail::strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ParseError(lineno, "malformed table header");
      section = detail::strip(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(lineno, "empty table name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key = value");
    std::string key = detail::strip(line.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (key.front() == '"' && key.back() == '"' && key.size() >= 2)
      key = key.substr(1, key.size() - 2);
    const std::string full = section.empty() ? key : section + "." + key;
    if (table.count(full)) throw ParseError(lineno, "duplicate key " + full);
    table[full] = detail::parse_value(line.substr(eq + 1), lineno);
  }
  return table;
}

inline Table parse_file_text(const std::string& text) { return parse(text); }

}  // namespace cri::toml
