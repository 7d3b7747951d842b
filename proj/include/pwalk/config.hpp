#pragma once

// Walk specification files.
//
// Line-based `key = value` text; `#` starts a comment. Keys:
//
//   dim = <int>                 required, first use fixes the point arity
//   name = <text>               optional label
//   unperturbed = true|false    optional, default false
//   order = <int>               optional moment/Edgeworth order L, default 4
//   p = <pt>: <w> [; <pt>: <w> ...]   step law away from the origin
//   q = <pt>: <w> [; <pt>: <w> ...]   exit law from the origin (defaults to p)
//
// <pt> is a comma-separated integer tuple (`-1`, `1,0`); <w> is an exact decimal
// (`0.25`, `2.5e-2`) or fraction (`1/4`). `p` and `q` may repeat; their points
// accumulate and a repeated point is an error.

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pwalk/errors.hpp"
#include "pwalk/lattice.hpp"
#include "pwalk/rational.hpp"
#include "pwalk/walk_model.hpp"

namespace pwalk {

struct WalkConfig {
  std::string name;
  int dim = 0;
  bool unperturbed = false;
  int order = 4;
  std::vector<std::pair<Point, Rational>> p;
  std::vector<std::pair<Point, Rational>> q;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw Error(Errc::kParse, "line " + std::to_string(line) + ": " + msg);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline Point parse_point(std::string_view s, int line) {
  Point p;
  for (auto part : split(s, ',')) {
    part = trim(part);
    const auto v = detail::parse_integer(part);
    if (!v) parse_fail(line, "bad lattice coordinate '" + std::string(part) + "'");
    p.push_back(v->convert_to<Coord>());
  }
  return p;
}

inline void parse_points(std::string_view value, int line, int dim, std::vector<std::pair<Point, Rational>>& out) {
  for (auto entry : split(value, ';')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) parse_fail(line, "expected '<point>: <weight>' in '" + std::string(entry) + "'");
    Point pt = parse_point(entry.substr(0, colon), line);
    if (static_cast<int>(pt.size()) != dim) {
      parse_fail(line, "point has " + std::to_string(pt.size()) + " coordinates, dim is " + std::to_string(dim));
    }
    const auto w = parse_exact(entry.substr(colon + 1));
    if (!w) parse_fail(line, "bad weight '" + std::string(trim(entry.substr(colon + 1))) + "'");
    for (const auto& [q, _] : out) {
      if (q == pt) parse_fail(line, "duplicate support point");
    }
    out.emplace_back(std::move(pt), *w);
  }
}

inline bool parse_bool(std::string_view v, int line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  parse_fail(line, "expected true/false, got '" + std::string(v) + "'");
}

inline int parse_int(std::string_view v, int line, const char* key) {
  const auto i = detail::parse_integer(v);
  if (!i || *i > 1000000 || *i < -1000000) parse_fail(line, std::string("bad integer for ") + key);
  return i->convert_to<int>();
}

}  // namespace detail

inline WalkConfig parse_walk_config(std::istream& in) {
  WalkConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = detail::trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) detail::parse_fail(line, "expected 'key = value'");
    const auto key = detail::trim(s.substr(0, eq));
    const auto value = detail::trim(s.substr(eq + 1));
    if (key == "dim") {
      if (cfg.dim != 0) detail::parse_fail(line, "dim given twice");
      cfg.dim = detail::parse_int(value, line, "dim");
      if (cfg.dim < 1) detail::parse_fail(line, "dim must be >= 1");
    } else if (key == "name") {
      cfg.name = std::string(value);
    } else if (key == "unperturbed") {
      cfg.unperturbed = detail::parse_bool(value, line);
    } else if (key == "order") {
      cfg.order = detail::parse_int(value, line, "order");
    } else if (key == "p" || key == "q") {
      if (cfg.dim == 0) detail::parse_fail(line, "dim must precede support points");
      detail::parse_points(value, line, cfg.dim, key == "p" ? cfg.p : cfg.q);
    } else {
      detail::parse_fail(line, "unknown key '" + std::string(key) + "'");
    }
  }
  if (cfg.dim == 0) detail::parse_fail(line, "missing dim");
  if (cfg.p.empty()) detail::parse_fail(line, "missing p");
  if (cfg.q.empty()) cfg.q = cfg.p;
  return cfg;
}

inline WalkConfig parse_walk_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_walk_config(in);
}

inline WalkConfig load_walk_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kParse, "cannot open '" + path + "'");
  try {
    return parse_walk_config(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
  }
}

inline WalkSpec make_walk_spec(const WalkConfig& cfg) {
  const auto p = LatticeFunction<Rational>::from_points(cfg.p);
  const auto q = LatticeFunction<Rational>::from_points(cfg.q);
  return validate_walk_spec(p, q, WalkOptions{.unperturbed = cfg.unperturbed, .order = cfg.order});
}

inline WalkSpec load_walk_spec(const std::string& path) { return make_walk_spec(load_walk_config(path)); }

}  // namespace pwalk
