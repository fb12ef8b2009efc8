#ifndef SEPGROUP_SCENARIO_HPP
#define SEPGROUP_SCENARIO_HPP

#include <sepgroup.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

using json = nlohmann::json;

/*
 * Scenario files are JSON:
 *
 *   name, alpha, depth                 defaults for every check
 *   systems:   name -> { alpha, ladders: [ladder] }
 *                   | { alpha, companion_of, block_sizes }
 *   configs:   name -> { system, psi, preset | coeffs | annihilate }
 *   colorings: name -> [ { delta, colors } ] | { palette, entries }
 *   checks:    [ { name, kind, ...parameters, expect? } ]
 *
 * A ladder is { delta, simple: true } | { delta, rule: {base, step,
 * offsets} } | { delta, blocks: [[ordinal...]...] }, with optional explore
 * (number of blocks generated for rule-backed ladders).
 */
struct scenario {
  std::string name;
  std::optional<ordinal> alpha;
  std::optional<std::size_t> depth;
  std::map<std::string, ladder_system> systems;
  std::map<std::string, group_config> configs;
  std::map<std::string, coloring> colorings;
  json checks = json::array();
};

namespace scenario_detail {

inline std::string at_path(const std::string& path, const std::string& msg) {
  return path + ": " + msg;
}

inline const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw parse_error(at_path(path, std::string("missing field '") + key + "'"));
  return j.at(key);
}

inline ordinal to_ordinal(const json& j, const std::string& path) {
  if (!j.is_string()) throw parse_error(at_path(path, "ordinal literal must be a string"));
  try {
    return ordinal::parse(j.get<std::string>());
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
}

inline integer to_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return integer(j.dump());
  if (j.is_string()) {
    integer v;
    if (v.set_str(j.get<std::string>(), 10) != 0)
      throw parse_error(at_path(path, "malformed integer '" + j.get<std::string>() + "'"));
    return v;
  }
  throw parse_error(at_path(path, "expected an integer"));
}

inline std::size_t to_size(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw parse_error(at_path(path, "expected a natural number"));
  return j.get<std::size_t>();
}

inline std::vector<integer> to_integers(const json& j, const std::string& path) {
  if (!j.is_array()) throw parse_error(at_path(path, "expected an array of integers"));
  std::vector<integer> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(to_integer(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::vector<std::vector<integer>> to_integer_rows(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw parse_error(at_path(path, "expected a nonempty array of integer arrays"));
  std::vector<std::vector<integer>> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(to_integers(j[i], path + "/" + std::to_string(i)));
  return out;
}

/// "X(<ordinal>)", "Z(<ordinal>,n)", "Y(<ordinal>,n)" or "W".
inline generator to_generator(const json& j, const std::string& path) {
  if (!j.is_string()) throw parse_error(at_path(path, "generator must be a string"));
  const std::string s = j.get<std::string>();
  if (s == "W") return generator::w();
  if (s.size() < 4 || s[1] != '(' || s.back() != ')')
    throw parse_error(at_path(path, "malformed generator '" + s + "'"));
  const std::string inner = s.substr(2, s.size() - 3);
  try {
    if (s[0] == 'X') return generator::x(ordinal::parse(inner));
    const auto comma = inner.rfind(',');
    if (comma == std::string::npos || (s[0] != 'Z' && s[0] != 'Y'))
      throw parse_error("malformed generator '" + s + "'");
    const ordinal d = ordinal::parse(inner.substr(0, comma));
    const std::string n = inner.substr(comma + 1);
    if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos)
      throw parse_error("malformed index in '" + s + "'");
    const std::uint64_t k = std::stoull(n);
    return s[0] == 'Z' ? generator::z(d, k) : generator::y(d, k);
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
}

inline special_ladder to_ladder(const json& j, const std::string& path,
                                std::size_t default_explore) {
  const ordinal delta = to_ordinal(field(j, "delta", path), path + "/delta");
  const std::size_t explore =
      j.contains("explore") ? to_size(j.at("explore"), path + "/explore") : default_explore;
  try {
    if (j.contains("simple")) return make_simple_special(delta, explore);
    if (j.contains("rule")) {
      const json& r = j.at("rule");
      const std::string rp = path + "/rule";
      affine_rule rule{to_ordinal(field(r, "base", rp), rp + "/base"),
                       static_cast<unsigned>(to_size(field(r, "step", rp), rp + "/step")),
                       {}};
      const json& offs = field(r, "offsets", rp);
      if (!offs.is_array() || offs.empty())
        throw parse_error(at_path(rp + "/offsets", "expected a nonempty array"));
      for (std::size_t i = 0; i < offs.size(); ++i) {
        std::vector<std::uint64_t> row;
        if (!offs[i].is_array() || offs[i].empty())
          throw parse_error(at_path(rp + "/offsets/" + std::to_string(i), "expected a nonempty array"));
        for (std::size_t k = 0; k < offs[i].size(); ++k)
          row.push_back(to_size(offs[i][k], rp + "/offsets/" + std::to_string(i) + "/" + std::to_string(k)));
        rule.offsets.push_back(std::move(row));
      }
      return special_ladder::from_rule(delta, rule, explore);
    }
    if (j.contains("blocks")) {
      const json& bs = j.at("blocks");
      if (!bs.is_array()) throw parse_error(at_path(path + "/blocks", "expected an array"));
      std::vector<ordinal> entries;
      std::vector<std::size_t> ks{0};
      for (std::size_t n = 0; n < bs.size(); ++n) {
        const std::string bp = path + "/blocks/" + std::to_string(n);
        if (!bs[n].is_array() || bs[n].empty())
          throw parse_error(at_path(bp, "expected a nonempty array of ordinals"));
        for (std::size_t i = 0; i < bs[n].size(); ++i)
          entries.push_back(to_ordinal(bs[n][i], bp + "/" + std::to_string(i)));
        ks.push_back(entries.size());
      }
      return special_ladder(delta, std::move(entries), std::move(ks));
    }
  } catch (const parse_error&) {
    throw;
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
  throw parse_error(at_path(path, "ladder needs one of 'simple', 'rule', 'blocks'"));
}

inline ladder_system to_system(const json& j, const std::string& path,
                               const std::map<std::string, ladder_system>& known,
                               std::size_t default_explore) {
  const ordinal alpha = to_ordinal(field(j, "alpha", path), path + "/alpha");
  ladder_system sys(alpha);
  try {
    if (j.contains("companion_of")) {
      const std::string src = field(j, "companion_of", path).get<std::string>();
      auto it = known.find(src);
      if (it == known.end())
        throw parse_error(at_path(path + "/companion_of", "unknown system '" + src + "'"));
      std::vector<std::size_t> sizes;
      const json& bs = field(j, "block_sizes", path);
      if (!bs.is_array()) throw parse_error(at_path(path + "/block_sizes", "expected an array"));
      for (std::size_t i = 0; i < bs.size(); ++i)
        sizes.push_back(to_size(bs[i], path + "/block_sizes/" + std::to_string(i)));
      for (const auto& [d, l] : it->second.ladders())
        if (d < alpha) sys.add(companion_same_rd(l, sizes));
      return sys;
    }
    const json& ls = field(j, "ladders", path);
    if (!ls.is_array()) throw parse_error(at_path(path + "/ladders", "expected an array"));
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const std::string lp = path + "/ladders/" + std::to_string(i);
      auto l = to_ladder(ls[i], lp, default_explore);
      try {
        sys.add(std::move(l));
      } catch (const error& e) {
        throw parse_error(at_path(lp, e.what()));
      }
    }
  } catch (const parse_error&) {
    throw;
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
  return sys;
}

inline group_config to_config(const json& j, const std::string& path,
                              const std::map<std::string, ladder_system>& systems) {
  const json& sname = field(j, "system", path);
  if (!sname.is_string()) throw parse_error(at_path(path + "/system", "expected a system name"));
  auto it = systems.find(sname.get<std::string>());
  if (it == systems.end())
    throw parse_error(at_path(path + "/system", "unknown system '" + sname.get<std::string>() + "'"));
  group_config cfg{it->second, psi_function::factorial(), {}};
  if (j.contains("psi")) {
    const json& p = j.at("psi");
    if (p.is_string() && p.get<std::string>() == "factorial") {
    } else if (p.is_array()) {
      cfg.psi = psi_function::table(to_integers(p, path + "/psi"));
    } else {
      throw parse_error(at_path(path + "/psi", "expected \"factorial\" or an integer table"));
    }
  }
  std::vector<std::vector<integer>> pattern;
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").is_string() ? j.at("preset").get<std::string>() : "";
    if (preset == "example14i") pattern = {{1, -1}};
    else if (preset == "example14ii") pattern = {{1}};
    else throw parse_error(at_path(path + "/preset", "unknown preset '" + j.at("preset").dump() + "'"));
  } else if (j.contains("annihilate")) {
    try {
      pattern = {choose_annihilator(to_integers(j.at("annihilate"), path + "/annihilate"))};
    } catch (const parse_error&) {
      throw;
    } catch (const error& e) {
      throw parse_error(at_path(path + "/annihilate", e.what()));
    }
  } else if (j.contains("coeffs")) {
    const json& c = j.at("coeffs");
    if (c.is_object()) {
      for (const auto& d : cfg.system.deltas())
        if (!c.contains(d.str()))
          throw parse_error(at_path(path + "/coeffs", "no coefficients for " + d.str()));
      for (auto cit = c.begin(); cit != c.end(); ++cit) {
        const ordinal d = to_ordinal(json(cit.key()), path + "/coeffs");
        cfg.coefficients[d] = to_integer_rows(cit.value(), path + "/coeffs/" + cit.key());
      }
    } else {
      pattern = to_integer_rows(c, path + "/coeffs");
    }
  } else {
    throw parse_error(at_path(path, "config needs one of 'preset', 'coeffs', 'annihilate'"));
  }
  if (!pattern.empty())
    for (const auto& d : cfg.system.deltas()) cfg.coefficients[d] = pattern;
  try {
    cfg.validate();
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
  return cfg;
}

inline std::vector<integer> to_colors(const json& j, const std::string& path) {
  if (j.is_array()) return to_integers(j, path);
  if (j.is_object() && j.contains("pattern")) {
    const auto pat = to_integers(j.at("pattern"), path + "/pattern");
    const std::size_t len = to_size(field(j, "length", path), path + "/length");
    if (pat.empty()) throw parse_error(at_path(path + "/pattern", "empty pattern"));
    std::vector<integer> out;
    for (std::size_t i = 0; i < len; ++i) out.push_back(pat[i % pat.size()]);
    if (j.contains("set")) {
      const json& s = j.at("set");
      if (!s.is_object()) throw parse_error(at_path(path + "/set", "expected an object"));
      for (auto it = s.begin(); it != s.end(); ++it) {
        const std::size_t idx = std::stoul(it.key());
        if (idx >= len) throw parse_error(at_path(path + "/set", "index outside length"));
        out[idx] = to_integer(it.value(), path + "/set/" + it.key());
      }
    }
    return out;
  }
  throw parse_error(at_path(path, "colors must be an array or {pattern, length}"));
}

inline coloring to_coloring(const json& j, const std::string& path) {
  coloring c;
  const json* entries = &j;
  std::string ep = path;
  if (j.is_object()) {
    if (j.contains("palette")) c.palette = to_integer(j.at("palette"), path + "/palette");
    entries = &field(j, "entries", path);
    ep = path + "/entries";
  }
  if (!entries->is_array()) throw parse_error(at_path(ep, "expected a list of {delta, colors}"));
  for (std::size_t i = 0; i < entries->size(); ++i) {
    const std::string p = ep + "/" + std::to_string(i);
    const ordinal d = to_ordinal(field((*entries)[i], "delta", p), p + "/delta");
    c.colors[d] = to_colors(field((*entries)[i], "colors", p), p + "/colors");
  }
  try {
    c.validate();
  } catch (const error& e) {
    throw parse_error(at_path(path, e.what()));
  }
  return c;
}

}  // namespace scenario_detail

inline scenario parse_scenario(const json& j) {
  using namespace scenario_detail;
  if (!j.is_object()) throw parse_error("/: scenario must be a JSON object");
  scenario s;
  s.name = j.contains("name") && j.at("name").is_string() ? j.at("name").get<std::string>() : "";
  if (j.contains("alpha")) s.alpha = to_ordinal(j.at("alpha"), "/alpha");
  if (j.contains("depth")) s.depth = to_size(j.at("depth"), "/depth");
  const std::size_t explore = s.depth.value_or(8);
  if (j.contains("systems")) {
    const json& sys = j.at("systems");
    if (!sys.is_object()) throw parse_error("/systems: expected an object");
    // Companion systems refer to earlier ones; resolve plain systems first.
    for (int pass = 0; pass < 2; ++pass)
      for (auto it = sys.begin(); it != sys.end(); ++it) {
        const bool companion = it.value().contains("companion_of");
        if ((pass == 0) == companion) continue;
        s.systems.emplace(it.key(), to_system(it.value(), "/systems/" + it.key(), s.systems, explore));
      }
  }
  if (j.contains("configs")) {
    const json& cs = j.at("configs");
    if (!cs.is_object()) throw parse_error("/configs: expected an object");
    for (auto it = cs.begin(); it != cs.end(); ++it)
      s.configs.emplace(it.key(), to_config(it.value(), "/configs/" + it.key(), s.systems));
  }
  if (j.contains("colorings")) {
    const json& cs = j.at("colorings");
    if (!cs.is_object()) throw parse_error("/colorings: expected an object");
    for (auto it = cs.begin(); it != cs.end(); ++it)
      s.colorings.emplace(it.key(), to_coloring(it.value(), "/colorings/" + it.key()));
  }
  if (j.contains("checks")) {
    if (!j.at("checks").is_array()) throw parse_error("/checks: expected an array");
    s.checks = j.at("checks");
    std::set<std::string> names;
    for (std::size_t i = 0; i < s.checks.size(); ++i) {
      const std::string p = "/checks/" + std::to_string(i);
      const json& c = s.checks[i];
      if (!field(c, "name", p).is_string() || !field(c, "kind", p).is_string())
        throw parse_error(p + ": name and kind must be strings");
      if (!names.insert(c.at("name").get<std::string>()).second)
        throw parse_error(p + ": duplicate check name '" + c.at("name").get<std::string>() + "'");
      for (const char* ref : {"system"})
        if (c.contains(ref) && !s.systems.count(c.at(ref).get<std::string>()))
          throw parse_error(p + "/" + ref + ": unknown system '" + c.at(ref).get<std::string>() + "'");
      for (const char* ref : {"config", "src", "dst", "via"})
        if (c.contains(ref) && !s.configs.count(c.at(ref).get<std::string>()))
          throw parse_error(p + "/" + ref + ": unknown config '" + c.at(ref).get<std::string>() + "'");
      for (const char* ref : {"coloring", "c1", "c2"})
        if (c.contains(ref) && !s.colorings.count(c.at(ref).get<std::string>()))
          throw parse_error(p + "/" + ref + ": unknown coloring '" + c.at(ref).get<std::string>() + "'");
    }
  }
  return s;
}

inline scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path + ": cannot open scenario file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(path + ": " + e.what());
  }
  try {
    return parse_scenario(j);
  } catch (const json::exception& e) {
    throw parse_error(path + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw parse_error(path + ": malformed value (" + std::string(e.what()) + ")");
  }
}

}  // namespace sepg

#endif  // SEPGROUP_SCENARIO_HPP
