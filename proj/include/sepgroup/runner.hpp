#ifndef SEPGROUP_RUNNER_HPP
#define SEPGROUP_RUNNER_HPP

#include <sepgroup.hpp>
#include <sepgroup/scenario.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

struct run_options {
  std::optional<std::size_t> depth;
  std::optional<ordinal> stage;
  std::uint64_t seed = 1;
  std::optional<integer> bound;
  std::set<std::string> kinds;  // empty: every check
};

/// Module exercised by each check kind.
inline const std::map<std::string, std::string>& check_modules() {
  static const std::map<std::string, std::string> m{
      {"validate", "ladder"},         {"sweep", "group_core"},
      {"membership", "group_core"},   {"build", "group_construction"},
      {"project", "group_construction"}, {"freeness", "group_construction"},
      {"equiv", "filtration_equiv"},  {"uniformize", "whitehead"},
      {"extend", "whitehead"},        {"twisted", "whitehead"},
      {"split", "whitehead"},         {"obstruct", "whitehead"},
      {"annihilator", "whitehead"}};
  return m;
}

/// Check kinds run by each CLI verb.
inline std::set<std::string> verb_kinds(const std::string& verb) {
  if (verb == "validate") return {"validate"};
  if (verb == "build") return {"sweep", "membership", "build", "freeness"};
  if (verb == "project") return {"project"};
  if (verb == "equiv") return {"equiv"};
  if (verb == "uniformize") return {"uniformize"};
  if (verb == "extend") return {"extend"};
  if (verb == "obstruct") return {"twisted", "split", "obstruct", "annihilator"};
  if (verb == "run") return {};
  throw parse_error("unknown verb '" + verb + "'");
}

namespace runner_detail {

inline json str_list(const std::vector<generator>& gs) {
  json out = json::array();
  for (const auto& g : gs) out.push_back(g.str());
  return out;
}

inline json int_json(const integer& v) { return v.get_str(); }

inline json matrix_json(const int_matrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.get_str());
    out.push_back(std::move(r));
  }
  return out;
}

struct context {
  const scenario& sc;
  const run_options& opt;
  const json& check;

  std::string str(const char* key) const {
    if (!check.contains(key) || !check.at(key).is_string())
      throw parse_error("check '" + name() + "': missing string field '" + key + "'");
    return check.at(key).get<std::string>();
  }
  std::string name() const { return check.at("name").get<std::string>(); }
  const group_config& config(const char* key = "config") const { return sc.configs.at(str(key)); }
  const coloring& colors(const char* key = "coloring") const { return sc.colorings.at(str(key)); }

  std::size_t depth() const {
    if (opt.depth) return *opt.depth;
    if (check.contains("depth"))
      return scenario_detail::to_size(check.at("depth"), "check " + name() + "/depth");
    if (sc.depth) return *sc.depth;
    if (const char* env = std::getenv("SEPG_DEPTH")) {
      const std::string v(env);
      if (!v.empty() && v.find_first_not_of("0123456789") == std::string::npos)
        return std::stoul(v);
    }
    return 6;
  }
  ordinal alpha(const ladder_system& sys) const {
    if (opt.stage) return *opt.stage;
    if (check.contains("alpha"))
      return scenario_detail::to_ordinal(check.at("alpha"), "check " + name() + "/alpha");
    if (sc.alpha) return *sc.alpha;
    return sys.alpha();
  }
  integer bound() const {
    if (opt.bound) return *opt.bound;
    if (check.contains("bound")) return scenario_detail::to_integer(check.at("bound"), "bound");
    return 5;
  }
};

inline json run_validate(const context& cx) {
  const ladder_system& sys = cx.sc.systems.at(cx.str("system"));
  json out;
  json ladders = json::array();
  bool ok = true;
  for (const auto& [d, l] : sys.ladders()) {
    const auto rep = validate_special(l);
    json lj{{"delta", d.str()}, {"ok", rep.ok()}, {"blocks", l.blocks()}};
    json errs = json::array(), warns = json::array();
    for (const auto& v : rep.errors) errs.push_back(v.clause + "@" + std::to_string(v.index) + ": " + v.detail);
    for (const auto& v : rep.warnings) warns.push_back(v.clause + "@" + std::to_string(v.index) + ": " + v.detail);
    lj["errors"] = errs;
    lj["warnings"] = warns;
    if (rep.ok()) {
      json rd = json::array();
      for (const auto& b : compute_omega_range(l).blocks) rd.push_back(b.str());
      lj["rd"] = rd;
    }
    ok &= rep.ok();
    ladders.push_back(std::move(lj));
  }
  const auto tl = is_tree_like(sys);
  out["ladders"] = ladders;
  out["tree_like"] = tl.tree_like;
  if (!tl.tree_like) out["tree_like_reason"] = tl.reason;
  if (cx.check.contains("companion")) {
    std::string why;
    const bool same = same_omega_range(sys, cx.sc.systems.at(cx.str("companion")), &why);
    out["same_rd"] = same;
    if (!same) out["rd_difference"] = why;
    ok &= same;
  }
  out["passed"] = ok;
  return out;
}

/// Randomized relation identity suite over simple, paired and rule ladders.
inline json run_sweep(const context& cx) {
  std::size_t count = cx.check.value("count", 50);
  const std::size_t max_depth = cx.check.value("max_depth", 12);
  std::mt19937_64 rng(cx.opt.seed);
  const std::vector<ordinal> deltas{ordinal::parse("w^2*1"), ordinal::parse("w^2*2"),
                                    ordinal::parse("w^3*1")};
  std::size_t relations = 0, zero = 0, configs = 0;
  json failures = json::array();
  for (std::size_t it = 0; it < count; ++it) {
    const std::size_t depth = 1 + rng() % max_depth;
    const std::size_t t = 1 + rng() % 4;
    ladder_system sys(ordinal::parse("w^3*2"));
    std::map<ordinal, std::vector<std::vector<integer>>> coeffs;
    for (const auto& d : deltas) {
      if (rng() % 3 == 0) continue;
      auto simple = make_simple_special(d, depth);
      std::vector<std::uint64_t> offs;
      for (std::size_t i = 0; i < t; ++i) offs.push_back(i + 1);
      affine_rule rule = *simple.rule();
      rule.offsets = {offs};
      sys.add(special_ladder::from_rule(d, rule, depth));
      std::vector<integer> a;
      do {
        a.clear();
        for (std::size_t i = 0; i < t; ++i) a.push_back(integer(static_cast<long>(rng() % 11) - 5));
      } while (gcd_of(a) != 1);
      coeffs[d] = {a};
    }
    group_config cfg{sys, psi_function::factorial(), coeffs};
    cfg.validate();
    ++configs;
    for (const auto& d : sys.deltas())
      for (std::size_t n = 0; n < depth; ++n) {
        ++relations;
        if (relation_element(cfg, d, n).is_zero()) ++zero;
        else if (failures.size() < 5)
          failures.push_back(d.str() + " n=" + std::to_string(n));
      }
  }
  return {{"configs", configs}, {"relations", relations}, {"zero", zero},
          {"failures", failures}, {"seed", cx.opt.seed}, {"passed", zero == relations}};
}

inline json run_build(const context& cx) {
  const auto& cfg = cx.config();
  const stage_group sg(cfg, cx.alpha(cfg.system), cx.depth());
  json rel = json::array();
  for (const auto& r : sg.relations()) rel.push_back(r.str() + " = 0");
  json levels = json::array();
  bool pure = true;
  std::size_t prev = 0;
  bool monotone = true;
  for (const auto& mu : explored_levels(sg)) {
    const auto f = filtration_subgroup(sg, mu);
    pure &= f.pure;
    monotone &= f.basis.size() >= prev;
    prev = f.basis.size();
    levels.push_back({{"mu", mu.str()}, {"basis", str_list(f.basis)}, {"pure", f.pure}});
  }
  return {{"alpha", sg.alpha().str()}, {"depth", sg.depth()}, {"relations", rel},
          {"basis", str_list(sg.basis())}, {"levels", levels}, {"monotone", monotone},
          {"identities_zero", true}, {"passed", pure && monotone}};
}

inline json run_membership(const context& cx) {
  const auto& cfg = cx.config();
  const stage_group sg(cfg, cx.alpha(cfg.system), cx.depth());
  json items = json::array();
  bool ok = true;
  for (const auto& e : cx.check.at("elements")) {
    free_element el;
    for (const auto& term : e.at("terms")) {
      const generator g = scenario_detail::to_generator(term.at(0), "term");
      rational c(term.at(1).get<std::string>());
      c.canonicalize();
      el.add(g, c);
    }
    const auto m = sg.member(el);
    json ij{{"element", el.str()}, {"in_group", m.in_group},
            {"pure_multiple", m.pure_multiple->get_str()}, {"coordinates", m.coordinates.str()}};
    if (e.contains("expect_in_group")) ok &= e.at("expect_in_group").get<bool>() == m.in_group;
    items.push_back(std::move(ij));
  }
  return {{"elements", items}, {"passed", ok}};
}

inline json run_project(const context& cx) {
  const auto& cfg = cx.config();
  const stage_group sg(cfg, cx.alpha(cfg.system), cx.depth());
  json out = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < cx.check.at("nus").size(); ++i) {
    const ordinal nu = scenario_detail::to_ordinal(cx.check.at("nus")[i], "nus/" + std::to_string(i));
    const auto p = projection(sg, nu);
    const auto& r = p.report;
    json cut;
    for (const auto& [d, c] : r.cutoff) cut[d.str()] = c;
    json images;
    for (const auto& [g, img] : p.map.images())
      if (g.is_z()) images[g.str()] = img.str();
    out.push_back({{"nu", nu.str()},
                   {"relations_killed", std::to_string(r.relations_killed) + "/" + std::to_string(r.relations_checked)},
                   {"identity", std::to_string(r.identity_ok) + "/" + std::to_string(r.identity_checked)},
                   {"image", std::to_string(r.image_ok) + "/" + std::to_string(r.image_checked)},
                   {"idempotence", std::to_string(r.idempotence_ok) + "/" + std::to_string(r.idempotence_checked)},
                   {"cutoff", cut}, {"z_images", images}, {"notes", r.notes}, {"ok", r.ok()}});
    ok &= r.ok();
  }
  return {{"projections", out}, {"passed", ok}};
}

inline json run_freeness(const context& cx) {
  const auto& cfg = cx.config();
  const stage_group sg(cfg, cx.alpha(cfg.system), cx.depth());
  json out = json::array();
  bool ok = true;
  const json& sets = cx.check.at("sets");
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<generator> T;
    for (std::size_t k = 0; k < sets[i].size(); ++k)
      T.push_back(scenario_detail::to_generator(sets[i][k], "sets/" + std::to_string(i)));
    const auto r = freeness_basis(sg, T);
    out.push_back({{"T", str_list(T)}, {"basis", str_list(r.basis)}, {"integral", r.integral},
                   {"independent", r.independent}, {"pure", r.pure}});
    ok &= r.ok();
  }
  return {{"sets", out}, {"passed", ok}};
}

inline json iso_json(const level_iso& iso, const level_iso_report& rep, const ordinal& alpha) {
  json levels = json::array();
  for (const auto& l : rep.levels)
    levels.push_back({{"mu", l.mu.str()}, {"ok", l.ok()}, {"detail", l.detail}});
  json norms = json::array();
  for (const auto& n : iso.normalizations)
    norms.push_back({{"delta", n.delta.str()}, {"block", n.block}, {"matrix", matrix_json(n.matrix)}});
  return {{"alpha", alpha.str()},
          {"relations_preserved", std::to_string(rep.hom.checked - rep.hom.failures.size()) + "/" +
                                      std::to_string(rep.hom.checked)},
          {"rows", str_list(rep.rows)},
          {"columns", str_list(rep.columns)},
          {"matrix", matrix_json(rep.matrix)},
          {"determinant", rep.det ? rep.det->get_str() : "none"},
          {"levels", levels},
          {"normalizations", norms},
          {"ok", rep.ok()}};
}

inline json run_equiv(const context& cx) {
  const auto& src = cx.config("src");
  const auto& dst = cx.config("dst");
  const ordinal alpha = cx.alpha(src.system);
  const std::size_t depth = cx.depth();
  const auto dsys = src.system.restricted(alpha).with_blocks(depth);
  const auto d = disjointify(dsys);
  const auto ov = overlap_check(dsys, dst.system.restricted(alpha).with_blocks(depth), d);
  json mj, tight;
  for (const auto& [delta, m] : d.m) mj[delta.str()] = m;
  for (const auto& [delta, t] : d.tight) tight[delta.str()] = t;
  json out{{"disjointification", {{"m", mj}, {"certified", d.certified},
                                   {"expanded_certified", d.expanded_certified},
                                   {"tight", tight}, {"notes", d.notes}}},
           {"overlap", {{"coincidences", ov.coincidences}, {"violations", ov.violations.size()}}}};
  bool ok = d.certified && d.expanded_certified && ov.ok();

  std::set<ordinal> stages{alpha};
  for (const auto& delta : src.system.restricted(alpha).deltas()) stages.insert(delta + ordinal::finite(1));
  json sj = json::array();
  for (const auto& a : stages) {
    const auto pair = build_stage_pair(src, dst, a, depth);
    const auto iso = level_iso_build(pair.src, pair.dst, d);
    const auto rep = level_iso_verify(iso.map, pair.src, pair.dst);
    ok &= rep.ok();
    sj.push_back(iso_json(iso, rep, a));
  }
  out["stages"] = sj;

  if (cx.check.contains("via")) {
    // dst -> src -> via, through the inverse of the first isomorphism.
    const auto& via = cx.config("via");
    std::set<ordinal> xs = ladder_values(via.system.restricted(alpha), depth);
    const auto p1 = build_stage_pair(src, dst, alpha, depth, xs);
    const auto p2 = build_stage_pair(src, via, alpha, depth, p1.src.explored_x());
    const auto i1 = level_iso_build(p1.src, p1.dst, d);
    const auto r1 = level_iso_verify(i1.map, p1.src, p1.dst);
    const auto i2 = level_iso_build(p2.src, p2.dst, d);
    const auto composed = compose(i2.map, invert_on_stage(r1, p1.dst));
    const auto rc = level_iso_verify(composed, p1.dst, p2.dst);
    out["transitivity"] = iso_json(level_iso{composed, {}}, rc, alpha);
    ok &= rc.ok();
  }
  out["passed"] = ok;
  return out;
}

inline json uniformization_json(const uniformization_data& u) {
  json ps, psi;
  for (const auto& [d, s] : u.psi_star) ps[d.str()] = s;
  for (const auto& [b, c] : u.psi) psi[b.str()] = c.get_str();
  return {{"psi_star", ps}, {"psi", psi}, {"default_color", u.default_color.get_str()}};
}

inline json run_uniformize(const context& cx) {
  const ladder_system& sys0 =
      cx.check.contains("system") ? cx.sc.systems.at(cx.str("system")) : cx.config().system;
  const auto sys = sys0.restricted(cx.alpha(sys0));
  const auto& c = cx.colors();
  const auto d = disjointify(sys);
  const auto u = greedy_uniformize(sys, c, d);
  return {{"uniformization", uniformization_json(u)}, {"passed", !check_uniformizes(sys, c, u)}};
}

template <class G>
json extension_json(const extension_result<G>& r) {
  json images, cases;
  for (const auto& [g, v] : r.images) images[g.str()] = G::str(v);
  for (const auto& [d, cs] : r.cases) cases[d.str()] = cs;
  json fails = json::array();
  for (const auto& [d, n] : r.failures) fails.push_back("g(" + d.str() + "," + std::to_string(n) + ")");
  return {{"images", images}, {"cases", cases}, {"checked", r.checked}, {"failures", fails}};
}

inline json run_extend(const context& cx) {
  const auto& cfg = cx.config();
  const stage_group sg(cfg, cx.alpha(cfg.system), cx.depth());
  const std::size_t N = sg.depth();
  const auto d = disjointify(sg.config().system);
  const std::string group = cx.check.value("group", std::string("Z"));
  json out;
  bool ok = true;
  if (group == "Z") {
    relation_values<integer_group> phi;
    for (const auto& e : cx.check.at("phi")) {
      const ordinal delta = scenario_detail::to_ordinal(e.at("delta"), "phi/delta");
      const auto vals = scenario_detail::to_integers(e.at("values"), "phi/values");
      if (vals.empty()) throw parse_error("phi/values: empty");
      for (std::size_t n = 0; n < N; ++n) phi[delta].push_back(vals[n % vals.size()]);
    }
    const auto c = induced_coloring<integer_group>(phi);
    const auto u = greedy_uniformize(sg.config().system, c, d);
    const auto r = extend_hom<integer_group>(sg, phi, u);
    out["uniformization"] = uniformization_json(u);
    out["extension"] = extension_json(r);
    ok = r.ok();
  } else if (group == "marked") {
    const auto& col = cx.colors();
    const auto phi = marked_phi(col, N);
    const auto c = induced_coloring<marked_free_sum>(phi);
    const auto u = greedy_uniformize(sg.config().system, c, d);
    const auto r = extend_hom<marked_free_sum>(sg, phi, u);
    out["extension"] = extension_json(r);
    ok = r.ok();
    if (cx.check.value("recover", false)) {
      const auto rec = recover_uniformization(sg, col, r);
      std::size_t tails = 0, matched = 0;
      for (const auto& [delta, l] : sg.config().system.ladders()) {
        const std::size_t top = std::min({l.size(), col.depth(delta), 2 * N});
        for (std::size_t k = rec.data.psi_star.at(delta); k < top; ++k) {
          ++tails;
          if (rec.data.color_of(l.entry(k)) == col.at(delta, k)) ++matched;
        }
      }
      json certs = json::array();
      for (const auto& c2 : rec.certificates)
        certs.push_back({{"delta", c2.delta.str()}, {"gamma", c2.gamma.str()}, {"index", c2.index},
                         {"relation", c2.relation}, {"ok", c2.ok()}});
      out["recovery"] = {{"uniformization", uniformization_json(rec.data)},
                         {"certificates", certs},
                         {"tail_colors", std::to_string(matched) + "/" + std::to_string(tails)}};
      ok &= rec.ok() && matched == tails;
    }
  } else {
    throw parse_error("check '" + cx.name() + "': unknown group '" + group + "'");
  }
  out["passed"] = ok;
  return out;
}

inline json run_twisted(const context& cx) {
  const auto& cfg = cx.config();
  const auto ts = build_twisted(cfg, cx.colors(), cx.alpha(cfg.system), cx.depth());
  const auto r = ts.verify();
  json rel = json::array();
  for (const auto& e : ts.relations()) rel.push_back(e.str() + " = 0");
  return {{"relations", rel},
          {"relations_zero", std::to_string(r.relations_zero) + "/" + std::to_string(r.relations)},
          {"h_matches", std::to_string(r.h_matches) + "/" + std::to_string(r.relations)},
          {"h_hom", r.hom.ok()},
          {"surjective", r.surjective},
          {"kernel", str_list(r.kernel)},
          {"kernel_pure", r.kernel_pure},
          {"passed", r.ok()}};
}

inline json section_json(const section& s) {
  json z;
  for (const auto& [d, ds] : s.z_offsets) {
    json v = json::array();
    for (const auto& x : ds) v.push_back(x.get_str());
    z[d.str()] = v;
  }
  return {{"z_offsets", z}};
}

inline json split_json(const split_result& r) {
  json out{{"bound", r.bound.get_str()}, {"found", r.found}, {"nodes", r.nodes}};
  json deep;
  for (const auto& [d, n] : r.deepest) deep[d.str()] = n;
  out["deepest"] = deep;
  if (r.stuck) out["stuck"] = r.stuck->str();
  if (r.witness) out["section"] = section_json(*r.witness);
  if (r.witness_b) out["section_b"] = section_json(*r.witness_b);
  return out;
}

inline json run_split(const context& cx) {
  const auto& cfg = cx.config();
  const auto ts = build_twisted(cfg, cx.colors(), cx.alpha(cfg.system), cx.depth());
  const auto r = splitting_search(ts, cx.bound());
  json out = split_json(r);
  const std::string expect = cx.check.value("expect", std::string("found"));
  out["passed"] = (expect == "found") == r.found;
  return out;
}

inline std::map<ordinal, std::vector<std::vector<integer>>> b_data(const json& j) {
  std::map<ordinal, std::vector<std::vector<integer>>> b;
  for (const auto& e : j) {
    const ordinal d = scenario_detail::to_ordinal(e.at("delta"), "b/delta");
    b[d] = scenario_detail::to_integer_rows(e.at("blocks"), "b/blocks");
  }
  return b;
}

inline json run_obstruct(const context& cx) {
  const auto& cfg = cx.config();
  std::vector<integer> bounds{1, 5, 25};
  if (cx.check.contains("bounds")) bounds = scenario_detail::to_integers(cx.check.at("bounds"), "bounds");
  if (cx.opt.bound) bounds.push_back(*cx.opt.bound);
  const auto b = cx.check.contains("b") ? b_data(cx.check.at("b"))
                                        : std::map<ordinal, std::vector<std::vector<integer>>>{};
  const auto r = parity_obstruction(cfg, cx.colors("c1"), cx.colors("c2"), cx.alpha(cfg.system),
                                    cx.depth(), b, bounds);
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"n", t.n}, {"psi", t.psi.get_str()}, {"difference", t.difference.get_str()},
                     {"integral", t.integral}});
  json cross = json::array();
  for (const auto& c : r.cross)
    cross.push_back({{"bound", c.bound.get_str()}, {"pair_found", c.pair_found}, {"nodes", c.nodes}});
  json out{{"verdict", to_string(r.verdict)}, {"n_star", r.n_star},
           {"psi_n_star", r.psi_n_star.get_str()}, {"witness", r.witness},
           {"trace", trace}, {"annihilated", r.annihilated}, {"primitive", r.primitive},
           {"cross_validation", cross}, {"agrees", r.agrees}};
  if (r.delta) out["delta"] = r.delta->str();
  const std::string expect = cx.check.value("expect", std::string(to_string(r.verdict)));
  out["passed"] = r.agrees && expect == to_string(r.verdict);
  return out;
}

inline json run_annihilator(const context& cx) {
  const auto b = scenario_detail::to_integers(cx.check.at("b"), "b");
  const auto a = choose_annihilator(b);
  integer dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  json aj = json::array();
  for (const auto& v : a) aj.push_back(v.get_str());
  return {{"a", aj}, {"dot", dot.get_str()}, {"gcd", gcd_of(a).get_str()},
          {"passed", dot == 0 && gcd_of(a) == 1}};
}

inline json dispatch(const context& cx) {
  const std::string kind = cx.check.at("kind").get<std::string>();
  if (kind == "validate") return run_validate(cx);
  if (kind == "sweep") return run_sweep(cx);
  if (kind == "membership") return run_membership(cx);
  if (kind == "build") return run_build(cx);
  if (kind == "project") return run_project(cx);
  if (kind == "freeness") return run_freeness(cx);
  if (kind == "equiv") return run_equiv(cx);
  if (kind == "uniformize") return run_uniformize(cx);
  if (kind == "extend") return run_extend(cx);
  if (kind == "twisted") return run_twisted(cx);
  if (kind == "split") return run_split(cx);
  if (kind == "obstruct") return run_obstruct(cx);
  if (kind == "annihilator") return run_annihilator(cx);
  throw parse_error("check '" + cx.name() + "': unknown kind '" + kind + "'");
}

}  // namespace runner_detail

/*
 * Runs the selected checks in declaration order. A check with
 * "expect": "error" passes exactly when it raises a library error.
 */
inline json run_scenario(const scenario& sc, const run_options& opt = {}) {
  json checks = json::array();
  bool all = true;
  std::string first_failure;
  for (const auto& c : sc.checks) {
    const std::string kind = c.at("kind").get<std::string>();
    if (!opt.kinds.empty() && !opt.kinds.count(kind)) continue;
    runner_detail::context cx{sc, opt, c};
    const bool expect_error = c.contains("expect") && c.at("expect") == "error";
    json r;
    try {
      r = runner_detail::dispatch(cx);
      if (expect_error) r["passed"] = false;
    } catch (const parse_error&) {
      throw;
    } catch (const error& e) {
      r = {{"error", e.what()}, {"passed", expect_error}};
    } catch (const json::exception& e) {
      throw parse_error("check '" + cx.name() + "': " + e.what());
    }
    r["name"] = cx.name();
    r["kind"] = kind;
    r["module"] = check_modules().count(kind) ? check_modules().at(kind) : "cli";
    const bool passed = r.at("passed").get<bool>();
    if (!passed && all) {
      all = false;
      first_failure = "check '" + cx.name() + "' failed" +
                      (r.contains("error") ? ": " + r.at("error").get<std::string>() : "");
    }
    checks.push_back(std::move(r));
  }
  json out{{"scenario", sc.name}, {"checks", checks}, {"passed", all}, {"seed", opt.seed}};
  out["summary"] = all ? std::to_string(checks.size()) + " check(s) passed" : first_failure;
  return out;
}

inline std::string render_text(const json& report) {
  std::ostringstream os;
  os << "scenario " << report.at("scenario").get<std::string>() << "\n";
  for (const auto& c : report.at("checks")) {
    os << (c.at("passed").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>()
       << " [" << c.at("kind").get<std::string>() << "]\n";
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (it.key() == "name" || it.key() == "kind" || it.key() == "passed") continue;
      os << "  " << it.key() << ": " << it.value().dump() << "\n";
    }
  }
  os << (report.at("passed").get<bool>() ? "PASS" : "FAIL") << ": "
     << report.at("summary").get<std::string>() << "\n";
  return os.str();
}

}  // namespace sepg

#endif  // SEPGROUP_RUNNER_HPP
