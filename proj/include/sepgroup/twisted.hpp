#ifndef SEPGROUP_TWISTED_HPP
#define SEPGROUP_TWISTED_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/group_core.hpp>
#include <sepgroup/lattice.hpp>
#include <sepgroup/stage_group.hpp>

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

struct twisted_report {
  std::size_t relations = 0;
  std::size_t relations_zero = 0;   // twisted relators expand to 0
  std::size_t h_matches = 0;        // h(twisted relator) = untwisted relator
  hom_report hom;                   // h kills twisted relators in G
  bool surjective = false;
  std::vector<generator> kernel;    // basis elements sent to 0
  bool kernel_pure = false;

  bool ok() const {
    return relations_zero == relations && h_matches == relations && hom.ok() && surjective &&
           kernel == std::vector<generator>{generator::w()} && kernel_pure;
  }
};

/*
 * Stage of the twisted group H: the presentation of G with the relators
 * psi(n) Z(n+1) - Z(n) - sum a X - c(n) W, together with h: H -> G
 * (X -> X, Z -> Z, W -> 0). X, Z and W stand for the hatted generators.
 */
class twisted_stage {
 public:
  twisted_stage(const group_config& cfg, coloring c, const ordinal& alpha, std::size_t depth,
                const std::set<ordinal>& extra_x = {})
      : untwisted_(cfg, alpha, depth, extra_x), colors_(std::move(c)) {
    for (const auto& d : untwisted_.deltas())
      if (colors_.depth(d) < depth)
        throw depth_error("build_twisted: coloring on " + d.str() + " covers " +
                          std::to_string(colors_.depth(d)) + " of " + std::to_string(depth) +
                          " relations");
    for (const auto& d : untwisted_.deltas())
      for (std::size_t n = 0; n < depth; ++n)
        relations_.push_back(formal_relation(config(), d, n, &colors_));
    basis_.push_back(generator::w());
    for (const auto& g : untwisted_.basis()) basis_.push_back(g);
    h_.set(generator::w(), free_element{});
    for (const auto& g : untwisted_.generators()) h_.set(g, g);
  }

  const group_config& config() const noexcept { return untwisted_.config(); }
  const coloring& colors() const noexcept { return colors_; }
  std::size_t depth() const noexcept { return untwisted_.depth(); }
  const stage_group& target() const noexcept { return untwisted_; }
  const std::vector<free_element>& relations() const noexcept { return relations_; }
  const std::vector<generator>& basis() const noexcept { return basis_; }
  const generator_map& h() const noexcept { return h_; }

  free_element expand(const free_element& e) const { return expand_formal(config(), e, &colors_); }
  free_element rewrite(const free_element& e) const {
    return stage_rewrite(config(), depth(), e, &colors_);
  }
  membership_result member(const free_element& e) const {
    return membership(config(), depth(), e, &colors_);
  }

  twisted_report verify() const {
    twisted_report r;
    const auto& cfg = config();
    std::size_t i = 0;
    for (const auto& d : untwisted_.deltas())
      for (std::size_t n = 0; n < depth(); ++n, ++i) {
        ++r.relations;
        if (expand(relations_[i]).is_zero()) ++r.relations_zero;
        if (h_.apply(relations_[i]) == formal_relation(cfg, d, n)) ++r.h_matches;
      }
    r.hom = verify_hom(h_, relations_, untwisted_.evaluator());

    std::map<generator, std::size_t> col;
    for (std::size_t j = 0; j < untwisted_.basis().size(); ++j) col[untwisted_.basis()[j]] = j;
    int_matrix nonzero_rows;
    bool integral = true;
    for (const auto& g : basis_) {
      const free_element coords = untwisted_.rewrite(h_.image(g));
      if (coords.is_zero()) {
        r.kernel.push_back(g);
        continue;
      }
      std::vector<integer> row(col.size(), 0);
      for (const auto& [gen, c] : coords.terms()) {
        if (c.get_den() != 1) integral = false;
        row[col.at(gen)] = c.get_num();
      }
      nonzero_rows.push_back(std::move(row));
    }
    r.surjective = integral && nonzero_rows.size() == col.size() &&
                   abs(determinant(nonzero_rows)) == 1;
    // The kernel line inside the stage coordinates of H.
    std::map<generator, std::size_t> hcol;
    for (std::size_t j = 0; j < basis_.size(); ++j) hcol[basis_[j]] = j;
    int_matrix kernel_rows;
    for (const auto& g : r.kernel) {
      std::vector<integer> row(basis_.size(), 0);
      const free_element coords = rewrite(g);
      for (const auto& [gen, c] : coords.terms()) row[hcol.at(gen)] = c.get_num();
      kernel_rows.push_back(std::move(row));
    }
    r.kernel_pure = !kernel_rows.empty() && is_saturated(kernel_rows) &&
                    !member(free_element(generator::w(), rational(1, 2))).in_group;
    return r;
  }

 private:
  stage_group untwisted_;
  coloring colors_;
  std::vector<free_element> relations_;
  std::vector<generator> basis_;
  generator_map h_;
};

inline twisted_stage build_twisted(const group_config& cfg, const coloring& c,
                                   const ordinal& alpha, std::size_t depth,
                                   const std::set<ordinal>& extra_x = {}) {
  return twisted_stage(cfg, c, alpha, depth, extra_x);
}

/*
 * Primitive a with a . b = 0. For b = 0 this is e_0; otherwise, with i the
 * first nonzero entry and j the first other index, a_i = b_j / g and
 * a_j = -b_i / g where g = gcd(b_i, b_j).
 */
inline std::vector<integer> choose_annihilator(const std::vector<integer>& b) {
  const std::size_t t = b.size();
  if (t == 0) throw validation_error("choose_annihilator: empty vector");
  std::vector<integer> a(t, 0);
  std::size_t i = 0;
  while (i < t && b[i] == 0) ++i;
  if (i == t) {
    a[0] = 1;
    return a;
  }
  if (t == 1)
    throw validation_error("choose_annihilator: a single nonzero entry has no primitive annihilator");
  const std::size_t j = i == 0 ? 1 : 0;
  integer g;
  mpz_gcd(g.get_mpz_t(), b[i].get_mpz_t(), b[j].get_mpz_t());
  a[i] = b[j] / g;
  a[j] = -b[i] / g;
  return a;
}

/// Section f: G -> H, f(x) = X + e W and f(z_{delta,n}) = Z + d_n W.
struct section {
  std::map<ordinal, integer> x_offsets;
  std::map<ordinal, std::vector<integer>> z_offsets;

  generator_map map(const stage_group& g) const {
    generator_map f;
    for (const auto& b : g.explored_x()) {
      free_element img = generator::x(b);
      auto it = x_offsets.find(b);
      if (it != x_offsets.end()) img.add(generator::w(), rational(it->second));
      f.set(generator::x(b), std::move(img));
    }
    for (const auto& [d, ds] : z_offsets)
      for (std::size_t n = 0; n < ds.size(); ++n) {
        free_element img = generator::z(d, n);
        img.add(generator::w(), rational(ds[n]));
        f.set(generator::z(d, n), std::move(img));
      }
    return f;
  }
};

/// f respects the relations of G inside H and h o f is the identity.
inline bool verify_section(const twisted_stage& ts, const section& s) {
  const auto& g = ts.target();
  const generator_map f = s.map(g);
  for (const auto& gen : g.generators())
    if (!f.defined_on(gen) || ts.h().apply(f.image(gen)) != free_element(gen)) return false;
  return verify_hom(f, g.relations(), [&](const free_element& e) { return ts.expand(e); }).ok();
}

struct split_result {
  integer bound;
  bool found = false;
  std::optional<section> witness;  // for pair searches, the first stage's section
  std::optional<section> witness_b;
  std::size_t nodes = 0;
  std::map<ordinal, std::size_t> deepest;  // longest partial chain per delta
  std::optional<ordinal> stuck;            // a delta with no chain in range
};

namespace detail {

/// Candidates -B..B in the order 0, -1, 1, -2, 2, ...
inline std::vector<integer> search_range(const integer& bound) {
  std::vector<integer> out{0};
  for (integer k = 1; k <= bound; ++k) {
    out.push_back(-k);
    out.push_back(k);
  }
  return out;
}

/// sum_l a_l e_{nu(k_n + l)}
inline integer block_offset(const group_config& cfg, const ordinal& d, std::size_t n,
                            const std::map<ordinal, integer>& e) {
  const auto& l = cfg.system.at(d);
  const auto& av = cfg.a(d, n);
  integer s = 0;
  for (std::size_t i = 0; i < l.block_size(n); ++i) {
    auto it = e.find(l.at(n, i));
    if (it != e.end()) s += av[i] * it->second;
  }
  return s;
}

/*
 * Depth-first enumeration of d_{n+1} in range subject to
 * psi(n) d_{n+1} = d_n + s_n - c(n). Every candidate is tried, none is solved
 * for, so the node count certifies the size of the explored space.
 */
inline bool chain_dfs(const twisted_stage& ts, const ordinal& d,
                      const std::map<ordinal, integer>& e, const std::vector<integer>& range,
                      std::vector<integer>& chain, std::size_t& nodes, std::size_t& deepest) {
  const std::size_t n = chain.size() - 1;
  deepest = std::max(deepest, n);
  if (n == ts.depth()) return true;
  const auto& cfg = ts.config();
  const integer target = chain[n] + block_offset(cfg, d, n, e) - ts.colors().at(d, n);
  const integer p = cfg.psi(n);
  for (const auto& cand : range) {
    ++nodes;
    if (p * cand != target) continue;
    chain.push_back(cand);
    if (chain_dfs(ts, d, e, range, chain, nodes, deepest)) return true;
    chain.pop_back();
  }
  return false;
}

}  // namespace detail

/// Bounded search for a section with the given x-lift offsets.
inline split_result splitting_search(const twisted_stage& ts, const integer& bound,
                                     const std::map<ordinal, integer>& x_offsets = {}) {
  split_result r;
  r.bound = bound;
  const auto range = detail::search_range(bound);
  section s{x_offsets, {}};
  for (const auto& d : ts.target().deltas()) {
    std::size_t deepest = 0;
    bool ok = false;
    for (const auto& d0 : range) {
      std::vector<integer> chain{d0};
      ++r.nodes;
      if (detail::chain_dfs(ts, d, x_offsets, range, chain, r.nodes, deepest)) {
        s.z_offsets[d] = chain;
        ok = true;
        break;
      }
    }
    r.deepest[d] = deepest;
    if (!ok) {
      r.stuck = d;
      return r;
    }
  }
  if (!verify_section(ts, s))
    throw validation_error("splitting_search: chain solution fails section verification");
  r.found = true;
  r.witness = std::move(s);
  return r;
}

/// Joint search on two twisted stages over one G with a shared x-lift and a
/// shared initial offset d_0 per delta.
inline split_result splitting_search_pair(const twisted_stage& a, const twisted_stage& b,
                                          const integer& bound,
                                          const std::map<ordinal, integer>& x_offsets = {}) {
  if (a.target().deltas() != b.target().deltas() || a.depth() != b.depth())
    throw validation_error("splitting_search_pair: stages do not share a presentation");
  split_result r;
  r.bound = bound;
  const auto range = detail::search_range(bound);
  section sa{x_offsets, {}}, sb{x_offsets, {}};
  for (const auto& d : a.target().deltas()) {
    std::size_t deepest = 0;
    bool ok = false;
    for (const auto& d0 : range) {
      std::vector<integer> ca{d0}, cb{d0};
      ++r.nodes;
      std::size_t da = 0, db = 0;
      const bool fa = detail::chain_dfs(a, d, x_offsets, range, ca, r.nodes, da);
      const bool fb = fa && detail::chain_dfs(b, d, x_offsets, range, cb, r.nodes, db);
      deepest = std::max(deepest, fa ? db : da);
      if (fa && fb) {
        sa.z_offsets[d] = ca;
        sb.z_offsets[d] = cb;
        ok = true;
        break;
      }
    }
    r.deepest[d] = deepest;
    if (!ok) {
      r.stuck = d;
      return r;
    }
  }
  if (!verify_section(a, sa) || !verify_section(b, sb))
    throw validation_error("splitting_search_pair: chain solution fails section verification");
  r.found = true;
  r.witness = std::move(sa);
  r.witness_b = std::move(sb);
  return r;
}

enum class obstruction_verdict { obstructed, inconclusive, not_obstructed };

inline const char* to_string(obstruction_verdict v) {
  switch (v) {
    case obstruction_verdict::obstructed: return "OBSTRUCTED";
    case obstruction_verdict::inconclusive: return "INCONCLUSIVE";
    case obstruction_verdict::not_obstructed: return "NOT_OBSTRUCTED";
  }
  return "?";
}

struct trace_step {
  std::size_t n = 0;
  integer psi;
  rational difference;  // d1_n - d2_n forced by the subtracted recurrences
  bool integral = true;
};

struct cross_check {
  integer bound;
  bool pair_found = false;
  std::size_t nodes = 0;
};

struct obstruction_report {
  obstruction_verdict verdict = obstruction_verdict::not_obstructed;
  std::optional<ordinal> delta;
  std::size_t n_star = 0;
  integer psi_n_star = 0;
  integer rhs = 0;  // psi(n*) Delta = rhs
  std::string witness;
  std::vector<trace_step> trace;
  bool annihilated = true;
  bool primitive = true;
  std::vector<cross_check> cross;
  bool agrees = true;  // brute force matches the algebraic verdict
};

/// Shared x-lift e_{nu(k_n + i)} = b^{delta,n}_i (b cycled per delta as a
/// block pattern).
inline std::map<ordinal, integer> lift_from_b(
    const group_config& cfg, std::size_t depth,
    const std::map<ordinal, std::vector<std::vector<integer>>>& b) {
  std::map<ordinal, integer> e;
  for (const auto& [d, pattern] : b) {
    if (!cfg.system.contains(d) || pattern.empty()) continue;
    const auto l = cfg.system.at(d).with_blocks(depth);
    for (std::size_t n = 0; n < depth; ++n) {
      const auto& bv = pattern[n % pattern.size()];
      for (std::size_t i = 0; i < l.block_size(n) && i < bv.size(); ++i) e[l.at(n, i)] = bv[i];
    }
  }
  return e;
}

/*
 * Two colorings on one presentation, equal below n*. Subtracting the chain
 * recurrences of two sections with a shared x-lift and shared d_0 gives
 * Delta_n = 0 for n <= n* and psi(n*) Delta_{n*+1} = -(c1(n*) - c2(n*)), which
 * has no integer solution unless psi(n*) divides the color difference.
 */
inline obstruction_report parity_obstruction(
    const group_config& cfg, const coloring& c1, const coloring& c2, const ordinal& alpha,
    std::size_t depth, const std::map<ordinal, std::vector<std::vector<integer>>>& b = {},
    const std::vector<integer>& bounds = {1, 5, 25}) {
  obstruction_report r;
  for (const auto& [d, pattern] : b) {
    if (!cfg.system.contains(d)) continue;
    for (std::size_t n = 0; n < pattern.size(); ++n) {
      const auto& av = cfg.a(d, n);
      const auto& bv = pattern[n];
      if (av.size() != bv.size())
        throw validation_error("parity_obstruction: b-data length mismatch on " + d.str());
      integer dot = 0;
      for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
      if (dot != 0) r.annihilated = false;
      if (gcd_of(av) != 1) r.primitive = false;
    }
  }
  if (!r.annihilated)
    throw validation_error("parity_obstruction: coefficients do not annihilate the b-data");

  const twisted_stage t1(cfg, c1, alpha, depth);
  const twisted_stage t2(cfg, c2, alpha, depth);
  std::optional<std::size_t> first;
  for (const auto& d : t1.target().deltas())
    for (std::size_t n = 0; n < depth; ++n)
      if (c1.at(d, n) != c2.at(d, n)) {
        if (!first || n < *first) {
          first = n;
          r.delta = d;
        }
        break;
      }

  if (first) {
    const std::size_t ns = *first;
    r.n_star = ns;
    r.psi_n_star = cfg.psi(ns);
    for (std::size_t n = 0; n <= ns; ++n) r.trace.push_back({n, cfg.psi(n), rational(0), true});
    r.rhs = -(c1.at(*r.delta, ns) - c2.at(*r.delta, ns));
    rational last(r.rhs, r.psi_n_star);
    last.canonicalize();
    r.trace.push_back({ns + 1, r.psi_n_star, last, last.get_den() == 1});
    r.witness = r.psi_n_star.get_str() + "*Delta = " + r.rhs.get_str();
    r.verdict = mpz_divisible_p(r.rhs.get_mpz_t(), r.psi_n_star.get_mpz_t())
                    ? obstruction_verdict::inconclusive
                    : obstruction_verdict::obstructed;
  }

  const auto lift = lift_from_b(t1.config(), depth, b);
  for (const auto& bound : bounds) {
    const auto s = splitting_search_pair(t1, t2, bound, lift);
    r.cross.push_back({bound, s.found, s.nodes});
    if (r.verdict == obstruction_verdict::obstructed && s.found) r.agrees = false;
  }
  return r;
}

}  // namespace sepg

#endif  // SEPGROUP_TWISTED_HPP
