#ifndef SEPGROUP_FILTRATION_EQUIV_HPP
#define SEPGROUP_FILTRATION_EQUIV_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/group_core.hpp>
#include <sepgroup/ladder.hpp>
#include <sepgroup/lattice.hpp>
#include <sepgroup/stage_group.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

struct disjointification {
  std::map<ordinal, std::size_t> m;
  bool certified = false;              // tails pairwise disjoint on explored prefixes
  bool expanded_certified = false;     // same for the per-index value sets
  std::map<ordinal, bool> tight;       // lowering m_delta by one breaks disjointness
  std::vector<std::string> notes;

  std::size_t at(const ordinal& delta) const {
    auto it = m.find(delta);
    if (it == m.end()) throw scope_error("disjointification: no entry for " + delta.str());
    return it->second;
  }
};

namespace detail {

/// Pairwise disjointness of the tail sets; `expanded` compares entry values
/// instead of block omega-values.
inline bool tails_disjoint(const ladder_system& sys, const std::map<ordinal, std::size_t>& m,
                           bool expanded) {
  std::map<ordinal, ordinal> owner;
  for (const auto& [d, l] : sys.ladders()) {
    std::set<ordinal> mine;
    for (std::size_t n = m.at(d); n < l.blocks(); ++n) {
      if (expanded) {
        for (std::size_t i = 0; i < l.block_size(n); ++i) mine.insert(l.at(n, i));
      } else {
        mine.insert(l.at(n, 0) + ordinal::omega());
      }
    }
    for (const auto& v : mine) {
      auto [it, inserted] = owner.emplace(v, d);
      if (!inserted && it->second != d) return false;
    }
  }
  return true;
}

}  // namespace detail

/*
 * m_delta = max over delta' < delta in S of the first block index n with
 * eta_delta(k_n) >= delta'. From there on the blocks of eta_delta sit above
 * every ladder on a smaller delta'.
 */
inline disjointification disjointify(const ladder_system& sys) {
  for (const auto& [d, l] : sys.ladders()) {
    auto rep = validate_special(l);
    if (!rep.ok())
      throw validation_error("disjointify: invalid ladder on " + d.str() + "\n" + rep.summary());
  }
  disjointification out;
  const auto ds = sys.deltas();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::size_t mi = 0;
    for (std::size_t j = 0; j < i; ++j)
      mi = std::max(mi, first_index_reaching(sys.at(ds[i]), ds[j]));
    out.m[ds[i]] = mi;
    if (mi > sys.at(ds[i]).blocks())
      out.notes.push_back("m for " + ds[i].str() + " = " + std::to_string(mi) +
                          " lies beyond the explored prefix");
  }
  out.certified = detail::tails_disjoint(sys, out.m, false);
  out.expanded_certified = detail::tails_disjoint(sys, out.m, true);
  for (const auto& d : ds) {
    if (out.m[d] == 0) {
      out.tight[d] = true;
      continue;
    }
    auto lowered = out.m;
    --lowered[d];
    out.tight[d] = !detail::tails_disjoint(sys, lowered, false);
  }
  return out;
}

struct overlap_violation {
  ordinal delta_a, delta_b;
  std::size_t block_a = 0, block_b = 0;
  ordinal value;
};

struct overlap_report {
  std::size_t coincidences = 0;
  std::vector<overlap_violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Every tail coincidence eta_delta(k_n+j) = nu_delta'(k_m+i) must have
/// delta = delta' and n = m.
inline overlap_report overlap_check(const ladder_system& a, const ladder_system& b,
                                    const disjointification& d) {
  std::string why;
  if (!same_omega_range(a, b, &why))
    throw validation_error("overlap_check: rd mismatch: " + why);
  std::map<ordinal, std::vector<std::pair<ordinal, std::size_t>>> b_tail;
  for (const auto& [delta, l] : b.ladders())
    for (std::size_t m = d.at(delta); m < l.blocks(); ++m)
      for (std::size_t i = 0; i < l.block_size(m); ++i) b_tail[l.at(m, i)].push_back({delta, m});
  overlap_report rep;
  for (const auto& [delta, l] : a.ladders())
    for (std::size_t n = d.at(delta); n < l.blocks(); ++n)
      for (std::size_t j = 0; j < l.block_size(n); ++j) {
        auto it = b_tail.find(l.at(n, j));
        if (it == b_tail.end()) continue;
        for (const auto& [delta_b, m] : it->second) {
          ++rep.coincidences;
          if (delta_b != delta || m != n)
            rep.violations.push_back({delta, delta_b, n, m, l.at(n, j)});
        }
      }
  return rep;
}

/// A pair of stages over a common set of explored x's, as needed for maps
/// between them.
struct stage_pair {
  stage_group src;
  stage_group dst;
};

inline std::set<ordinal> ladder_values(const ladder_system& sys, std::size_t depth) {
  std::set<ordinal> out;
  const ladder_system deep = sys.with_blocks(depth);
  for (const auto& [d, l] : deep.ladders())
    for (std::size_t i = 0; i < l.size(); ++i) out.insert(l.entry(i));
  return out;
}

inline stage_pair build_stage_pair(const group_config& src, const group_config& dst,
                                   const ordinal& alpha, std::size_t depth,
                                   std::set<ordinal> extra_x = {}) {
  for (const auto& v : ladder_values(src.system.restricted(alpha), depth)) extra_x.insert(v);
  for (const auto& v : ladder_values(dst.system.restricted(alpha), depth)) extra_x.insert(v);
  return {stage_group(src, alpha, depth, extra_x), stage_group(dst, alpha, depth, extra_x)};
}

/// Change of basis used when the leading coefficient of a dst block is not 1.
struct basis_change {
  ordinal delta;
  std::size_t block = 0;
  int_matrix matrix;  // first row is the coefficient vector
};

struct level_iso {
  generator_map map;
  std::vector<basis_change> normalizations;
};

namespace detail {

inline void assign_clause(generator_map& m, const generator& g, free_element img) {
  if (m.defined_on(g)) {
    if (m.image(g) == img) return;
    throw validation_error("level_iso_build: conflicting clauses for " + g.str() + ": " +
                           m.image(g).str() + " vs " + img.str());
  }
  m.set(g, std::move(img));
}

inline free_element row_element(const std::vector<integer>& row,
                                const std::vector<ordinal>& xs) {
  free_element e;
  for (std::size_t l = 0; l < row.size(); ++l) e.add(generator::x(xs[l]), rational(row[l]));
  return e;
}

}  // namespace detail

/*
 * The level-preserving isomorphism pi-hat from a simple source stage onto
 * dst. For n >= m_delta:
 *
 *   x_{eta(n)}    -> sum_l a_l x_{nu(k_n+l)}
 *   x_{nu(k_n)}   -> x_{eta(n)}            (when eta(n) != nu(k_n))
 *   z_{delta,n}   -> w_{delta,n}
 *
 * every other x is fixed, and z_{delta,n} for n < m_delta is backfilled by
 * psi(n) pi(z_{n+1}) - pi(x_{eta(n)}). When a_0 != 1 the block x's other than
 * the leading one go to the remaining rows of a unimodular completion of a.
 */
inline level_iso level_iso_build(const stage_group& src, const stage_group& dst,
                                 const disjointification& d) {
  const auto& sc = src.config();
  const auto& dc = dst.config();
  if (src.depth() != dst.depth())
    throw validation_error("level_iso_build: stages have different depths");
  if (src.explored_x() != dst.explored_x())
    throw validation_error("level_iso_build: stages explore different x's");
  if (sc.system.deltas() != dc.system.deltas())
    throw validation_error("level_iso_build: stages have different deltas");
  std::string why;
  if (!same_omega_range(sc.system, dc.system, &why))
    throw validation_error("level_iso_build: rd mismatch: " + why);

  const std::size_t N = src.depth();
  level_iso out;
  generator_map& pi = out.map;

  for (const auto& delta : sc.system.deltas()) {
    const auto& eta = sc.system.at(delta);
    const auto& nu = dc.system.at(delta);
    for (std::size_t n = 0; n < eta.blocks(); ++n)
      if (eta.block_size(n) != 1 || eta.block_start(n) != n || sc.a(delta, n) != std::vector<integer>{1})
        throw validation_error("level_iso_build: source ladder on " + delta.str() +
                               " is not of the simple form at block " + std::to_string(n));
    const std::size_t md = d.at(delta);
    if (md > N)
      throw depth_error("level_iso_build: m for " + delta.str() + " is " +
                        std::to_string(md) + " but the stage depth is " + std::to_string(N));

    for (std::size_t n = md; n < N; ++n) {
      const ordinal& e = eta.at(n, 0);
      const auto& av = dc.a(delta, n);
      std::vector<ordinal> block;
      for (std::size_t l = 0; l < nu.block_size(n); ++l) block.push_back(nu.at(n, l));
      const free_element v = block_combination(dc, delta, n);
      const auto pos = std::find(block.begin(), block.end(), e);

      detail::assign_clause(pi, generator::x(e), v);
      if (av[0] == 1) {
        if (pos == block.end() || pos != block.begin())
          detail::assign_clause(pi, generator::x(block[0]), generator::x(e));
        continue;
      }
      const int_matrix u = unimodular_completion(av);
      out.normalizations.push_back({delta, n, u});
      std::vector<ordinal> rest;
      if (pos == block.end()) {
        detail::assign_clause(pi, generator::x(block[0]), generator::x(e));
        rest.assign(block.begin() + 1, block.end());
      } else {
        for (const auto& b : block)
          if (b != e) rest.push_back(b);
      }
      for (std::size_t r = 0; r < rest.size(); ++r)
        detail::assign_clause(pi, generator::x(rest[r]), detail::row_element(u[r + 1], block));
    }
    for (std::size_t n = md; n <= N; ++n)
      detail::assign_clause(pi, generator::z(delta, n), generator::z(delta, n));
  }
  for (const auto& b : src.explored_x())
    if (!pi.defined_on(generator::x(b))) pi.set(generator::x(b), generator::x(b));

  for (const auto& delta : sc.system.deltas()) {
    const auto& eta = sc.system.at(delta);
    for (std::size_t n = d.at(delta); n-- > 0;) {
      free_element img = rational(sc.psi(n)) * pi.image(generator::z(delta, n + 1));
      img -= pi.image(generator::x(eta.at(n, 0)));
      pi.set(generator::z(delta, n), std::move(img));
    }
  }
  return out;
}

struct level_check {
  ordinal mu;
  bool images_inside = false;
  bool square = false;
  bool unimodular = false;
  std::string detail;
  bool ok() const noexcept { return images_inside && square && unimodular; }
};

struct level_iso_report {
  hom_report hom;
  std::vector<generator> rows, columns;  // src basis, dst basis
  int_matrix matrix;                     // dst coordinates of the images
  bool integral = false;
  std::optional<integer> det;
  std::vector<level_check> levels;

  bool invertible() const { return integral && det && abs(*det) == 1; }
  bool levels_ok() const {
    return std::all_of(levels.begin(), levels.end(), [](const auto& l) { return l.ok(); });
  }
  bool ok() const { return hom.ok() && invertible() && levels_ok(); }
  std::vector<ordinal> failing_levels() const {
    std::vector<ordinal> out;
    for (const auto& l : levels)
      if (!l.ok()) out.push_back(l.mu);
    return out;
  }
};

inline level_iso_report level_iso_verify(const generator_map& map, const stage_group& src,
                                         const stage_group& dst) {
  level_iso_report rep;
  rep.hom = verify_hom(map, src.relations(), dst.evaluator());
  rep.rows = src.basis();
  rep.columns = dst.basis();
  std::map<generator, std::size_t> col;
  for (std::size_t j = 0; j < rep.columns.size(); ++j) col[rep.columns[j]] = j;

  rep.integral = true;
  for (const auto& g : rep.rows) {
    std::vector<integer> row(rep.columns.size(), 0);
    const free_element coords = dst.rewrite(map.image(g));
    for (const auto& [h, c] : coords.terms()) {
      auto it = col.find(h);
      if (it == col.end() || c.get_den() != 1) {
        rep.integral = false;
        continue;
      }
      row[it->second] = c.get_num();
    }
    rep.matrix.push_back(std::move(row));
  }
  if (rep.integral && rep.rows.size() == rep.columns.size()) rep.det = determinant(rep.matrix);

  std::set<ordinal> mus;
  for (const auto& m : explored_levels(src)) mus.insert(m);
  for (const auto& m : explored_levels(dst)) mus.insert(m);
  for (const auto& mu : mus) {
    level_check lc{mu, false, false, false, {}};
    std::vector<std::size_t> rs, cs;
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
      if (generator_level(rep.rows[i]) <= mu) rs.push_back(i);
    for (std::size_t j = 0; j < rep.columns.size(); ++j)
      if (generator_level(rep.columns[j]) <= mu) cs.push_back(j);
    lc.images_inside = rep.integral;
    for (auto i : rs)
      for (std::size_t j = 0; j < rep.columns.size(); ++j)
        if (rep.matrix[i][j] != 0 && !(generator_level(rep.columns[j]) <= mu)) {
          lc.images_inside = false;
          lc.detail = "image of " + rep.rows[i].str() + " leaves level " + mu.str() +
                      " through " + rep.columns[j].str();
        }
    lc.square = rs.size() == cs.size();
    if (lc.square && lc.images_inside) {
      int_matrix sub;
      for (auto i : rs) {
        std::vector<integer> r;
        for (auto j : cs) r.push_back(rep.matrix[i][j]);
        sub.push_back(std::move(r));
      }
      lc.unimodular = abs(determinant(sub)) == 1;
      if (!lc.unimodular) lc.detail = "images do not generate level " + mu.str();
    } else if (!lc.square && lc.detail.empty()) {
      lc.detail = "level " + mu.str() + " has " + std::to_string(rs.size()) +
                  " source and " + std::to_string(cs.size()) + " target basis elements";
    }
    rep.levels.push_back(std::move(lc));
  }
  return rep;
}

/// Extends a map given on the stage basis of `sg` to every stage generator
/// through the basis coordinates.
inline generator_map complete_on_stage(const generator_map& on_basis, const stage_group& sg) {
  generator_map out;
  for (const auto& g : sg.generators()) out.set(g, on_basis.apply(sg.rewrite(g)));
  return out;
}

/// Inverse of a verified map, defined on every generator of dst.
inline generator_map invert_on_stage(const level_iso_report& rep, const stage_group& dst) {
  if (!rep.invertible())
    throw validation_error("invert_on_stage: map is not invertible on the stage basis");
  const auto inv = integer_inverse(rep.matrix);
  if (!inv) throw validation_error("invert_on_stage: no integral inverse");
  generator_map on_basis;
  for (std::size_t j = 0; j < rep.columns.size(); ++j) {
    free_element img;
    for (std::size_t i = 0; i < rep.rows.size(); ++i)
      img.add(rep.rows[i], rational((*inv)[j][i]));
    on_basis.set(rep.columns[j], std::move(img));
  }
  return complete_on_stage(on_basis, dst);
}

}  // namespace sepg

#endif  // SEPGROUP_FILTRATION_EQUIV_HPP
