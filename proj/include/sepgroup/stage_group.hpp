#ifndef SEPGROUP_STAGE_GROUP_HPP
#define SEPGROUP_STAGE_GROUP_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/group_core.hpp>
#include <sepgroup/ladder.hpp>
#include <sepgroup/lattice.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

/*
 * Truncated presentation of G^alpha at depth N.
 *
 * Generators: X(beta) for the explored x's (ladder entries below k_N plus any
 * extra x's), Z(delta,n) for delta in S cap alpha and n <= N. Relations are
 * the formal g_{delta,n}, n < N. The stage basis is {Z(delta,N)} u {X}.
 */
class stage_group {
 public:
  stage_group(const group_config& cfg, ordinal alpha, std::size_t depth,
              const std::set<ordinal>& extra_x = {})
      : alpha_(std::move(alpha)), depth_(depth) {
    cfg_.system = cfg.system.restricted(alpha_).with_blocks(depth);
    cfg_.psi = cfg.psi;
    for (const auto& d : cfg_.system.deltas()) {
      auto it = cfg.coefficients.find(d);
      if (it == cfg.coefficients.end())
        throw validation_error("build_stage: no coefficients for " + d.str());
      cfg_.coefficients[d] = it->second;
    }
    cfg_.validate();

    const ordinal x_bound = alpha_ + ordinal::omega();
    for (const auto& [d, l] : cfg_.system.ladders())
      for (std::size_t i = 0; i < l.size(); ++i) explored_x_.insert(l.entry(i));
    for (const auto& b : extra_x)
      if (b < x_bound) explored_x_.insert(b);

    for (const auto& d : cfg_.system.deltas()) {
      for (std::size_t n = 0; n < depth_; ++n) {
        relations_.push_back(formal_relation(cfg_, d, n));
        if (!relation_element(cfg_, d, n).is_zero())
          throw validation_error("build_stage: relation identity failed for " +
                                 d.str() + " n=" + std::to_string(n));
      }
      for (std::size_t n = 0; n <= depth_; ++n) generators_.push_back(generator::z(d, n));
      basis_.push_back(generator::z(d, depth_));
    }
    for (const auto& b : explored_x_) {
      generators_.push_back(generator::x(b));
      basis_.push_back(generator::x(b));
    }
  }

  const group_config& config() const noexcept { return cfg_; }
  const ordinal& alpha() const noexcept { return alpha_; }
  std::size_t depth() const noexcept { return depth_; }
  const std::set<ordinal>& explored_x() const noexcept { return explored_x_; }
  const std::vector<free_element>& relations() const noexcept { return relations_; }
  const std::vector<generator>& generators() const noexcept { return generators_; }
  const std::vector<generator>& basis() const noexcept { return basis_; }
  std::vector<ordinal> deltas() const { return cfg_.system.deltas(); }

  free_element expand(const free_element& e) const { return expand_formal(cfg_, e); }
  free_element rewrite(const free_element& e) const {
    return stage_rewrite(cfg_, depth_, e);
  }
  membership_result member(const free_element& e) const {
    return membership(cfg_, depth_, e);
  }

  /// Normalizer that evaluates formal images inside this group's ambient
  /// module.
  element_normalizer evaluator() const {
    return [this](const free_element& e) { return expand(e); };
  }

 private:
  group_config cfg_;
  ordinal alpha_;
  std::size_t depth_;
  std::set<ordinal> explored_x_;
  std::vector<free_element> relations_;
  std::vector<generator> generators_;
  std::vector<generator> basis_;
};

inline stage_group build_stage(const group_config& cfg, const ordinal& alpha,
                               std::size_t depth, const std::set<ordinal>& extra_x = {}) {
  return stage_group(cfg, alpha, depth, extra_x);
}

/// Basis of G^mu inside the stage: the stage basis generators of level <= mu.
/// A subset of a free basis, hence a pure subgroup.
struct filtration_level {
  ordinal mu;
  std::vector<generator> basis;
  bool pure = false;
};

inline filtration_level filtration_subgroup(const stage_group& sg, const ordinal& mu) {
  if (sg.alpha() < mu)
    throw scope_error("filtration_subgroup: " + mu.str() + " exceeds stage " +
                      sg.alpha().str());
  filtration_level f{mu, {}, true};
  for (const auto& g : sg.basis())
    if (generator_level(g) <= mu) f.basis.push_back(g);
  for (const auto& g : f.basis)
    if (sg.member(free_element(g)).pure_multiple != 1) f.pure = false;
  return f;
}

/// Distinct generator levels of the stage basis together with 0 and alpha;
/// the filtration is constant between consecutive entries.
inline std::vector<ordinal> explored_levels(const stage_group& sg) {
  std::set<ordinal> lv{ordinal{}, sg.alpha()};
  for (const auto& g : sg.basis()) {
    const ordinal l = generator_level(g);
    if (l <= sg.alpha()) lv.insert(l);
  }
  return {lv.begin(), lv.end()};
}

struct projection_report {
  ordinal nu;
  std::size_t relations_checked = 0;
  std::size_t relations_killed = 0;
  std::size_t identity_checked = 0;
  std::size_t identity_ok = 0;
  std::size_t image_checked = 0;
  std::size_t image_ok = 0;
  std::size_t idempotence_checked = 0;
  std::size_t idempotence_ok = 0;
  std::map<ordinal, std::size_t> cutoff;  // blocks kept per delta > nu
  std::vector<std::string> notes;

  bool ok() const noexcept {
    return relations_killed == relations_checked && identity_ok == identity_checked &&
           image_ok == image_checked && idempotence_ok == idempotence_checked;
  }
};

struct projection_result {
  generator_map map;
  projection_report report;
};

/*
 * Projection pi_nu onto G^nu (nu not in S).
 *
 * x_beta is fixed for beta < nu + w and sent to 0 otherwise. For delta > nu
 * let c be the number of blocks n with eta(k_n) + w <= nu + w (these are the
 * blocks whose x's survive); then pi(z_n) = 0 for n >= c and
 *
 *   pi(z_n) = psi(n) pi(z_{n+1}) - sum_l a_l x_{eta(k_n+l)}     (n < c).
 */
inline projection_result projection(const stage_group& sg, const ordinal& nu) {
  const auto& cfg = sg.config();
  if (sg.alpha() < nu)
    throw scope_error("projection: " + nu.str() + " exceeds stage " + sg.alpha().str());
  if (cfg.system.contains(nu))
    throw scope_error("projection: " + nu.str() + " belongs to S");
  const ordinal nu_w = nu + ordinal::omega();

  projection_result res;
  res.report.nu = nu;
  generator_map& pi = res.map;

  for (const auto& b : sg.explored_x())
    pi.set(generator::x(b), b < nu_w ? free_element(generator::x(b)) : free_element{});

  for (const auto& d : sg.deltas()) {
    const std::size_t top = sg.depth();
    if (d < nu) {
      for (std::size_t n = 0; n <= top; ++n)
        pi.set(generator::z(d, n), generator::z(d, n));
      continue;
    }
    const auto& l = cfg.system.at(d);
    std::size_t c = 0;
    // Blocks beyond the explored prefix are consulted through the rule.
    special_ladder deep = l;
    while (true) {
      if (c >= deep.blocks()) deep = l.with_blocks(std::max<std::size_t>(2 * c, 4));
      if (!(deep.at(c, 0) + ordinal::omega() <= nu_w)) break;
      ++c;
    }
    res.report.cutoff[d] = c;
    group_config deep_cfg = cfg;
    if (c > top) {
      deep_cfg.system = cfg.system.with_blocks(c);
    }
    std::vector<free_element> image(std::max(c, top) + 1);
    for (std::size_t n = c; n-- > 0;) {
      image[n] = rational(cfg.psi(n)) * image[n + 1] - block_combination(deep_cfg, d, n);
      for (const auto& [g, _] : image[n].terms())
        if (!pi.defined_on(g)) pi.set(g, g);  // deep x's below nu + w
    }
    for (std::size_t n = 0; n <= top; ++n) pi.set(generator::z(d, n), image[n]);

    // Closed forms with the cutoff n_delta = max{n : eta(k_n) < nu}.
    std::size_t n_delta = 0;
    while (n_delta + 1 < deep.blocks() && deep.at(n_delta + 1, 0) < nu) ++n_delta;
    if (!(deep.at(0, 0) < nu)) n_delta = 0;
    for (int shift = 0; shift <= 1; ++shift) {
      std::size_t disagree = 0;
      for (std::size_t n = 0; n < n_delta && n <= top; ++n) {
        free_element closed;
        for (std::size_t i = n; i < n_delta; ++i) {
          integer w = 1;
          for (std::size_t j = n; j < i; ++j) w *= cfg.psi(j + shift);
          closed -= rational(w) * block_combination(deep_cfg, d, i);
        }
        if (closed != image[n]) ++disagree;
      }
      if (disagree > 0)
        res.report.notes.push_back(
            "closed form with psi(j" + std::string(shift ? "+1" : "") +
            ") and cutoff n_delta=" + std::to_string(n_delta) + " disagrees with the relation-driven image on " +
            std::to_string(disagree) + " z generator(s) of " + d.str());
    }
  }

  // Certification.
  auto& rep = res.report;
  const auto hom = verify_hom(pi, sg.relations(), sg.evaluator());
  rep.relations_checked = hom.checked;
  rep.relations_killed = hom.checked - hom.failures.size();
  for (const auto& [g, img] : pi.images()) {
    if (generator_level(g) <= nu) {
      ++rep.identity_checked;
      if (img == free_element(g)) ++rep.identity_ok;
    }
    ++rep.image_checked;
    bool inside = true;
    for (const auto& [h, _] : img.terms())
      if (!(generator_level(h) <= nu)) inside = false;
    if (inside) ++rep.image_ok;
    ++rep.idempotence_checked;
    if (pi.apply(img) == img) ++rep.idempotence_ok;
  }
  return res;
}

struct freeness_result {
  std::vector<generator> enlarged;   // T after the closure rules
  std::vector<generator> basis;
  bool integral = false;     // every enlarged generator is an integer combination of the basis
  bool independent = false;  // rank == |basis|
  bool pure = false;         // the basis spans a pure subgroup of the stage
  std::size_t uniform_m = 0;

  bool ok() const noexcept { return integral && independent && pure; }
};

/*
 * Explicit basis of the pure closure of a finite generator set T.
 *
 * T is enlarged to: Z(delta,n) for n <= m (m the largest z index in T) and
 * X(eta_delta(i)) for i < k_{m+1}, for every delta touched by T. The pure
 * closure is then free on {z*_delta} u {those x's} u {other x's of T},
 * where z*_delta = z_{delta,m+1} = (z_{delta,m} + A_m)/psi(m), written as
 * z_{delta,m} itself when psi(m) = +-1 (same span).
 */
inline freeness_result freeness_basis(const stage_group& sg, const std::vector<generator>& T) {
  const auto& cfg = sg.config();
  std::set<generator> tset;
  std::set<ordinal> touched;
  std::size_t m = 0;
  for (const auto& g : T) {
    if (g.is_z()) {
      if (!cfg.system.contains(g.index) || g.n > sg.depth())
        throw scope_error("freeness_basis: " + g.str() + " outside the stage");
      touched.insert(g.index);
      m = std::max<std::size_t>(m, g.n);
    } else if (g.is_x()) {
      if (!sg.explored_x().count(g.index))
        throw scope_error("freeness_basis: " + g.str() + " outside the stage");
    } else {
      throw scope_error("freeness_basis: " + g.str() + " is not a stage generator");
    }
    tset.insert(g);
  }

  freeness_result r;
  r.uniform_m = m;
  std::set<generator> basis_x;
  std::vector<generator> basis_z;
  for (const auto& d : touched) {
    const auto& l = cfg.system.at(d);
    if (m + 1 > l.blocks())
      throw depth_error("freeness_basis: block " + std::to_string(m) + " of " + d.str());
    for (std::size_t n = 0; n <= m; ++n) tset.insert(generator::z(d, n));
    for (std::size_t i = 0; i < l.block_start(m + 1); ++i) {
      tset.insert(generator::x(l.entry(i)));
      basis_x.insert(generator::x(l.entry(i)));
    }
    const integer p = cfg.psi(m);
    if (abs(p) == 1) {
      basis_z.push_back(generator::z(d, m));
    } else {
      if (m + 1 > sg.depth())
        throw depth_error("freeness_basis: pure closure needs Z(" + d.str() + "," +
                          std::to_string(m + 1) + ")");
      basis_z.push_back(generator::z(d, m + 1));
    }
  }
  for (const auto& g : tset)
    if (g.is_x()) basis_x.insert(g);
  r.enlarged.assign(tset.begin(), tset.end());
  r.basis = basis_z;
  r.basis.insert(r.basis.end(), basis_x.begin(), basis_x.end());

  // Certificates, computed in stage-basis coordinates.
  std::vector<free_element> basis_coords, enlarged_coords;
  for (const auto& g : r.basis) basis_coords.push_back(sg.rewrite(g));
  for (const auto& g : r.enlarged) enlarged_coords.push_back(sg.rewrite(g));
  std::vector<free_element> all = basis_coords;
  all.insert(all.end(), enlarged_coords.begin(), enlarged_coords.end());
  const auto table = to_coordinates(all);
  const rat_matrix brows(table.rows.begin(), table.rows.begin() + r.basis.size());
  r.independent = rational_rank(brows) == r.basis.size();
  r.integral = true;
  for (std::size_t i = r.basis.size(); i < table.rows.size(); ++i) {
    auto sol = solve_in_span(brows, table.rows[i]);
    if (!sol) {
      r.integral = false;
      continue;
    }
    for (const auto& q : *sol)
      if (q.get_den() != 1) r.integral = false;
  }
  int_matrix irows;
  bool integral_rows = true;
  for (const auto& row : brows) {
    std::vector<integer> ir;
    for (const auto& q : row) {
      if (q.get_den() != 1) integral_rows = false;
      ir.push_back(q.get_num());
    }
    irows.push_back(std::move(ir));
  }
  r.pure = integral_rows && r.independent && is_saturated(irows);
  return r;
}

}  // namespace sepg

#endif  // SEPGROUP_STAGE_GROUP_HPP
