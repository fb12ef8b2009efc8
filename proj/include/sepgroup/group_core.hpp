#ifndef SEPGROUP_GROUP_CORE_HPP
#define SEPGROUP_GROUP_CORE_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/ladder.hpp>
#include <sepgroup/lattice.hpp>
#include <sepgroup/ordinal.hpp>

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

/// The scaling function psi: factorial (0! = 1) or an explicit table.
class psi_function {
 public:
  static psi_function factorial() { return psi_function(); }
  static psi_function table(std::vector<integer> values) {
    psi_function p;
    p.table_ = std::move(values);
    return p;
  }

  bool is_factorial() const noexcept { return !table_.has_value(); }
  const std::optional<std::vector<integer>>& values() const noexcept { return table_; }

  integer operator()(std::size_t n) const {
    if (table_) {
      if (n >= table_->size())
        throw depth_error("psi table has no value at " + std::to_string(n));
      return (*table_)[n];
    }
    integer f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
    return f;
  }

  /// prod_{lo <= j < hi} psi(j)
  integer product(std::size_t lo, std::size_t hi) const {
    integer p = 1;
    for (std::size_t j = lo; j < hi; ++j) p *= (*this)(j);
    return p;
  }

  friend bool operator==(const psi_function&, const psi_function&) = default;

 private:
  std::optional<std::vector<integer>> table_;
};

/// Colors c_delta(n). Whether n indexes ladder entries or relations depends
/// on the consumer (uniformization vs. twisted relations).
struct coloring {
  std::optional<integer> palette;  // nullopt: countably many colors
  std::map<ordinal, std::vector<integer>> colors;

  const integer& at(const ordinal& delta, std::size_t n) const {
    auto it = colors.find(delta);
    if (it == colors.end())
      throw scope_error("coloring: no colors for " + delta.str());
    if (n >= it->second.size())
      throw depth_error("coloring on " + delta.str() + " has no color at " +
                        std::to_string(n));
    return it->second[n];
  }

  std::size_t depth(const ordinal& delta) const {
    auto it = colors.find(delta);
    return it == colors.end() ? 0 : it->second.size();
  }

  void validate() const {
    if (!palette) return;
    for (const auto& [d, cs] : colors)
      for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i] < 0 || cs[i] >= *palette)
          throw validation_error("coloring on " + d.str() + ": color " +
                                 cs[i].get_str() + " at " + std::to_string(i) +
                                 " outside palette");
  }
};

/*
 * Parameters (psi, a-bar, ladder system) of the groups G^{psi,a}.
 *
 * Coefficient vectors are stored per delta as a pattern that is cycled over
 * the blocks: block n uses coefficients[delta][n % size].
 */
struct group_config {
  ladder_system system;
  psi_function psi = psi_function::factorial();
  std::map<ordinal, std::vector<std::vector<integer>>> coefficients;

  const std::vector<integer>& a(const ordinal& delta, std::size_t n) const {
    auto it = coefficients.find(delta);
    if (it == coefficients.end() || it->second.empty())
      throw scope_error("group config: no coefficients for " + delta.str());
    return it->second[n % it->second.size()];
  }

  /// Uniform coefficient pattern for every ladder (e.g. {1} or {1,-1}).
  static group_config uniform(ladder_system sys, std::vector<integer> a,
                              psi_function psi = psi_function::factorial()) {
    group_config cfg{std::move(sys), std::move(psi), {}};
    for (const auto& d : cfg.system.deltas()) cfg.coefficients[d] = {a};
    return cfg;
  }

  void validate() const {
    for (const auto& [d, l] : system.ladders()) {
      for (std::size_t n = 0; n < l.blocks(); ++n) {
        const auto& av = a(d, n);
        if (av.size() != l.block_size(n))
          throw validation_error("group config: coefficient vector for " +
                                 d.str() + " block " + std::to_string(n) +
                                 " has length " + std::to_string(av.size()) +
                                 ", block has " + std::to_string(l.block_size(n)));
        if (gcd_of(av) != 1)
          throw validation_error("group config: gcd of coefficients for " +
                                 d.str() + " block " + std::to_string(n) + " is not 1");
      }
      for (std::size_t n = 0; n <= l.blocks(); ++n)
        if (psi(n) == 0)
          throw validation_error("group config: psi(" + std::to_string(n) + ") = 0");
    }
  }
};

namespace detail {

inline const special_ladder& ladder_for(const group_config& cfg, const ordinal& delta,
                                        std::size_t n) {
  if (!cfg.system.contains(delta))
    throw scope_error("delta " + delta.str() + " is not in the ladder system");
  const auto& l = cfg.system.at(delta);
  if (n > l.blocks())
    throw depth_error("index " + std::to_string(n) + " beyond the " +
                      std::to_string(l.blocks()) + " explored blocks of " + delta.str());
  return l;
}

}  // namespace detail

/// sum_l a_l^{delta,n} x_{eta(k_n + l)}
inline free_element block_combination(const group_config& cfg, const ordinal& delta,
                                       std::size_t n) {
  const auto& l = detail::ladder_for(cfg, delta, n + 1);
  const auto& av = cfg.a(delta, n);
  free_element out;
  for (std::size_t i = 0; i < l.block_size(n); ++i)
    out.add(generator::x(l.at(n, i)), rational(av.at(i)));
  return out;
}

/*
 * z_{delta,n} written out in the ambient module:
 *
 *   prod_{i<n} psi(i)^-1 y_delta
 *     + sum_{i<n} prod_{j=i}^{n-1} psi(j)^-1 (sum_l a_l^{delta,i} x_{eta(k_i+l)}
 *                                             [+ c_delta(i) w])
 *
 * The bracketed term is present only for the twisted form.
 */
inline free_element z_element(const group_config& cfg, const ordinal& delta,
                              std::size_t n, const coloring* twist = nullptr) {
  detail::ladder_for(cfg, delta, n);
  free_element out(generator::y(delta), rational(1, 1) / rational(cfg.psi.product(0, n)));
  for (std::size_t i = 0; i < n; ++i) {
    free_element block = block_combination(cfg, delta, i);
    if (twist) block.add(generator::w(), rational(twist->at(delta, i)));
    out += rational(1) / rational(cfg.psi.product(i, n)) * block;
  }
  return out;
}

/// Formal relator psi(n) Z(n+1) - Z(n) - sum_l a_l X [- c(n) W].
inline free_element formal_relation(const group_config& cfg, const ordinal& delta,
                                    std::size_t n, const coloring* twist = nullptr) {
  free_element g;
  g.add(generator::z(delta, n + 1), rational(cfg.psi(n)));
  g.add(generator::z(delta, n), rational(-1));
  g -= block_combination(cfg, delta, n);
  if (twist) g.add(generator::w(), -rational(twist->at(delta, n)));
  return g;
}

/// Replaces every formal Z(delta,n) by its closed form; other generators
/// pass through.
inline free_element expand_formal(const group_config& cfg, const free_element& e,
                                  const coloring* twist = nullptr) {
  free_element out;
  for (const auto& [g, c] : e.terms()) {
    if (g.is_z()) out += c * z_element(cfg, g.index, g.n, twist);
    else out.add(g, c);
  }
  return out;
}

/// The relator expanded through the closed form; identically zero.
inline free_element relation_element(const group_config& cfg, const ordinal& delta,
                                     std::size_t n, const coloring* twist = nullptr) {
  return expand_formal(cfg, formal_relation(cfg, delta, n, twist), twist);
}

/*
 * Coordinates of e over the depth-N stage basis {Z(delta,N)} u {X(beta)}
 * (plus W for twisted stages). Formal Z symbols are expanded first, then
 * each y_delta is replaced using
 *
 *   y_delta = P_N z_{delta,N} - sum_{i<N} (prod_{j<i} psi(j)) (A_i [+ c(i) w])
 *
 * with P_N = prod_{j<N} psi(j).
 */
inline free_element stage_rewrite(const group_config& cfg, std::size_t depth,
                                  const free_element& e, const coloring* twist = nullptr) {
  const ordinal x_bound = cfg.system.alpha() + ordinal::omega();
  const free_element expanded = expand_formal(cfg, e, twist);
  free_element out;
  for (const auto& [g, c] : expanded.terms()) {
    switch (g.kind) {
      case generator_kind::x:
        if (!(g.index < x_bound))
          throw scope_error("stage_rewrite: " + g.str() + " is not below " +
                            x_bound.str());
        out.add(g, c);
        break;
      case generator_kind::w:
        if (!twist) throw scope_error("stage_rewrite: W outside an untwisted stage");
        out.add(g, c);
        break;
      case generator_kind::y: {
        if (g.n != 0)
          throw scope_error("stage_rewrite: " + g.str() + " is not in the group span");
        detail::ladder_for(cfg, g.index, depth);
        out.add(generator::z(g.index, depth), c * rational(cfg.psi.product(0, depth)));
        for (std::size_t i = 0; i < depth; ++i) {
          free_element block = block_combination(cfg, g.index, i);
          if (twist) block.add(generator::w(), rational(twist->at(g.index, i)));
          out -= c * rational(cfg.psi.product(0, i)) * block;
        }
        break;
      }
      case generator_kind::z:
        throw scope_error("stage_rewrite: unexpanded " + g.str());
    }
  }
  return out;
}

struct membership_result {
  bool in_group = false;
  std::optional<integer> pure_multiple;  // least k > 0 with k*e in the group
  free_element coordinates;
};

inline membership_result membership(const group_config& cfg, std::size_t depth,
                                    const free_element& e,
                                    const coloring* twist = nullptr) {
  membership_result r;
  r.coordinates = stage_rewrite(cfg, depth, e, twist);
  r.in_group = r.coordinates.all_integral();
  r.pure_multiple = r.coordinates.denominator_lcm();
  return r;
}

/// Least alpha admitting g into the canonical filtration.
inline ordinal generator_level(const generator& g) {
  switch (g.kind) {
    case generator_kind::x: return level_below_omega_shift(g.index);
    case generator_kind::y:
    case generator_kind::z: return g.index + ordinal::finite(1);
    case generator_kind::w: break;
  }
  throw scope_error("generator_level: W has no level");
}

}  // namespace sepg

#endif  // SEPGROUP_GROUP_CORE_HPP
