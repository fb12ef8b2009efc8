#ifndef SEPGROUP_TESTS_ORACLES_HPP
#define SEPGROUP_TESTS_ORACLES_HPP

#include <sepgroup.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

struct tally {
  std::size_t checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
  void expect(bool cond, const std::string& what) {
    ++checked;
    if (!cond && mismatches.size() < 10) mismatches.push_back(what);
  }
};

/// Dense coordinates over the stage basis.
inline std::vector<sepg::rational> dense(const sepg::stage_group& sg, const sepg::free_element& e) {
  const auto c = sg.rewrite(e);
  std::vector<sepg::rational> v;
  for (const auto& g : sg.basis()) v.push_back(c.coefficient(g));
  return v;
}

inline bool integral(const std::vector<sepg::rational>& v) {
  for (const auto& q : v)
    if (q.get_den() != 1) return false;
  return true;
}

/// Coefficients of v over independent rows, by Gauss-Jordan on the rows'
/// pivot columns; nullopt outside the rational span.
class span_solver {
 public:
  explicit span_solver(std::vector<std::vector<sepg::rational>> rows) : rows_(std::move(rows)) {
    const std::size_t k = rows_.size();
    const std::size_t n = k ? rows_[0].size() : 0;
    // Reduced echelon form with a record of the row operations.
    red_ = rows_;
    ops_.assign(k, std::vector<sepg::rational>(k, sepg::rational(0)));
    for (std::size_t i = 0; i < k; ++i) ops_[i][i] = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < k; ++c) {
      std::size_t p = r;
      while (p < k && red_[p][c] == 0) ++p;
      if (p == k) continue;
      std::swap(red_[p], red_[r]);
      std::swap(ops_[p], ops_[r]);
      const sepg::rational inv = 1 / red_[r][c];
      for (auto& x : red_[r]) x *= inv;
      for (auto& x : ops_[r]) x *= inv;
      for (std::size_t i = 0; i < k; ++i) {
        if (i == r || red_[i][c] == 0) continue;
        const sepg::rational f = red_[i][c];
        for (std::size_t j = 0; j < n; ++j) red_[i][j] -= f * red_[r][j];
        for (std::size_t j = 0; j < k; ++j) ops_[i][j] -= f * ops_[r][j];
      }
      pivots_.push_back(c);
      ++r;
    }
  }

  std::size_t rank() const { return pivots_.size(); }

  std::optional<std::vector<sepg::rational>> solve(const std::vector<sepg::rational>& v) const {
    const std::size_t k = rows_.size();
    std::vector<sepg::rational> coef(k, sepg::rational(0));
    for (std::size_t i = 0; i < pivots_.size(); ++i)
      for (std::size_t j = 0; j < k; ++j) coef[j] += v[pivots_[i]] * ops_[i][j];
    for (std::size_t c = 0; c < v.size(); ++c) {
      sepg::rational s = 0;
      for (std::size_t j = 0; j < k; ++j) s += coef[j] * rows_[j][c];
      if (s != v[c]) return std::nullopt;
    }
    return coef;
  }

 private:
  std::vector<std::vector<sepg::rational>> rows_, red_, ops_;
  std::vector<std::size_t> pivots_;
};

/*
 * Brute-force check of freeness_basis on T: every integer combination v of T
 * with coefficients in [-bound, bound] and each v/p (p = 2, 3) lies in the
 * integer span of the returned basis exactly when it lies in the group; the
 * basis is independent and each basis element has a multiple in the span of
 * the enlarged T.
 */
inline tally freeness(const sepg::stage_group& sg, const std::vector<sepg::generator>& T,
                      long bound = 3) {
  tally t;
  const auto fr = sepg::freeness_basis(sg, T);
  std::vector<std::vector<sepg::rational>> brows, trows, erows;
  for (const auto& g : fr.basis) brows.push_back(dense(sg, g));
  for (const auto& g : T) trows.push_back(dense(sg, g));
  for (const auto& g : fr.enlarged) erows.push_back(dense(sg, g));
  const span_solver basis(brows);
  t.expect(basis.rank() == brows.size(), "basis dependent");
  const span_solver enlarged(erows);
  for (std::size_t i = 0; i < brows.size(); ++i) {
    t.expect(integral(brows[i]), fr.basis[i].str() + " not in group");
    t.expect(enlarged.solve(brows[i]).has_value(), fr.basis[i].str() + " outside Q-span of enlarged T");
  }
  const std::size_t n = sg.basis().size();
  std::vector<long> c(T.size(), -bound);
  for (;;) {
    std::vector<sepg::rational> v(n, sepg::rational(0));
    for (std::size_t i = 0; i < T.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) v[j] += c[i] * trows[i][j];
    for (long p : {1L, 2L, 3L}) {
      std::vector<sepg::rational> w = v;
      for (auto& q : w) q /= p;
      const bool in_group = integral(w);
      const auto sol = basis.solve(w);
      const bool in_span = sol && integral(*sol);
      if (p == 1) t.expect(in_span, "combination of T outside basis span");
      else t.expect(in_group == in_span, "purity mismatch at divisor " + std::to_string(p));
    }
    std::size_t i = 0;
    while (i < c.size() && c[i] == bound) c[i++] = -bound;
    if (i == c.size()) break;
    ++c[i];
  }
  return t;
}

/// Independent re-check of a projection: relations map to zero in the
/// ambient module, G^nu is fixed, images have level <= nu, pi o pi = pi.
inline tally projection(const sepg::stage_group& sg, const sepg::ordinal& nu) {
  tally t;
  const auto pr = sepg::projection(sg, nu);
  const auto& pi = pr.map;
  for (const auto& rel : sg.relations()) {
    sepg::free_element img;
    for (const auto& [g, c] : rel.terms()) img += c * sg.expand(pi.image(g));
    t.expect(img.is_zero(), "relation survives: " + rel.str());
  }
  for (const auto& g : sepg::filtration_subgroup(sg, nu).basis)
    t.expect(pi.image(g) == sepg::free_element(g), "moves " + g.str());
  for (const auto& g : sg.generators()) {
    const auto& img = pi.image(g);
    for (const auto& [h, _] : img.terms())
      t.expect(sepg::generator_level(h) <= nu, g.str() + " maps above nu");
    sepg::free_element twice;
    for (const auto& [h, c] : img.terms()) twice += c * pi.image(h);
    t.expect(twice == img, "not idempotent on " + g.str());
  }
  return t;
}

/// Levels nu not in S spread over the stage: w*k, w*k+1, and points just
/// past each delta.
inline std::vector<sepg::ordinal> sample_levels(const sepg::stage_group& sg, std::size_t want) {
  std::vector<sepg::ordinal> out;
  const auto S = sg.deltas();
  auto admissible = [&](const sepg::ordinal& nu) {
    if (sg.alpha() < nu) return false;
    for (const auto& d : S)
      if (d == nu) return false;
    for (const auto& o : out)
      if (o == nu) return false;
    return true;
  };
  for (const auto& d : S)
    for (const sepg::ordinal& nu :
         {d + sepg::ordinal::finite(1), d + sepg::ordinal::omega_power(1, 2),
          d + sepg::ordinal::omega_power(1, 3) + sepg::ordinal::finite(4)})
      if (admissible(nu)) out.push_back(nu);
  for (std::uint64_t k = 1; out.size() < want && k < 64; ++k) {
    const sepg::ordinal a = sepg::ordinal::omega_power(1, k);
    const sepg::ordinal b = a + sepg::ordinal::finite(k);
    if (admissible(a)) out.push_back(a);
    if (admissible(b)) out.push_back(b);
    const sepg::ordinal c = sepg::ordinal::omega_power(2, 1) + a;
    if (admissible(c)) out.push_back(c);
  }
  return out;
}

}  // namespace oracle

#endif  // SEPGROUP_TESTS_ORACLES_HPP
