#ifndef SEPGROUP_LATTICE_HPP
#define SEPGROUP_LATTICE_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/free_element.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace sepg {

using int_matrix = std::vector<std::vector<integer>>;
using rat_matrix = std::vector<std::vector<rational>>;

/// Dense coordinates of elements over a shared, sorted column set.
struct coordinate_table {
  std::vector<generator> columns;
  rat_matrix rows;
};

inline coordinate_table to_coordinates(const std::vector<free_element>& elems,
                                       std::vector<generator> extra_columns = {}) {
  std::map<generator, std::size_t> col;
  for (const auto& g : extra_columns) col.emplace(g, 0);
  for (const auto& e : elems)
    for (const auto& [g, _] : e.terms()) col.emplace(g, 0);
  coordinate_table t;
  for (auto& [g, idx] : col) {
    idx = t.columns.size();
    t.columns.push_back(g);
  }
  for (const auto& e : elems) {
    std::vector<rational> row(t.columns.size(), rational(0));
    for (const auto& [g, c] : e.terms()) row[col.at(g)] = c;
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline std::size_t rational_rank(rat_matrix m) {
  std::size_t rank = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t piv = rank;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[rank]);
    for (std::size_t r = rank + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      const rational f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

/// Fraction-free (Bareiss) determinant of a square integer matrix.
inline integer determinant(int_matrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  integer sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[r], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

/// Nonzero diagonal entries of the Smith normal form (invariant factors).
inline std::vector<integer> smith_diagonal(int_matrix m) {
  std::vector<integer> diag;
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Pivot: smallest nonzero |entry| in the remaining block.
    std::optional<std::pair<std::size_t, std::size_t>> piv;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (m[i][j] != 0 &&
            (!piv || abs(m[i][j]) < abs(m[piv->first][piv->second])))
          piv = {i, j};
    if (!piv) break;
    std::swap(m[t], m[piv->first]);
    for (auto& row : m) std::swap(row[t], row[piv->second]);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (m[i][t] == 0) continue;
        integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][t].get_mpz_t(), m[t][t].get_mpz_t());
        for (std::size_t j = t; j < cols; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) {
          std::swap(m[i], m[t]);
          clean = false;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (m[t][j] == 0) continue;
        integer q;
        mpz_fdiv_q(q.get_mpz_t(), m[t][j].get_mpz_t(), m[t][t].get_mpz_t());
        for (std::size_t i = t; i < rows; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) {
          for (auto& row : m) std::swap(row[t], row[j]);
          clean = false;
        }
      }
      if (clean) {
        // Divisibility condition: pivot must divide the rest of the block.
        for (std::size_t i = t + 1; i < rows && clean; ++i)
          for (std::size_t j = t + 1; j < cols; ++j)
            if (!mpz_divisible_p(m[i][j].get_mpz_t(), m[t][t].get_mpz_t())) {
              for (std::size_t k = t; k < cols; ++k) m[t][k] += m[i][k];
              clean = false;
              break;
            }
      }
    }
    diag.push_back(abs(m[t][t]));
    ++t;
  }
  return diag;
}

/// Row lattice is saturated (a pure sublattice of Z^cols) iff every
/// invariant factor is 1.
inline bool is_saturated(const int_matrix& rows) {
  for (const auto& d : smith_diagonal(rows))
    if (d != 1) return false;
  return true;
}

/// Coefficients c with sum c_i rows_i = target, or nullopt when target is
/// outside the rational span. Requires independent rows for uniqueness.
inline std::optional<std::vector<rational>> solve_in_span(
    const rat_matrix& rows, const std::vector<rational>& target) {
  const std::size_t k = rows.size();
  const std::size_t cols = target.size();
  // Augmented system: columns of the transpose plus the target.
  rat_matrix a(cols, std::vector<rational>(k + 1, rational(0)));
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t i = 0; i < k; ++i) a[c][i] = rows[i][c];
    a[c][k] = target[c];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < k && r < cols; ++c) {
    std::size_t p = r;
    while (p < cols && a[p][c] == 0) ++p;
    if (p == cols) continue;
    std::swap(a[p], a[r]);
    const rational inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (std::size_t i = 0; i < cols; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const rational f = a[i][c];
      for (std::size_t j = c; j <= k; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < cols; ++i)
    if (a[i][k] != 0) return std::nullopt;
  std::vector<rational> out(k, rational(0));
  for (std::size_t i = 0; i < r; ++i) out[pivot_col[i]] = a[i][k];
  return out;
}

/// Inverse of a square integer matrix when it is unimodular.
inline std::optional<int_matrix> integer_inverse(const int_matrix& m) {
  const std::size_t n = m.size();
  rat_matrix a(n, std::vector<rational>(2 * n, rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    const rational inv = 1 / a[c][c];
    for (auto& v : a[c]) v *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      const rational f = a[i][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  int_matrix out(n, std::vector<integer>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][n + j].get_den() != 1) return std::nullopt;
      out[i][j] = a[i][n + j].get_num();
    }
  return out;
}

/*
 * Unimodular matrix whose first row is the primitive vector a.
 *
 * Column operations reduce a to e_1 while the inverse operations are
 * accumulated as row operations on U, keeping (current row) * U == a.
 */
inline int_matrix unimodular_completion(const std::vector<integer>& a) {
  const std::size_t t = a.size();
  if (t == 0) throw validation_error("unimodular_completion: empty vector");
  int_matrix u(t, std::vector<integer>(t, 0));
  for (std::size_t i = 0; i < t; ++i) u[i][i] = 1;
  std::vector<integer> r = a;
  while (true) {
    std::optional<std::size_t> p;
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < t; ++i)
      if (r[i] != 0) {
        ++nonzero;
        if (!p || abs(r[i]) < abs(r[*p])) p = i;
      }
    if (!p) throw validation_error("unimodular_completion: zero vector");
    if (nonzero == 1) break;
    for (std::size_t j = 0; j < t; ++j) {
      if (j == *p || r[j] == 0) continue;
      integer q;
      mpz_tdiv_q(q.get_mpz_t(), r[j].get_mpz_t(), r[*p].get_mpz_t());
      r[j] -= q * r[*p];
      for (std::size_t k = 0; k < t; ++k) u[*p][k] += q * u[j][k];
    }
  }
  std::size_t p = 0;
  while (r[p] == 0) ++p;
  if (abs(r[p]) != 1)
    throw validation_error("unimodular_completion: vector is not primitive");
  if (p != 0) {
    std::swap(r[0], r[p]);
    std::swap(u[0], u[p]);
  }
  if (r[0] < 0) {
    r[0] = -r[0];
    for (auto& v : u[0]) v = -v;
  }
  return u;
}

inline integer gcd_of(const std::vector<integer>& v) {
  integer g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

}  // namespace sepg

#endif  // SEPGROUP_LATTICE_HPP
