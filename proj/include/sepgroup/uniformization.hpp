#ifndef SEPGROUP_UNIFORMIZATION_HPP
#define SEPGROUP_UNIFORMIZATION_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/filtration_equiv.hpp>
#include <sepgroup/free_element.hpp>
#include <sepgroup/group_core.hpp>
#include <sepgroup/ladder.hpp>
#include <sepgroup/stage_group.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace sepg {

/// Psi on ladder values plus the thresholds Psi*(delta) (ladder indices).
struct uniformization_data {
  std::map<ordinal, integer> psi;
  std::map<ordinal, std::size_t> psi_star;
  integer default_color = 0;

  integer color_of(const ordinal& beta) const {
    auto it = psi.find(beta);
    return it == psi.end() ? default_color : it->second;
  }
};

struct uniformization_failure {
  ordinal delta;
  std::size_t index = 0;
  integer expected, found;
};

/// Checks Psi(eta_delta(j)) = c_delta(j) for PsiStar(delta) <= j on the range
/// explored by both the ladder and the coloring.
inline std::optional<uniformization_failure> check_uniformizes(const ladder_system& sys,
                                                               const coloring& c,
                                                               const uniformization_data& u) {
  for (const auto& [d, l] : sys.ladders()) {
    auto st = u.psi_star.find(d);
    if (st == u.psi_star.end()) return uniformization_failure{d, 0, 0, 0};
    const std::size_t top = std::min(l.size(), c.depth(d));
    for (std::size_t j = st->second; j < top; ++j) {
      const integer got = u.color_of(l.entry(j));
      if (got != c.at(d, j)) return uniformization_failure{d, j, c.at(d, j), got};
    }
  }
  return std::nullopt;
}

/*
 * Greedy uniformization: start every threshold at k_{m_delta} and, while two
 * ladders claim one value with different colors, move every claimant's
 * threshold past its claiming index.
 */
inline uniformization_data greedy_uniformize(const ladder_system& sys, const coloring& c,
                                             const disjointification& d) {
  uniformization_data u;
  for (const auto& [delta, l] : sys.ladders()) {
    const std::size_t md = d.at(delta);
    u.psi_star[delta] = md <= l.blocks() ? l.block_start(md) : l.size();
  }
  const auto start = u.psi_star;
  while (true) {
    std::map<ordinal, std::vector<std::tuple<ordinal, std::size_t, integer>>> claims;
    for (const auto& [delta, l] : sys.ladders()) {
      const std::size_t top = std::min(l.size(), c.depth(delta));
      for (std::size_t j = u.psi_star[delta]; j < top; ++j)
        claims[l.entry(j)].emplace_back(delta, j, c.at(delta, j));
    }
    bool conflict = false;
    for (const auto& [value, who] : claims) {
      bool differ = false;
      for (const auto& w : who) differ |= std::get<2>(w) != std::get<2>(who.front());
      if (!differ) continue;
      conflict = true;
      for (const auto& [delta, j, _] : who)
        u.psi_star[delta] = std::max(u.psi_star[delta], j + 1);
    }
    if (!conflict) {
      u.psi.clear();
      for (const auto& [value, who] : claims) u.psi[value] = std::get<2>(who.front());
      break;
    }
  }
  for (const auto& [delta, l] : sys.ladders()) {
    const std::size_t top = std::min(l.size(), c.depth(delta));
    if (u.psi_star[delta] > start.at(delta) && u.psi_star[delta] >= top)
      throw depth_error("greedy_uniformize: conflicts on " + delta.str() +
                        " persist through the explored prefix");
  }
  if (auto f = check_uniformizes(sys, c, u))
    throw validation_error("greedy_uniformize: verification failed on " + f->delta.str() +
                           " at " + std::to_string(f->index));
  return u;
}

/// N = Z with the zig-zag enumeration 0, -1, 1, -2, 2, ...
struct integer_group {
  using value = integer;
  static value zero() { return 0; }
  static value add(const value& a, const value& b) { return a + b; }
  static value sub(const value& a, const value& b) { return a - b; }
  static value scale(const value& a, const integer& k) { return a * k; }
  static bool equal(const value& a, const value& b) { return a == b; }
  static integer encode(const value& v) { return v >= 0 ? integer(2 * v) : integer(-2 * v - 1); }
  static value decode(const integer& k) {
    if (k < 0) throw validation_error("integer_group: negative code");
    return mpz_even_p(k.get_mpz_t()) ? integer(k / 2) : integer(-(k + 1) / 2);
  }
  static std::string str(const value& v) { return v.get_str(); }
};

/*
 * Z^(omega) with marked basis a_{nmj}, stored sparsely as basis index ->
 * coefficient. Basis index of a_{nmj} is pair(n, pair(m, j)) with the Cantor
 * pairing. Elements are enumerated through the sequence bijection
 * () -> 0, (u, rest) -> 2^u (2 code(rest) + 1) applied to the zig-zag codes
 * of the coefficients (the last one shifted down by 1, as it is nonzero).
 */
struct marked_free_sum {
  using value = std::map<integer, integer>;

  static integer pair(const integer& a, const integer& b) {
    const integer s = a + b;
    return s * (s + 1) / 2 + b;
  }
  static std::pair<integer, integer> unpair(const integer& z) {
    integer w;
    const integer disc = 8 * z + 1;
    mpz_sqrt(w.get_mpz_t(), disc.get_mpz_t());
    w = (w - 1) / 2;
    const integer t = w * (w + 1) / 2;
    const integer b = z - t;
    return {w - b, b};
  }
  static integer index(const integer& n, const integer& m, const integer& j) {
    return pair(n, pair(m, j));
  }
  static std::tuple<integer, integer, integer> triple(const integer& idx) {
    auto [n, rest] = unpair(idx);
    auto [m, j] = unpair(rest);
    return {n, m, j};
  }
  static value basis(const integer& n, const integer& m, const integer& j) {
    return {{index(n, m, j), 1}};
  }

  static value zero() { return {}; }
  static value add(value a, const value& b) {
    for (const auto& [k, c] : b) {
      auto& slot = a[k];
      slot += c;
      if (slot == 0) a.erase(k);
    }
    return a;
  }
  static value sub(const value& a, const value& b) { return add(a, scale(b, -1)); }
  static value scale(value a, const integer& k) {
    if (k == 0) return {};
    for (auto& [_, c] : a) c *= k;
    return a;
  }
  static bool equal(const value& a, const value& b) { return a == b; }

  /// Part supported on a_{n m j} for the given first index n.
  static value project_first(const value& v, const integer& n) {
    value out;
    for (const auto& [k, c] : v)
      if (std::get<0>(triple(k)) == n) out.emplace(k, c);
    return out;
  }

  static integer encode(const value& v) {
    if (v.empty()) return 0;
    const integer top = v.rbegin()->first;
    if (top > 4096) throw validation_error("marked_free_sum: basis index too large to encode");
    const std::size_t len = top.get_ui() + 1;
    std::vector<integer> u(len, 0);
    for (const auto& [k, c] : v) {
      u[k.get_ui()] = integer_group::encode(c);
      if (u[k.get_ui()] > (1 << 20))
        throw validation_error("marked_free_sum: coefficient too large to encode");
    }
    u.back() -= 1;
    integer code = 0;
    for (std::size_t i = len; i-- > 0;) {
      code = 2 * code + 1;
      mpz_mul_2exp(code.get_mpz_t(), code.get_mpz_t(), u[i].get_ui());
    }
    return code;
  }
  static value decode(integer k) {
    if (k < 0) throw validation_error("marked_free_sum: negative code");
    std::vector<integer> u;
    while (k != 0) {
      const unsigned long e = mpz_scan1(k.get_mpz_t(), 0);
      u.push_back(e);
      mpz_fdiv_q_2exp(k.get_mpz_t(), k.get_mpz_t(), e);
      k = (k - 1) / 2;
    }
    value v;
    for (std::size_t i = 0; i < u.size(); ++i) {
      integer code = u[i];
      if (i + 1 == u.size()) code += 1;
      const integer c = integer_group::decode(code);
      if (c != 0) v.emplace(integer(static_cast<unsigned long>(i)), c);
    }
    return v;
  }
  static std::string str(const value& v) {
    if (v.empty()) return "0";
    std::string s;
    for (const auto& [k, c] : v) {
      auto [n, m, j] = triple(k);
      if (!s.empty()) s += " + ";
      s += c.get_str() + "*a(" + n.get_str() + "," + m.get_str() + "," + j.get_str() + ")";
    }
    return s;
  }
};

/// phi on relation generators: values[delta][n] = phi(g_{delta,n}).
template <class G>
using relation_values = std::map<ordinal, std::vector<typename G::value>>;

/// Checks that every ladder of the stage has k_n = 2n, t_n = 2 and a = (1,-1).
inline void require_pair_form(const stage_group& sg, const char* who) {
  const auto& cfg = sg.config();
  for (const auto& [d, l] : cfg.system.ladders())
    for (std::size_t n = 0; n < l.blocks(); ++n)
      if (l.block_start(n) != 2 * n || l.block_size(n) != 2 ||
          cfg.a(d, n) != std::vector<integer>{1, -1})
        throw validation_error(std::string(who) + ": ladder on " + d.str() +
                               " is not in the paired form at block " + std::to_string(n));
}

/// c(2n) = b(phi(g_n)), c(2n+1) = b(2 phi(g_n)).
template <class G>
coloring induced_coloring(const relation_values<G>& phi) {
  coloring c;
  for (const auto& [d, vals] : phi) {
    auto& cs = c.colors[d];
    for (const auto& v : vals) {
      cs.push_back(G::encode(v));
      cs.push_back(G::encode(G::scale(v, 2)));
    }
  }
  return c;
}

template <class G>
typename G::value evaluate(const std::map<generator, typename G::value>& images,
                           const free_element& e) {
  typename G::value out = G::zero();
  for (const auto& [g, c] : e.terms()) {
    if (c.get_den() != 1)
      throw validation_error("evaluate: non-integral coefficient on " + g.str());
    auto it = images.find(g);
    if (it == images.end()) throw scope_error("evaluate: no image for " + g.str());
    out = G::add(out, G::scale(it->second, c.get_num()));
  }
  return out;
}

template <class G>
struct extension_result {
  std::map<generator, typename G::value> images;
  // Which of the four recursion cases fired for z_{delta,n}: 1 both x's on
  // uniformized tails, 2 only x_{2n}, 3 only x_{2n+1}, 4 neither; 0 means
  // the tail clause z = 0.
  std::map<ordinal, std::vector<int>> cases;
  std::size_t checked = 0;
  std::vector<std::pair<ordinal, std::size_t>> failures;
  bool ok() const noexcept { return failures.empty(); }
};

template <class G>
void verify_extension(const stage_group& sg, const relation_values<G>& phi,
                      extension_result<G>& r) {
  r.checked = 0;
  r.failures.clear();
  for (const auto& d : sg.deltas())
    for (std::size_t n = 0; n < sg.depth(); ++n) {
      ++r.checked;
      const auto got = evaluate<G>(r.images, formal_relation(sg.config(), d, n));
      if (!G::equal(got, phi.at(d).at(n))) r.failures.emplace_back(d, n);
    }
}

/*
 * Extension of phi: Q -> N to the free group P on the stage generators.
 *
 *   x_alpha -> b^-1(Psi(alpha))   if alpha = eta_delta(j) with j >= Psi*(delta)
 *   x_alpha -> 0                  otherwise
 *   z_{delta,n} -> 0              if 2n >= Psi*(delta)
 *   z_{delta,n} -> n! z~_{n+1} - x~_{2n} + x~_{2n+1} - phi(g_n)   otherwise
 */
template <class G>
extension_result<G> extend_hom(const stage_group& sg, const relation_values<G>& phi,
                               const uniformization_data& u) {
  require_pair_form(sg, "extend_hom");
  const auto& cfg = sg.config();
  const std::size_t N = sg.depth();
  for (const auto& d : sg.deltas()) {
    auto it = phi.find(d);
    if (it == phi.end() || it->second.size() < N)
      throw depth_error("extend_hom: phi is not given on the " + std::to_string(N) +
                        " relations of " + d.str());
  }
  relation_values<G> trimmed;
  for (const auto& d : sg.deltas())
    trimmed[d].assign(phi.at(d).begin(), phi.at(d).begin() + N);
  const coloring induced = induced_coloring<G>(trimmed);
  if (auto f = check_uniformizes(cfg.system, induced, u))
    throw validation_error("extend_hom: data does not uniformize the induced coloring on " +
                           f->delta.str() + " at " + std::to_string(f->index));

  extension_result<G> r;
  std::set<ordinal> tail_values;
  for (const auto& [d, l] : cfg.system.ladders()) {
    const std::size_t st = u.psi_star.at(d);
    if (st > 2 * N)
      throw depth_error("extend_hom: Psi* on " + d.str() + " is " + std::to_string(st) +
                        ", beyond the " + std::to_string(2 * N) + " explored ladder indices");
    for (std::size_t j = st; j < l.size(); ++j) tail_values.insert(l.entry(j));
  }
  for (const auto& b : sg.explored_x())
    r.images[generator::x(b)] =
        tail_values.count(b) ? G::decode(u.color_of(b)) : G::zero();

  for (const auto& [d, l] : cfg.system.ladders()) {
    const std::size_t st = u.psi_star.at(d);
    auto& cs = r.cases[d];
    cs.assign(N + 1, 0);
    r.images[generator::z(d, N)] = G::zero();
    for (std::size_t n = N; n-- > 0;) {
      if (2 * n >= st) {
        r.images[generator::z(d, n)] = G::zero();
        continue;
      }
      const ordinal& e0 = l.entry(2 * n);
      const ordinal& e1 = l.entry(2 * n + 1);
      const bool t0 = tail_values.count(e0) != 0, t1 = tail_values.count(e1) != 0;
      cs[n] = t0 ? (t1 ? 1 : 2) : (t1 ? 3 : 4);
      auto v = G::scale(r.images.at(generator::z(d, n + 1)), cfg.psi(n));
      if (t0) v = G::sub(v, G::decode(u.color_of(e0)));
      if (t1) v = G::add(v, G::decode(u.color_of(e1)));
      r.images[generator::z(d, n)] = G::sub(v, phi.at(d)[n]);
    }
  }
  verify_extension<G>(sg, phi, r);
  return r;
}

/// Which pair of colors feeds phi(g_n): (2n, 2n+1) or (2n+1, 2n+2).
enum class color_scheme { even_pair, odd_pair };

/// phi(g_{delta,n}) = a_{n, c(i), c(i+1)} with i = 2n or 2n+1 per scheme.
inline relation_values<marked_free_sum> marked_phi(const coloring& c, std::size_t relations,
                                                   color_scheme scheme = color_scheme::odd_pair) {
  relation_values<marked_free_sum> phi;
  const std::size_t shift = scheme == color_scheme::odd_pair ? 1 : 0;
  for (const auto& [d, cs] : c.colors) {
    auto& out = phi[d];
    for (std::size_t n = 0; n < relations; ++n)
      out.push_back(marked_free_sum::basis(static_cast<unsigned long>(n), c.at(d, 2 * n + shift),
                                           c.at(d, 2 * n + shift + 1)));
  }
  return phi;
}

struct coincidence_certificate {
  ordinal delta, gamma;
  std::size_t index = 0;     // shared ladder index k
  std::size_t relation = 0;  // n with k in {2n+1, 2n+2}
  bool z0_vanish = false;    // projections of z_{delta,0}, z_{gamma,0} vanish
  bool z_agree = false;      // projections agree up to z_n
  bool identity = false;     // D = n! (z'_{gamma,n+1} - z'_{delta,n+1})
  bool divisible = false;    // n! divides every coefficient of D
  bool colors_equal = false;
  bool ok() const noexcept {
    return z0_vanish && z_agree && identity && divisible && colors_equal;
  }
};

struct recovery_result {
  uniformization_data data;
  std::map<ordinal, std::size_t> support_bound;  // least n' > 4 bounding phi~(z_{delta,0})
  std::vector<coincidence_certificate> certificates;
  bool ok() const {
    return std::all_of(certificates.begin(), certificates.end(),
                       [](const auto& c) { return c.ok(); });
  }
};

/*
 * Reads a uniformization off an extension phi~ of the marked phi (odd_pair
 * scheme). Psi*(delta) = 2n' + 1 where n' is the least integer > 4 with
 * phi~(z_{delta,0}) supported on a_{lmj}, l < n'; every k >= Psi* then sits in
 * a relation n >= n'. Each shared tail value is certified by rerunning the
 * divisibility argument on the projection to a_{n**}.
 */
inline recovery_result recover_uniformization(
    const stage_group& sg, const coloring& c,
    const extension_result<marked_free_sum>& ext,
    color_scheme scheme = color_scheme::odd_pair) {
  using M = marked_free_sum;
  require_pair_form(sg, "recover_uniformization");
  const auto& cfg = sg.config();
  const std::size_t N = sg.depth();
  const auto phi = marked_phi(c, N, scheme);

  extension_result<M> check = ext;
  verify_extension<M>(sg, phi, check);
  if (!check.ok()) {
    const auto& [d, n] = check.failures.front();
    throw validation_error("recover_uniformization: phi~ is not an extension at g(" + d.str() +
                           "," + std::to_string(n) + ")");
  }
  const auto tl = is_tree_like(cfg.system);
  if (!tl.tree_like)
    throw validation_error("recover_uniformization: ladder system is not tree-like: " + tl.reason);

  recovery_result r;
  for (const auto& d : sg.deltas()) {
    std::size_t np = 5;
    for (const auto& [k, _] : ext.images.at(generator::z(d, 0))) {
      const integer first = std::get<0>(M::triple(k));
      if (first + 1 > np) np = first.get_ui() + 1;
    }
    r.support_bound[d] = np;
    r.data.psi_star[d] = 2 * np + 1;
  }

  std::map<ordinal, std::vector<std::pair<ordinal, std::size_t>>> claims;
  for (const auto& [d, l] : cfg.system.ladders()) {
    const std::size_t top = std::min({l.size(), c.depth(d), 2 * N});
    if (top <= r.data.psi_star[d])
      throw depth_error("recover_uniformization: no explored tail on " + d.str() + " beyond index " +
                        std::to_string(r.data.psi_star[d]));
    for (std::size_t k = r.data.psi_star[d]; k < top; ++k) claims[l.entry(k)].push_back({d, k});
  }
  for (const auto& [value, who] : claims) {
    r.data.psi[value] = c.at(who.front().first, who.front().second);
    for (std::size_t q = 1; q < who.size(); ++q) {
      coincidence_certificate cert;
      cert.delta = who.front().first;
      cert.gamma = who[q].first;
      cert.index = who[q].second;
      const std::size_t k = cert.index;
      const std::size_t n = scheme == color_scheme::odd_pair ? (k - 1) / 2 : k / 2;
      cert.relation = n;
      const integer nn = static_cast<unsigned long>(n);
      auto proj = [&](const ordinal& d, std::size_t s) {
        return M::project_first(ext.images.at(generator::z(d, s)), nn);
      };
      if (who.front().second == k && n + 1 <= N) {
        cert.z0_vanish = proj(cert.delta, 0).empty() && proj(cert.gamma, 0).empty();
        cert.z_agree = true;
        for (std::size_t s = 0; s <= n; ++s)
          cert.z_agree &= proj(cert.delta, s) == proj(cert.gamma, s);
        const auto D = M::sub(phi.at(cert.delta)[n], phi.at(cert.gamma)[n]);
        const auto rhs =
            M::scale(M::sub(proj(cert.gamma, n + 1), proj(cert.delta, n + 1)), cfg.psi(n));
        cert.identity = D == rhs;
        cert.divisible = true;
        for (const auto& [_, coef] : D)
          cert.divisible &= mpz_divisible_p(coef.get_mpz_t(), cfg.psi(n).get_mpz_t()) != 0;
      }
      cert.colors_equal = c.at(cert.delta, k) == c.at(cert.gamma, k);
      r.certificates.push_back(cert);
    }
  }
  if (!r.ok()) {
    const auto& bad = *std::find_if(r.certificates.begin(), r.certificates.end(),
                                    [](const auto& x) { return !x.ok(); });
    throw validation_error("recover_uniformization: consistency violation between " +
                           bad.delta.str() + " and " + bad.gamma.str() + " at index " +
                           std::to_string(bad.index));
  }
  return r;
}

}  // namespace sepg

#endif  // SEPGROUP_UNIFORMIZATION_HPP
