#ifndef SEPGROUP_FREE_ELEMENT_HPP
#define SEPGROUP_FREE_ELEMENT_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/ordinal.hpp>

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

using integer = mpz_class;
using rational = mpq_class;

enum class generator_kind : std::uint8_t { w = 0, x = 1, y = 2, z = 3 };

/*
 * Abstract generator of the ambient free module.
 *
 *   X(beta)      x_beta (or its hatted copy in the twisted module)
 *   Y(delta, n)  y_{delta,n}
 *   Z(delta, n)  formal symbol for z_{delta,n} in free presentations
 *   W            the distinguished kernel generator w-hat
 */
struct generator {
  generator_kind kind = generator_kind::w;
  ordinal index;
  std::uint64_t n = 0;

  static generator x(ordinal beta) { return {generator_kind::x, std::move(beta), 0}; }
  static generator y(ordinal delta, std::uint64_t n = 0) {
    return {generator_kind::y, std::move(delta), n};
  }
  static generator z(ordinal delta, std::uint64_t n) {
    return {generator_kind::z, std::move(delta), n};
  }
  static generator w() { return {}; }

  bool is_x() const noexcept { return kind == generator_kind::x; }
  bool is_y() const noexcept { return kind == generator_kind::y; }
  bool is_z() const noexcept { return kind == generator_kind::z; }
  bool is_w() const noexcept { return kind == generator_kind::w; }

  std::string str() const {
    switch (kind) {
      case generator_kind::w: return "W";
      case generator_kind::x: return "X(" + index.str() + ")";
      case generator_kind::y: return "Y(" + index.str() + "," + std::to_string(n) + ")";
      case generator_kind::z: return "Z(" + index.str() + "," + std::to_string(n) + ")";
    }
    return "?";
  }

  friend bool operator==(const generator&, const generator&) = default;
  friend std::strong_ordering operator<=>(const generator& a, const generator& b) {
    if (a.kind != b.kind) return a.kind <=> b.kind;
    if (auto c = a.index <=> b.index; c != 0) return c;
    return a.n <=> b.n;
  }
};

/// Finite rational combination of generators; zero coefficients are never
/// stored, so == is structural equality.
class free_element {
 public:
  using map_type = std::map<generator, rational>;

  free_element() = default;
  free_element(const generator& g) { terms_.emplace(g, rational(1)); }  // NOLINT
  free_element(const generator& g, const rational& c) { add(g, c); }

  const map_type& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  rational coefficient(const generator& g) const {
    auto it = terms_.find(g);
    return it == terms_.end() ? rational(0) : it->second;
  }

  free_element& add(const generator& g, const rational& c) {
    if (c == 0) return *this;
    auto [it, inserted] = terms_.try_emplace(g, c);
    if (inserted) {
      it->second.canonicalize();
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  free_element& operator+=(const free_element& o) {
    for (const auto& [g, c] : o.terms_) add(g, c);
    return *this;
  }
  free_element& operator-=(const free_element& o) {
    for (const auto& [g, c] : o.terms_) add(g, -c);
    return *this;
  }
  free_element& operator*=(const rational& s) {
    if (s == 0) terms_.clear();
    else
      for (auto& [g, c] : terms_) c *= s;
    return *this;
  }

  friend free_element operator+(free_element a, const free_element& b) { return a += b; }
  friend free_element operator-(free_element a, const free_element& b) { return a -= b; }
  friend free_element operator-(free_element a) { return a *= rational(-1); }
  friend free_element operator*(const rational& s, free_element a) { return a *= s; }
  friend free_element operator*(free_element a, const rational& s) { return a *= s; }

  friend bool operator==(const free_element& a, const free_element& b) {
    return a.terms_ == b.terms_;
  }

  bool all_integral() const {
    for (const auto& [_, c] : terms_)
      if (c.get_den() != 1) return false;
    return true;
  }

  /// lcm of the coefficient denominators (1 for integral elements).
  integer denominator_lcm() const {
    integer l = 1;
    for (const auto& [_, c] : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    return l;
  }

  /// Canonical text: terms in generator order, "c*G" with rationals as p/q.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [g, c] : terms_) {
      rational a = c;
      if (first) {
        if (a < 0) {
          s += "-";
          a = -a;
        }
      } else {
        s += a < 0 ? " - " : " + ";
        if (a < 0) a = -a;
      }
      first = false;
      s += a.get_str() + "*" + g.str();
    }
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const free_element& e) {
    return os << e.str();
  }

 private:
  map_type terms_;
};

/// Finite map generator -> element, extended linearly. Applying it to an
/// element with support outside the declared domain is an error.
class generator_map {
 public:
  void set(const generator& g, free_element image) { images_[g] = std::move(image); }

  bool defined_on(const generator& g) const { return images_.count(g) != 0; }

  const free_element& image(const generator& g) const {
    auto it = images_.find(g);
    if (it == images_.end())
      throw scope_error("generator map: " + g.str() + " outside domain");
    return it->second;
  }

  free_element apply(const free_element& e) const {
    free_element out;
    for (const auto& [g, c] : e.terms()) out += c * image(g);
    return out;
  }

  const std::map<generator, free_element>& images() const noexcept { return images_; }

  friend bool operator==(const generator_map&, const generator_map&) = default;

 private:
  std::map<generator, free_element> images_;
};

/// g after f on f's domain.
inline generator_map compose(const generator_map& g, const generator_map& f) {
  generator_map out;
  for (const auto& [gen, img] : f.images()) out.set(gen, g.apply(img));
  return out;
}

struct hom_report {
  std::size_t checked = 0;
  std::vector<std::pair<std::size_t, free_element>> failures;  // relation index, image

  bool ok() const noexcept { return failures.empty(); }
};

using element_normalizer = std::function<free_element(const free_element&)>;

/*
 * Applies `map` to every relation and reports the nonzero images. The
 * optional normalizer evaluates an image inside the target (e.g. expands
 * formal z symbols into the ambient module) before the zero test.
 */
inline hom_report verify_hom(const generator_map& map,
                             const std::vector<free_element>& relations,
                             const element_normalizer& normalize = {}) {
  hom_report r;
  for (std::size_t i = 0; i < relations.size(); ++i) {
    free_element img = map.apply(relations[i]);
    if (normalize) img = normalize(img);
    ++r.checked;
    if (!img.is_zero()) r.failures.emplace_back(i, std::move(img));
  }
  return r;
}

}  // namespace sepg

#endif  // SEPGROUP_FREE_ELEMENT_HPP
