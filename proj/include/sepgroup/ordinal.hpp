#ifndef SEPGROUP_ORDINAL_HPP
#define SEPGROUP_ORDINAL_HPP

#include <sepgroup/errors.hpp>

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sepg {

/// One Cantor-normal-form term w^exponent * coefficient.
struct cnf_term {
  unsigned exponent = 0;
  std::uint64_t coefficient = 0;

  friend bool operator==(const cnf_term&, const cnf_term&) = default;
};

enum class ordinal_class { zero, successor, limit };

/*
 * Ordinal below w^w in Cantor normal form.
 *
 * Terms are kept with strictly decreasing exponents and positive
 * coefficients, so two ordinals are equal iff their term lists are equal.
 * The textual form is
 *
 *   sum  := term ("+" term)*
 *   term := "w^" NAT ("*" NAT)? | "w" ("*" NAT)? | NAT
 *
 * and formatting always writes the coefficient of infinite terms
 * ("w*1", "w^2*3"), so str() of a parsed literal reproduces the literal
 * whenever the literal itself spelled every coefficient.
 */
class ordinal {
 public:
  ordinal() = default;

  static ordinal finite(std::uint64_t n) {
    ordinal o;
    if (n != 0) o.terms_.push_back({0, n});
    return o;
  }

  static ordinal omega_power(unsigned exponent, std::uint64_t coefficient = 1) {
    ordinal o;
    if (coefficient != 0) o.terms_.push_back({exponent, coefficient});
    return o;
  }

  static ordinal omega() { return omega_power(1); }

  static ordinal from_terms(std::vector<cnf_term> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coefficient == 0)
        throw validation_error("ordinal: zero coefficient in CNF term");
      if (i > 0 && terms[i].exponent >= terms[i - 1].exponent)
        throw validation_error("ordinal: exponents must strictly decrease");
    }
    ordinal o;
    o.terms_ = std::move(terms);
    return o;
  }

  static ordinal parse(std::string_view text);

  const std::vector<cnf_term>& terms() const noexcept { return terms_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_successor() const noexcept {
    return !terms_.empty() && terms_.back().exponent == 0;
  }
  bool is_limit() const noexcept {
    return !terms_.empty() && terms_.back().exponent >= 1;
  }

  ordinal_class classify() const noexcept {
    if (is_zero()) return ordinal_class::zero;
    return is_successor() ? ordinal_class::successor : ordinal_class::limit;
  }

  /// True iff w^2 divides this ordinal (0 included).
  bool divisible_by_omega_sq() const noexcept {
    for (const auto& t : terms_)
      if (t.exponent < 2) return false;
    return true;
  }

  std::uint64_t finite_part() const noexcept {
    return is_successor() ? terms_.back().coefficient : 0;
  }

  /// The largest limit-or-zero ordinal not exceeding this one.
  ordinal without_finite_part() const {
    ordinal o = *this;
    if (o.is_successor()) o.terms_.pop_back();
    return o;
  }

  /// Leading exponent; 0 for the zero ordinal.
  unsigned degree() const noexcept {
    return terms_.empty() ? 0 : terms_.front().exponent;
  }

  std::string str() const;

  friend bool operator==(const ordinal&, const ordinal&) = default;
  friend std::strong_ordering operator<=>(const ordinal& a, const ordinal& b);
  friend ordinal operator+(const ordinal& a, const ordinal& b);

  ordinal& operator+=(const ordinal& b) { return *this = *this + b; }

  friend std::ostream& operator<<(std::ostream& os, const ordinal& o) {
    return os << o.str();
  }

 private:
  std::vector<cnf_term> terms_;
};

inline std::strong_ordering operator<=>(const ordinal& a, const ordinal& b) {
  const auto& x = a.terms_;
  const auto& y = b.terms_;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i].exponent != y[i].exponent) return x[i].exponent <=> y[i].exponent;
    if (x[i].coefficient != y[i].coefficient)
      return x[i].coefficient <=> y[i].coefficient;
  }
  return x.size() <=> y.size();
}

inline ordinal operator+(const ordinal& a, const ordinal& b) {
  if (b.is_zero()) return a;
  const unsigned lead = b.terms_.front().exponent;
  ordinal out;
  std::uint64_t carry = 0;
  for (const auto& t : a.terms_) {
    if (t.exponent > lead) out.terms_.push_back(t);
    else if (t.exponent == lead) carry = t.coefficient;
    else break;
  }
  for (std::size_t i = 0; i < b.terms_.size(); ++i) {
    cnf_term t = b.terms_[i];
    if (i == 0 && carry != 0) {
      if (t.coefficient > std::numeric_limits<std::uint64_t>::max() - carry)
        throw validation_error("ordinal addition: coefficient overflow");
      t.coefficient += carry;
    }
    out.terms_.push_back(t);
  }
  return out;
}

inline std::string ordinal::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0) s += '+';
    const auto& t = terms_[i];
    if (t.exponent == 0) {
      s += std::to_string(t.coefficient);
    } else {
      s += 'w';
      if (t.exponent > 1) s += '^' + std::to_string(t.exponent);
      s += '*' + std::to_string(t.coefficient);
    }
  }
  return s;
}

namespace detail {

inline std::uint64_t parse_nat(std::string_view text, std::size_t& pos) {
  const std::size_t start = pos;
  std::uint64_t value = 0;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    const std::uint64_t digit = static_cast<std::uint64_t>(text[pos] - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
      throw parse_error("ordinal literal: number too large at offset " +
                        std::to_string(start));
    value = value * 10 + digit;
    ++pos;
  }
  if (pos == start)
    throw parse_error("ordinal literal: expected a number at offset " +
                      std::to_string(start));
  if (pos - start > 1 && text[start] == '0')
    throw parse_error("ordinal literal: leading zero at offset " +
                      std::to_string(start));
  return value;
}

}  // namespace detail

inline ordinal ordinal::parse(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.remove_suffix(1);
  if (text.empty()) throw parse_error("ordinal literal: empty");
  if (text == "0") return ordinal{};

  std::vector<cnf_term> terms;
  std::size_t pos = 0;
  while (true) {
    cnf_term t;
    if (text[pos] == 'w') {
      ++pos;
      t.exponent = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        const std::uint64_t e = detail::parse_nat(text, pos);
        if (e < 2)
          throw parse_error("ordinal literal: non-canonical exponent w^" +
                            std::to_string(e));
        if (e > std::numeric_limits<unsigned>::max())
          throw parse_error("ordinal literal: exponent too large");
        t.exponent = static_cast<unsigned>(e);
      }
      t.coefficient = 1;
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        t.coefficient = detail::parse_nat(text, pos);
      }
    } else {
      t.exponent = 0;
      t.coefficient = detail::parse_nat(text, pos);
    }
    if (t.coefficient == 0)
      throw parse_error("ordinal literal: zero coefficient in '" +
                        std::string(text) + "'");
    if (!terms.empty() && t.exponent >= terms.back().exponent)
      throw parse_error("ordinal literal: non-canonical term order in '" +
                        std::string(text) + "'");
    terms.push_back(t);
    if (pos == text.size()) break;
    if (text[pos] != '+')
      throw parse_error("ordinal literal: unexpected '" +
                        std::string(1, text[pos]) + "' at offset " +
                        std::to_string(pos));
    ++pos;
    if (pos == text.size())
      throw parse_error("ordinal literal: trailing '+'");
  }
  return from_terms(std::move(terms));
}

/// Least alpha with beta < alpha + w (the admission level of x_beta).
inline ordinal level_below_omega_shift(const ordinal& beta) {
  return beta.without_finite_part();
}

}  // namespace sepg

#endif  // SEPGROUP_ORDINAL_HPP
