#ifndef SEPGROUP_LADDER_HPP
#define SEPGROUP_LADDER_HPP

#include <sepgroup/errors.hpp>
#include <sepgroup/ordinal.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sepg {

/*
 * Closed-form ladder family, affine in the block index n:
 *
 *   entry(n, j) = base + w^step * (n + 1) + offsets[n % P][j]
 *
 * Block n has offsets[n % P].size() entries. With step >= 1, offsets >= 1 and
 * strictly increasing inside each block, every such ladder is special and
 * cofinal in base + w^(step+1).
 */
struct affine_rule {
  ordinal base;
  unsigned step = 1;
  std::vector<std::vector<std::uint64_t>> offsets{{1}};

  std::size_t block_size(std::size_t n) const {
    return offsets[n % offsets.size()].size();
  }

  ordinal entry(std::size_t n, std::size_t j) const {
    return base + ordinal::omega_power(step, n + 1) +
           ordinal::finite(offsets[n % offsets.size()].at(j));
  }

  /// sup of the family.
  ordinal limit() const { return base + ordinal::omega_power(step + 1); }

  friend bool operator==(const affine_rule&, const affine_rule&) = default;
};

/*
 * A special ladder restricted to a finite explored prefix.
 *
 * breakpoints holds k_0 < k_1 < ... < k_B; block n is the index range
 * [k_n, k_{n+1}). Entries with index < k_0 belong to no block. The prefix
 * holds exactly k_B entries.
 */
class special_ladder {
 public:
  special_ladder() = default;

  special_ladder(ordinal delta, std::vector<ordinal> entries,
                 std::vector<std::size_t> breakpoints,
                 std::optional<affine_rule> rule = std::nullopt)
      : delta_(std::move(delta)),
        entries_(std::move(entries)),
        breakpoints_(std::move(breakpoints)),
        rule_(std::move(rule)) {
    if (breakpoints_.empty())
      throw validation_error("ladder: at least one breakpoint required");
    if (breakpoints_.back() != entries_.size())
      throw validation_error(
          "ladder: last breakpoint must equal the prefix length");
  }

  /// Rule-backed ladder explored to the given number of blocks.
  static special_ladder from_rule(ordinal delta, const affine_rule& rule,
                                  std::size_t blocks) {
    if (rule.offsets.empty())
      throw validation_error("affine rule: empty offset pattern");
    std::vector<ordinal> entries;
    std::vector<std::size_t> ks{0};
    for (std::size_t n = 0; n < blocks; ++n) {
      for (std::size_t j = 0; j < rule.block_size(n); ++j)
        entries.push_back(rule.entry(n, j));
      ks.push_back(entries.size());
    }
    return special_ladder(std::move(delta), std::move(entries), std::move(ks),
                          rule);
  }

  const ordinal& delta() const noexcept { return delta_; }
  const std::vector<ordinal>& entries() const noexcept { return entries_; }
  const std::vector<std::size_t>& breakpoints() const noexcept {
    return breakpoints_;
  }
  const std::optional<affine_rule>& rule() const noexcept { return rule_; }

  std::size_t blocks() const noexcept { return breakpoints_.size() - 1; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// k_n; n may equal blocks(), giving the end of the explored prefix.
  std::size_t block_start(std::size_t n) const {
    if (n > blocks()) check_block(n);
    return breakpoints_[n];
  }
  std::size_t block_size(std::size_t n) const {
    check_block(n);
    return breakpoints_[n + 1] - breakpoints_[n];
  }
  const ordinal& at(std::size_t n, std::size_t i) const {
    if (i >= block_size(n))
      throw scope_error("ladder: offset " + std::to_string(i) +
                        " outside block " + std::to_string(n));
    return entries_[breakpoints_[n] + i];
  }
  const ordinal& entry(std::size_t index) const {
    if (index >= entries_.size())
      throw depth_error("ladder on " + delta_.str() + ": index " +
                        std::to_string(index) + " beyond explored prefix");
    return entries_[index];
  }

  /// Block containing a ladder index, if any.
  std::optional<std::size_t> block_of(std::size_t index) const {
    if (index < breakpoints_.front() || index >= breakpoints_.back())
      return std::nullopt;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), index);
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  }

  /// Re-explore a rule-backed ladder to the given number of blocks. Prefix
  /// ladders can only shrink.
  special_ladder with_blocks(std::size_t blocks) const {
    if (blocks <= this->blocks()) return truncated(blocks);
    if (!rule_ || breakpoints_.front() != 0)
      throw depth_error("ladder on " + delta_.str() + " has only " +
                        std::to_string(this->blocks()) +
                        " explored blocks and no rule");
    return from_rule(delta_, *rule_, blocks);
  }

  special_ladder truncated(std::size_t blocks) const {
    if (blocks > this->blocks()) return with_blocks(blocks);
    std::vector<std::size_t> ks(breakpoints_.begin(),
                                breakpoints_.begin() + blocks + 1);
    std::vector<ordinal> es(entries_.begin(), entries_.begin() + ks.back());
    return special_ladder(delta_, std::move(es), std::move(ks), rule_);
  }

  friend bool operator==(const special_ladder&, const special_ladder&) = default;

 private:
  void check_block(std::size_t n) const {
    if (n >= blocks())
      throw depth_error("ladder on " + delta_.str() + ": block " +
                        std::to_string(n) + " beyond explored prefix");
  }

  ordinal delta_;
  std::vector<ordinal> entries_;
  std::vector<std::size_t> breakpoints_{0};
  std::optional<affine_rule> rule_;
};

struct violation {
  std::string clause;
  std::size_t index = 0;
  std::string detail;
};

struct validation_report {
  std::vector<violation> errors;
  std::vector<violation> warnings;

  bool ok() const noexcept { return errors.empty(); }

  std::string summary() const {
    std::ostringstream os;
    for (const auto& v : errors)
      os << "error " << v.clause << " @" << v.index << ": " << v.detail << '\n';
    for (const auto& v : warnings)
      os << "warning " << v.clause << " @" << v.index << ": " << v.detail
         << '\n';
    return os.str();
  }
};

/// Checks every clause of the special-ladder definition on the explored
/// prefix. Never throws.
inline validation_report validate_special(const special_ladder& l) {
  validation_report r;
  const auto& es = l.entries();
  const auto& ks = l.breakpoints();
  const ordinal& delta = l.delta();
  auto err = [&](std::string clause, std::size_t i, std::string d) {
    r.errors.push_back({std::move(clause), i, std::move(d)});
  };

  if (!delta.is_limit()) err("delta-not-limit", 0, delta.str());

  for (std::size_t i = 0; i < es.size(); ++i) {
    const bool degenerate_zero = i == 0 && es[i].is_zero();
    if (!es[i].is_successor() && !degenerate_zero)
      err("entry-not-successor", i, es[i].str());
    if (!(es[i] < delta))
      err("entry-not-below-delta", i, es[i].str() + " >= " + delta.str());
    if (i > 0 && !(es[i - 1] < es[i]))
      err("not-increasing", i, es[i - 1].str() + " >= " + es[i].str());
  }

  for (std::size_t n = 0; n + 1 < ks.size(); ++n)
    if (ks[n] >= ks[n + 1])
      err("breakpoints", n, "breakpoints must strictly increase");
  if (!r.ok()) return r;

  if (!ks.empty() && ks.front() == 0)
    r.warnings.push_back({"k0-zero", 0, "first breakpoint is 0, not > 0"});

  const ordinal w = ordinal::omega();
  for (std::size_t n = 0; n < l.blocks(); ++n) {
    const ordinal head = es[ks[n]] + w;
    for (std::size_t i = 1; i < l.block_size(n); ++i)
      if (es[ks[n] + i] + w != head)
        err("block-omega-mismatch", n,
            "entry " + std::to_string(ks[n] + i) + " leaves the w-block of " +
                head.str());
    // The first entry of block n+1 may lie beyond the explored prefix; use
    // the rule when present.
    std::optional<ordinal> next;
    if (n + 1 < l.blocks()) next = es[ks[n + 1]];
    else if (l.rule() && ks.front() == 0) next = l.rule()->entry(n + 1, 0);
    if (next && !(head < *next))
      err("block-separation", n, head.str() + " is not below " + next->str());
  }

  if (l.rule()) {
    const affine_rule& rule = *l.rule();
    if (rule.step < 1) err("rule-shape", 0, "step exponent must be >= 1");
    if (!rule.base.is_zero() && rule.base.terms().back().exponent <= rule.step)
      err("rule-shape", 0, "base must be divisible by w^(step+1)");
    if (rule.limit() != delta)
      err("rule-cofinality", 0,
          "rule supremum " + rule.limit().str() + " != " + delta.str());
    if (ks.front() != 0) {
      err("rule-mismatch", 0, "rule-backed ladders start their first block at 0");
    } else {
      for (std::size_t n = 0; n < l.blocks(); ++n) {
        if (rule.block_size(n) != l.block_size(n)) {
          err("rule-mismatch", n, "block size differs from rule");
          continue;
        }
        for (std::size_t j = 0; j < l.block_size(n); ++j)
          if (rule.entry(n, j) != l.at(n, j))
            err("rule-mismatch", ks[n] + j, "entry differs from rule");
      }
    }
  } else {
    r.warnings.push_back({"cofinality-uncertified", 0,
                          "prefix-only ladder: cofinality in " + delta.str() +
                              " is not certified"});
  }
  return r;
}

/// rd of a special ladder: the block values eta(k_n) + w, plus the expanded
/// per-index values eta(i) + w for every blocked index.
struct omega_range {
  std::vector<ordinal> blocks;
  std::vector<ordinal> per_index;  // indexed from k_0

  friend bool operator==(const omega_range&, const omega_range&) = default;
};

inline omega_range compute_omega_range(const special_ladder& l) {
  auto rep = validate_special(l);
  if (!rep.ok())
    throw validation_error("omega_range: invalid ladder on " + l.delta().str() +
                           "\n" + rep.summary());
  omega_range r;
  const ordinal w = ordinal::omega();
  for (std::size_t n = 0; n < l.blocks(); ++n) {
    r.blocks.push_back(l.at(n, 0) + w);
    for (std::size_t i = 0; i < l.block_size(n); ++i)
      r.per_index.push_back(l.at(n, i) + w);
  }
  return r;
}

/*
 * Builds the simple special ladder (k_n = n) on delta.
 *
 * delta must be w^2-divisible; writing its last term as w^e * c (e >= 2) the
 * ladder is  base + w^(e-1) * (n + 1) + 1  with base = delta - w^e.
 */
inline special_ladder make_simple_special(const ordinal& delta,
                                          std::size_t depth) {
  if (!delta.is_limit())
    throw validation_error("make_simple_special: " + delta.str() +
                           " is not a limit ordinal");
  if (!delta.divisible_by_omega_sq())
    throw validation_error("make_simple_special: w^2 does not divide " +
                           delta.str());
  if (depth == 0) throw validation_error("make_simple_special: depth must be >= 1");
  std::vector<cnf_term> base_terms = delta.terms();
  const unsigned e = base_terms.back().exponent;
  if (--base_terms.back().coefficient == 0) base_terms.pop_back();
  affine_rule rule{ordinal::from_terms(std::move(base_terms)), e - 1, {{1}}};
  return special_ladder::from_rule(delta, rule, depth);
}

/*
 * Companion ladder nu with rd(nu) = rd(eta): block n of nu has
 * block_sizes[n % size] entries  floor(eta(k_n)) + 1, ..., floor(eta(k_n)) + t
 * where floor drops the finite part. Breakpoints start at 0.
 */
inline special_ladder companion_same_rd(const special_ladder& eta,
                                        const std::vector<std::size_t>& block_sizes) {
  auto rep = validate_special(eta);
  if (!rep.ok())
    throw validation_error("companion_same_rd: invalid source ladder\n" +
                           rep.summary());
  if (block_sizes.empty())
    throw validation_error("companion_same_rd: no block sizes");
  for (auto t : block_sizes)
    if (t == 0) throw validation_error("companion_same_rd: block size 0");

  std::vector<ordinal> entries;
  std::vector<std::size_t> ks{0};
  for (std::size_t n = 0; n < eta.blocks(); ++n) {
    const ordinal floor = eta.at(n, 0).without_finite_part();
    if (floor.is_zero())
      throw validation_error(
          "companion_same_rd: block " + std::to_string(n) +
          " lies in the first w-block; no room below it for a companion");
    const std::size_t t = block_sizes[n % block_sizes.size()];
    for (std::size_t i = 0; i < t; ++i)
      entries.push_back(floor + ordinal::finite(i + 1));
    ks.push_back(entries.size());
  }

  std::optional<affine_rule> rule;
  if (eta.rule()) {
    affine_rule r{eta.rule()->base, eta.rule()->step, {}};
    for (auto t : block_sizes) {
      std::vector<std::uint64_t> offs;
      for (std::size_t i = 0; i < t; ++i) offs.push_back(i + 1);
      r.offsets.push_back(std::move(offs));
    }
    rule = std::move(r);
  }
  special_ladder nu(eta.delta(), std::move(entries), std::move(ks), rule);
  auto check = validate_special(nu);
  if (!check.ok())
    throw validation_error("companion_same_rd: companion failed validation\n" +
                           check.summary());
  return nu;
}

/// Least explored block index n with eta(k_n) >= threshold. Rule-backed
/// ladders are searched through their closed form.
inline std::size_t first_index_reaching(const special_ladder& l,
                                        const ordinal& threshold) {
  if (!(threshold < l.delta()))
    throw scope_error("first_index_reaching: threshold " + threshold.str() +
                      " is not below " + l.delta().str());
  for (std::size_t n = 0; n < l.blocks(); ++n)
    if (l.at(n, 0) >= threshold) return n;
  if (!l.rule() || l.breakpoints().front() != 0)
    throw depth_error("first_index_reaching: prefix of ladder on " +
                      l.delta().str() + " exhausted before " + threshold.str());
  const affine_rule& rule = *l.rule();
  // Galloping search on the monotone closed form.
  std::size_t lo = l.blocks();
  std::size_t hi = std::max<std::size_t>(lo, 1);
  while (rule.entry(hi, 0) < threshold) {
    lo = hi;
    if (hi > (std::size_t{1} << 62))
      throw depth_error("first_index_reaching: threshold out of reach");
    hi *= 2;
  }
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (rule.entry(mid, 0) >= threshold) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

/// Special ladder system on S cap alpha.
class ladder_system {
 public:
  ladder_system() = default;
  explicit ladder_system(ordinal alpha) : alpha_(std::move(alpha)) {}

  const ordinal& alpha() const noexcept { return alpha_; }
  const std::map<ordinal, special_ladder>& ladders() const noexcept {
    return ladders_;
  }
  std::size_t size() const noexcept { return ladders_.size(); }
  bool contains(const ordinal& delta) const { return ladders_.count(delta) != 0; }

  const special_ladder& at(const ordinal& delta) const {
    auto it = ladders_.find(delta);
    if (it == ladders_.end())
      throw scope_error("ladder system: no ladder on " + delta.str());
    return it->second;
  }

  std::vector<ordinal> deltas() const {
    std::vector<ordinal> out;
    for (const auto& [d, _] : ladders_) out.push_back(d);
    return out;
  }

  /// Inserts a ladder, rejecting deltas outside S cap alpha.
  void add(special_ladder l) {
    const ordinal& d = l.delta();
    if (!d.is_limit())
      throw validation_error("ladder system: " + d.str() + " is not a limit");
    if (!d.divisible_by_omega_sq())
      throw validation_error("ladder system: w^2 does not divide " + d.str());
    if (!(d < alpha_))
      throw validation_error("ladder system: " + d.str() + " is not below " +
                             alpha_.str());
    if (contains(d))
      throw validation_error("ladder system: duplicate delta " + d.str());
    auto rep = validate_special(l);
    if (!rep.ok())
      throw validation_error("ladder system: invalid ladder on " + d.str() +
                             "\n" + rep.summary());
    ladders_.emplace(d, std::move(l));
  }

  /// S cap alpha' with the same ladders.
  ladder_system restricted(const ordinal& alpha) const {
    ladder_system out(alpha);
    for (const auto& [d, l] : ladders_)
      if (d < alpha) out.ladders_.emplace(d, l);
    return out;
  }

  /// Every ladder re-explored to `blocks` blocks (rule-backed) or truncated.
  ladder_system with_blocks(std::size_t blocks) const {
    ladder_system out(alpha_);
    for (const auto& [d, l] : ladders_) out.ladders_.emplace(d, l.with_blocks(blocks));
    return out;
  }

  std::size_t min_blocks() const {
    std::size_t m = ladders_.empty() ? 0 : SIZE_MAX;
    for (const auto& [_, l] : ladders_) m = std::min(m, l.blocks());
    return m;
  }

 private:
  ordinal alpha_;
  std::map<ordinal, special_ladder> ladders_;
};

/// Blockwise rd equality over the common explored prefix.
inline bool same_omega_range(const ladder_system& a, const ladder_system& b,
                             std::string* why = nullptr) {
  if (a.deltas() != b.deltas()) {
    if (why) *why = "different sets of deltas";
    return false;
  }
  for (const auto& [d, la] : a.ladders()) {
    const auto ra = compute_omega_range(la);
    const auto rb = compute_omega_range(b.at(d));
    const std::size_t n = std::min(ra.blocks.size(), rb.blocks.size());
    for (std::size_t i = 0; i < n; ++i)
      if (ra.blocks[i] != rb.blocks[i]) {
        if (why)
          *why = "rd differs on " + d.str() + " at block " + std::to_string(i);
        return false;
      }
  }
  return true;
}

struct tree_like_result {
  bool tree_like = true;
  // Witness: eta_{delta_a}(index_a) = eta_{delta_b}(index_b) with a failing
  // conclusion.
  ordinal delta_a, delta_b;
  std::size_t index_a = 0, index_b = 0;
  std::string reason;
};

/// Coincidences between ladders must sit at equal indices with full
/// agreement below. Scans the explored prefixes.
inline tree_like_result is_tree_like(const ladder_system& sys) {
  std::map<ordinal, std::vector<std::pair<ordinal, std::size_t>>> where;
  for (const auto& [d, l] : sys.ladders())
    for (std::size_t i = 0; i < l.size(); ++i) where[l.entry(i)].push_back({d, i});
  for (const auto& [value, occ] : where) {
    for (std::size_t p = 0; p < occ.size(); ++p)
      for (std::size_t q = p + 1; q < occ.size(); ++q) {
        const auto& [da, ia] = occ[p];
        const auto& [db, ib] = occ[q];
        tree_like_result r{false, da, db, ia, ib, {}};
        if (ia != ib) {
          r.reason = "shared value " + value.str() + " at different indices";
          return r;
        }
        const auto& la = sys.at(da);
        const auto& lb = sys.at(db);
        for (std::size_t k = 0; k < ia; ++k)
          if (la.entry(k) != lb.entry(k)) {
            r.reason = "shared value " + value.str() +
                       " without agreement at index " + std::to_string(k);
            return r;
          }
      }
  }
  return {};
}

}  // namespace sepg

#endif  // SEPGROUP_LADDER_HPP
