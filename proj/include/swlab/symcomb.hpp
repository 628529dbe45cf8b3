#pragma once

// Symmetric-group combinatorics: partitions, irreducible dimensions and
// characters (Murnaghan–Nakayama, exact integers), conjugacy classes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "permutation.hpp"

namespace swlab {

/// Weakly decreasing sequence of positive integers.
class Partition {
public:
  Partition() = default;
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw argument_error("Partition: parts must be positive");
      if (i && parts_[i] > parts_[i - 1]) throw argument_error("Partition: parts must be weakly decreasing");
    }
  }
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}

  const std::vector<int>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  int weight() const {
    int w = 0;
    for (int v : parts_) w += v;
    return w;
  }
  int operator[](std::size_t i) const { return i < parts_.size() ? parts_[i] : 0; }

  /// Transposed diagram.
  Partition conjugate() const {
    std::vector<int> c;
    for (int col = 0; !parts_.empty() && col < parts_[0]; ++col) {
      int h = 0;
      for (int v : parts_)
        if (v > col) ++h;
      c.push_back(h);
    }
    return Partition(std::move(c));
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition& a, const Partition& b) { return a.parts_ <=> b.parts_; }

private:
  std::vector<int> parts_;
};

inline std::ostream& operator<<(std::ostream& os, const Partition& l) { return os << l.to_string(); }

/// Cycle type of a conjugacy class in S_p.
struct CycleType {
  Partition parts;

  int weight() const { return parts.weight(); }
  std::string to_string() const { return parts.to_string(); }
  friend bool operator==(const CycleType&, const CycleType&) = default;
  friend auto operator<=>(const CycleType&, const CycleType&) = default;
};

inline CycleType cycle_type(const Permutation& s) { return CycleType{Partition(s.cycle_lengths())}; }

namespace detail {

inline void partitions_rec(int remaining, int max_part, std::vector<int>& cur, std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(cur);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

/// Murnaghan–Nakayama on beta-sets: removing a rim hook of length r moves a
/// bead from position b to b-r; the sign counts beads jumped over.
inline std::int64_t mn_character(std::vector<int> beta, const std::vector<int>& rho, std::size_t idx,
                                 std::map<std::pair<std::vector<int>, std::size_t>, std::int64_t>& memo) {
  if (idx == rho.size()) return 1;
  auto key = std::make_pair(beta, idx);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const int r = rho[idx];
  std::set<int> beads(beta.begin(), beta.end());
  std::int64_t total = 0;
  for (int b : beta) {
    const int target = b - r;
    if (target < 0 || beads.count(target)) continue;
    int jumped = 0;
    for (int c : beta)
      if (c > target && c < b) ++jumped;
    std::vector<int> next;
    next.reserve(beta.size());
    for (int c : beta) next.push_back(c == b ? target : c);
    std::sort(next.rbegin(), next.rend());
    const std::int64_t sub = mn_character(next, rho, idx + 1, memo);
    total += (jumped % 2 ? -sub : sub);
  }
  memo.emplace(std::move(key), total);
  return total;
}

} // namespace detail

/// All partitions of p in lexicographically decreasing order; p = 0 gives {()}.
inline std::vector<Partition> enumerate_partitions(int p) {
  if (p < 0) throw argument_error("enumerate_partitions: p must be nonnegative");
  std::vector<Partition> out;
  std::vector<int> cur;
  detail::partitions_rec(p, p, cur, out);
  return out;
}

/// Number of standard Young tableaux of shape λ (hook-length formula).
inline std::int64_t dimension(const Partition& lambda) {
  const Partition conj = lambda.conjugate();
  // Multiply by numerator factors and divide by hooks in an interleaved, exact way.
  std::vector<std::int64_t> hooks;
  for (std::size_t i = 0; i < lambda.length(); ++i)
    for (int j = 0; j < lambda[i]; ++j) hooks.push_back((lambda[i] - j - 1) + (conj[j] - static_cast<int>(i) - 1) + 1);
  std::int64_t num = 1;
  std::int64_t den = 1;
  for (int k = 2; k <= lambda.weight(); ++k) num *= k;
  for (auto h : hooks) den *= h;
  return num / den;
}

/// χ^λ on the class with cycle type c.
inline std::int64_t character(const Partition& lambda, const CycleType& c) {
  if (lambda.weight() != c.weight()) throw argument_error("character: partitions of different weights");
  const std::size_t len = lambda.length();
  std::vector<int> beta(len);
  for (std::size_t i = 0; i < len; ++i) beta[i] = lambda[i] + static_cast<int>(len - 1 - i);
  std::map<std::pair<std::vector<int>, std::size_t>, std::int64_t> memo;
  return detail::mn_character(beta, c.parts.parts(), 0, memo);
}

inline std::int64_t character(const Partition& lambda, const Permutation& s) { return character(lambda, cycle_type(s)); }

/// Size of the conjugacy class with the given cycle type: p! / z_c.
inline std::int64_t class_size(const CycleType& c) {
  std::map<int, int> mult;
  for (int v : c.parts.parts()) ++mult[v];
  std::int64_t z = 1;
  for (auto [len, m] : mult) {
    for (int i = 0; i < m; ++i) z *= len;
    for (int i = 2; i <= m; ++i) z *= i;
  }
  return static_cast<std::int64_t>(factorial(static_cast<std::size_t>(c.weight()))) / z;
}

/// Conjugacy classes of S_p, identity class first.
inline std::vector<std::pair<CycleType, std::int64_t>> conjugacy_classes(int p) {
  if (p < 1) throw argument_error("conjugacy_classes: p must be at least 1");
  auto parts = enumerate_partitions(p);
  std::reverse(parts.begin(), parts.end());
  std::vector<std::pair<CycleType, std::int64_t>> out;
  for (auto& l : parts) {
    CycleType c{l};
    out.emplace_back(c, class_size(c));
  }
  return out;
}

struct CharacterTable {
  int p = 0;
  std::vector<Partition> irreps;                     // rows, lexicographically decreasing
  std::vector<std::pair<CycleType, std::int64_t>> classes;  // columns with class sizes
  std::vector<std::vector<std::int64_t>> values;     // values[row][col]

  std::string to_csv() const {
    std::ostringstream os;
    os << "lambda";
    for (const auto& [c, size] : classes) os << ",\"" << c.to_string() << '"';
    os << '\n';
    for (std::size_t r = 0; r < irreps.size(); ++r) {
      os << '"' << irreps[r].to_string() << '"';
      for (auto v : values[r]) os << ',' << v;
      os << '\n';
    }
    return os.str();
  }
};

inline CharacterTable character_table(int p) {
  CharacterTable t;
  t.p = p;
  t.irreps = enumerate_partitions(p);
  t.classes = conjugacy_classes(p);
  for (const auto& l : t.irreps) {
    std::vector<std::int64_t> row;
    for (const auto& [c, size] : t.classes) row.push_back(character(l, c));
    t.values.push_back(std::move(row));
  }
  return t;
}

} // namespace swlab
