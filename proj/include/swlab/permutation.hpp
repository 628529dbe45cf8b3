#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace swlab {

/// Permutation of {0, ..., n-1} stored by images: `image[i]` is where i goes.
///
/// Acting on tensor legs, the content of leg i is moved to leg image[i],
/// i.e. P(s)(x_0 ⊗ ... ⊗ x_{n-1}) has x_{s^{-1}(k)} at leg k.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(std::size_t n) : image_(n) { std::iota(image_.begin(), image_.end(), 0); }
  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<char> seen(image_.size(), 0);
    for (int v : image_) {
      if (v < 0 || static_cast<std::size_t>(v) >= image_.size() || seen[v])
        throw argument_error("Permutation: image is not a bijection");
      seen[v] = 1;
    }
  }

  static Permutation identity(std::size_t n) { return Permutation(n); }

  /// Transposition of legs i and j on n points.
  static Permutation transposition(std::size_t n, std::size_t i, std::size_t j) {
    Permutation s(n);
    std::swap(s.image_.at(i), s.image_.at(j));
    return s;
  }

  std::size_t size() const { return image_.size(); }
  int operator()(std::size_t i) const { return image_[i]; }
  const std::vector<int>& images() const { return image_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != static_cast<int>(i)) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<int> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<int>(i);
    Permutation r;
    r.image_ = std::move(inv);
    return r;
  }

  /// Cycles in canonical order (each starts at its smallest point, sorted by start).
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(image_.size(), 0);
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (seen[i]) continue;
      std::vector<int> cyc;
      int j = static_cast<int>(i);
      while (!seen[j]) {
        seen[j] = 1;
        cyc.push_back(j);
        j = image_[j];
      }
      out.push_back(std::move(cyc));
    }
    return out;
  }

  /// Cycle lengths, weakly decreasing.
  std::vector<int> cycle_lengths() const {
    std::vector<int> lens;
    for (const auto& c : cycles()) lens.push_back(static_cast<int>(c.size()));
    std::sort(lens.rbegin(), lens.rend());
    return lens;
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < image_.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(image_[i]);
    }
    return s + "]";
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.image_ <=> b.image_; }

private:
  std::vector<int> image_;
};

/// (a*b)(i) = a(b(i)): apply b first.
inline Permutation operator*(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw argument_error("Permutation product: size mismatch");
  std::vector<int> img(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) img[i] = a(static_cast<std::size_t>(b(i)));
  return Permutation(std::move(img));
}

/// All n! permutations in lexicographic order of their image vectors.
inline std::vector<Permutation> all_permutations(std::size_t n) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

/// Embed s (on n points) into n + extra points acting on [offset, offset+n).
inline Permutation embed(const Permutation& s, std::size_t total, std::size_t offset) {
  if (offset + s.size() > total) throw argument_error("embed: permutation does not fit");
  std::vector<int> img(total);
  std::iota(img.begin(), img.end(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) img[offset + i] = static_cast<int>(offset) + s(i);
  return Permutation(std::move(img));
}

inline std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

} // namespace swlab
