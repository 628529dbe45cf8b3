#include <gtest/gtest.h>

#include <map>

#include "swlab/symcomb.hpp"

using namespace swlab;

namespace {

// Brute-force count of standard Young tableaux by filling cells in order.
long long count_syt(std::vector<int> shape) {
  int total = 0;
  for (int v : shape) total += v;
  if (total == 0) return 1;
  long long n = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    const bool corner = shape[i] > 0 && (i + 1 == shape.size() || shape[i + 1] < shape[i]);
    if (!corner) continue;
    --shape[i];
    n += count_syt(shape);
    ++shape[i];
  }
  return n;
}

long long partition_count(int n) {
  std::vector<long long> dp(n + 1, 0);
  dp[0] = 1;
  for (int part = 1; part <= n; ++part)
    for (int s = part; s <= n; ++s) dp[s] += dp[s - part];
  return dp[n];
}

} // namespace

TEST(Partitions, EnumerationOrderAndCount) {
  const auto p4 = enumerate_partitions(4);
  const std::vector<Partition> expect{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  EXPECT_EQ(p4, expect);
  for (int n = 0; n <= 12; ++n) EXPECT_EQ(static_cast<long long>(enumerate_partitions(n).size()), partition_count(n));
  EXPECT_EQ(enumerate_partitions(0).size(), 1u);
  EXPECT_THROW(enumerate_partitions(-1), argument_error);
}

TEST(Partitions, Validation) {
  EXPECT_THROW(Partition({1, 2}), argument_error);
  EXPECT_THROW(Partition({2, 0}), argument_error);
  EXPECT_EQ(Partition({3, 1}).conjugate(), Partition({2, 1, 1}));
}

TEST(Dimension, HookLengthMatchesTableauCount) {
  for (int n = 1; n <= 9; ++n)
    for (const auto& l : enumerate_partitions(n)) EXPECT_EQ(dimension(l), count_syt(l.parts())) << l;
  EXPECT_EQ(dimension(Partition{2, 1}), 2);
  EXPECT_EQ(dimension(Partition{3, 2}), 5);
}

TEST(Dimension, SumOfSquaresIsFactorial) {
  for (int n = 1; n <= 9; ++n) {
    long long s = 0;
    for (const auto& l : enumerate_partitions(n)) s += dimension(l) * dimension(l);
    EXPECT_EQ(s, static_cast<long long>(factorial(n)));
  }
}

TEST(Characters, KnownValuesS3) {
  const CycleType e{Partition{1, 1, 1}}, t{Partition{2, 1}}, c{Partition{3}};
  EXPECT_EQ(character(Partition{3}, t), 1);
  EXPECT_EQ(character(Partition{1, 1, 1}, t), -1);
  EXPECT_EQ(character(Partition{2, 1}, e), 2);
  EXPECT_EQ(character(Partition{2, 1}, t), 0);
  EXPECT_EQ(character(Partition{2, 1}, c), -1);
  EXPECT_THROW(character(Partition{2, 1}, CycleType{Partition{2}}), argument_error);
}

TEST(Characters, OrthogonalityRelations) {
  for (int n = 1; n <= 7; ++n) {
    const auto t = character_table(n);
    const double nf = static_cast<double>(factorial(n));
    for (std::size_t a = 0; a < t.irreps.size(); ++a)
      for (std::size_t b = 0; b < t.irreps.size(); ++b) {
        long long s = 0;
        for (std::size_t c = 0; c < t.classes.size(); ++c) s += t.classes[c].second * t.values[a][c] * t.values[b][c];
        EXPECT_EQ(static_cast<double>(s) / nf, a == b ? 1.0 : 0.0);
      }
    // column orthogonality
    for (std::size_t c = 0; c < t.classes.size(); ++c)
      for (std::size_t d = 0; d < t.classes.size(); ++d) {
        long long s = 0;
        for (std::size_t a = 0; a < t.irreps.size(); ++a) s += t.values[a][c] * t.values[a][d];
        EXPECT_EQ(s * (c == d ? t.classes[c].second : 1), c == d ? static_cast<long long>(factorial(n)) : 0);
      }
  }
}

TEST(Characters, SignAndTrivialRepresentations) {
  for (int n = 1; n <= 6; ++n)
    for (const auto& s : all_permutations(n)) {
      EXPECT_EQ(character(Partition{n}, s), 1);
      const int sign = ((n - static_cast<int>(s.cycles().size())) % 2) ? -1 : 1;
      EXPECT_EQ(character(Partition(std::vector<int>(n, 1)), s), sign);
      // the standard representation (n-1,1) has character fix(s) - 1
      if (n >= 2) {
        int fixed = 0;
        for (int i = 0; i < n; ++i) fixed += s(i) == i;
        EXPECT_EQ(character(Partition{n - 1, 1}, s), fixed - 1);
      }
    }
}

TEST(Classes, IdentityFirstAndSizesSum) {
  for (int n = 1; n <= 8; ++n) {
    const auto cl = conjugacy_classes(n);
    EXPECT_EQ(cl.front().first.parts, Partition(std::vector<int>(n, 1)));
    EXPECT_EQ(cl.front().second, 1);
    long long s = 0;
    for (const auto& [c, size] : cl) s += size;
    EXPECT_EQ(s, static_cast<long long>(factorial(n)));
  }
  // class sizes against direct counting in S_5
  std::map<std::vector<int>, long long> counts;
  for (const auto& s : all_permutations(5)) ++counts[s.cycle_lengths()];
  for (const auto& [c, size] : conjugacy_classes(5)) EXPECT_EQ(size, counts[c.parts.parts()]);
  EXPECT_THROW(conjugacy_classes(0), argument_error);
}

TEST(Classes, CsvHasHeaderAndRows) {
  const auto csv = character_table(3).to_csv();
  EXPECT_NE(csv.find("lambda"), std::string::npos);
  EXPECT_NE(csv.find("\"(2,1)\",2,0,-1"), std::string::npos);
}

TEST(Permutations, CompositionAndInverse) {
  const auto perms = all_permutations(4);
  EXPECT_EQ(perms.size(), 24u);
  for (const auto& a : perms) {
    EXPECT_TRUE((a * a.inverse()).is_identity());
    for (const auto& b : perms)
      for (int i = 0; i < 4; ++i) EXPECT_EQ((a * b)(i), a(b(i)));
  }
  EXPECT_THROW(Permutation(std::vector<int>{0, 0}), argument_error);
}
