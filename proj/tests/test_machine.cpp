#include "twostacks/machine.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

namespace ts = twostacks;
using ts::Letter;
using ts::parse_word;
using ts::Permutation;

namespace {

// Operation sequences of size n, generated without reference to the machine:
// every arrangement of n of each letter that keeps the staircase condition.
std::vector<ts::Word> operation_sequences(std::size_t n) {
  std::vector<ts::Word> out;
  ts::Word w;
  auto rec = [&](auto&& self, std::size_t r, std::size_t l, std::size_t m) -> void {
    if (m == n) {
      out.push_back(w);
      return;
    }
    if (r < n) {
      w.push_back(Letter::Rho);
      self(self, r + 1, l, m);
      w.pop_back();
    }
    if (l < r) {
      w.push_back(Letter::Lambda);
      self(self, r, l + 1, m);
      w.pop_back();
    }
    if (m < l) {
      w.push_back(Letter::Mu);
      self(self, r, l, m + 1);
      w.pop_back();
    }
  };
  rec(rec, 0, 0, 0);
  return out;
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST(OperationSequence, Examples) {
  EXPECT_TRUE(ts::is_operation_sequence(parse_word("ρλμ"), 1));
  EXPECT_FALSE(ts::is_operation_sequence(parse_word("ρμλ"), 1));
  EXPECT_TRUE(ts::is_operation_sequence(parse_word("ρρλλμμ"), 2));
  EXPECT_TRUE(ts::is_operation_sequence({}, 0));
  EXPECT_FALSE(ts::is_operation_sequence(parse_word("rlm"), 2));
  EXPECT_FALSE(ts::is_operation_sequence(parse_word("rrllmm"), 1));
}

TEST(OperationSequence, AgreesWithConstructiveDefinition) {
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto seqs = operation_sequences(n);
    std::size_t accepted = 0;
    for (const auto& w : ts::all_words(3 * n)) accepted += ts::is_operation_sequence(w, n);
    EXPECT_EQ(accepted, seqs.size()) << "n = " << n;
    for (const auto& w : seqs) EXPECT_TRUE(ts::is_operation_sequence(w, n));
  }
}

TEST(ApplyLetter, SingleMoves) {
  auto s = ts::MachineState::with_input({1});
  s = ts::apply_letter(s, Letter::Rho);
  EXPECT_TRUE(s.input.empty());
  EXPECT_EQ(s.stack1, std::vector<int>{1});
  s = ts::apply_letter(s, Letter::Lambda);
  EXPECT_TRUE(s.stack1.empty());
  EXPECT_EQ(s.stack2, std::vector<int>{1});
  s = ts::apply_letter(s, Letter::Mu);
  EXPECT_TRUE(s.stack2.empty());
  EXPECT_EQ(s.output, std::vector<int>{1});
}

TEST(ApplyLetter, IllegalMovesThrow) {
  const ts::MachineState empty;
  for (Letter l : ts::kAlphabet) {
    try {
      (void)ts::apply_letter(empty, l);
      FAIL() << "expected IllegalMove";
    } catch (const ts::Error& e) {
      EXPECT_EQ(e.kind(), ts::ErrorKind::IllegalMove);
    }
  }
}

TEST(RunSequence, HandTraces) {
  EXPECT_EQ(ts::run_sequence(1, parse_word("ρλμ")).values, (std::vector<int>{1}));
  // Stack 1 reverses 1,2 and stack 2 reverses it back.
  EXPECT_EQ(ts::run_sequence(2, parse_word("ρρλλμμ")).values, (std::vector<int>{1, 2}));
  EXPECT_EQ(ts::run_sequence(2, parse_word("ρλρλμμ")).values, (std::vector<int>{2, 1}));
  EXPECT_EQ(ts::run_sequence(2, parse_word("ρλμρλμ")).values, (std::vector<int>{1, 2}));
  EXPECT_TRUE(ts::run_sequence(0, {}).values.empty());
}

TEST(RunSequence, RejectsNonOperationSequences) {
  EXPECT_THROW((void)ts::run_sequence(1, parse_word("ρμλ")), ts::Error);
}

TEST(RunSequence, AlwaysValidAndNotInjective) {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::set<Permutation> seen;
    const auto seqs = operation_sequences(n);
    for (const auto& w : seqs) {
      const Permutation p = ts::run_sequence(n, w);
      EXPECT_TRUE(p.is_valid());
      seen.insert(p);
    }
    if (n >= 2) EXPECT_LT(seen.size(), seqs.size());
  }
}

TEST(Machine, LabelConservationUnderRandomMoves) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    auto s = ts::MachineState::with_input(Permutation::identity(n).values);
    const auto expected = s.labels();
    for (int step = 0; step < 40; ++step) {
      std::vector<Letter> legal;
      for (Letter l : ts::kAlphabet)
        if (s.can_apply(l)) legal.push_back(l);
      if (legal.empty()) break;
      s = ts::apply_letter(s, legal[rng() % legal.size()]);
      ASSERT_EQ(s.labels(), expected);
    }
  }
}

TEST(AchievableBrute, SmallSizes) {
  EXPECT_EQ(ts::achievable_brute(0).size(), 1u);
  EXPECT_EQ(ts::achievable_brute(3).size(), 6u);
  EXPECT_EQ(ts::achievable_brute(7).size(), 5018u);
}

TEST(AchievableBrute, MatchesRunningEveryOperationSequence) {
  for (std::size_t n = 0; n <= 5; ++n) {
    std::set<Permutation> direct;
    for (const auto& w : operation_sequences(n)) direct.insert(ts::run_sequence(n, w));
    EXPECT_EQ(ts::achievable_brute(n), direct) << "n = " << n;
  }
}

TEST(SortableBrute, Examples) {
  EXPECT_TRUE(ts::sortable_brute(Permutation{{1, 2, 3}}));
  EXPECT_TRUE(ts::sortable_brute(Permutation{}));
  for (std::size_t n = 1; n <= 6; ++n) {
    Permutation p = Permutation::identity(n);
    do ASSERT_TRUE(ts::sortable_brute(p)) << ts::to_string(p);
    while (std::next_permutation(p.values.begin(), p.values.end()));
  }
}

TEST(SortableBrute, TwentyTwoUnsortableOfLengthSeven) {
  Permutation p = Permutation::identity(7);
  std::size_t unsortable = 0;
  do unsortable += !ts::sortable_brute(p);
  while (std::next_permutation(p.values.begin(), p.values.end()));
  EXPECT_EQ(unsortable, 22u);
}

TEST(SortableBrute, CountEqualsAchievableCount) {
  for (std::size_t n = 0; n <= 8; ++n) {
    Permutation p = Permutation::identity(n);
    std::size_t sortable = 0;
    do sortable += ts::sortable_brute(p);
    while (std::next_permutation(p.values.begin(), p.values.end()));
    EXPECT_EQ(sortable, ts::achievable_brute(n).size()) << "n = " << n;
    if (n <= 6) EXPECT_EQ(sortable, factorial(n));
  }
}

TEST(SortableBrute, AgreesWithExhaustiveRunsOnTheInverse) {
  // p is sortable iff some operation sequence maps input p to 1..n, i.e. iff
  // the same sequence maps 1..n to p^-1.
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto achievable = ts::achievable_brute(n);
    Permutation p = Permutation::identity(n);
    do {
      Permutation inverse;
      inverse.values.resize(n);
      for (std::size_t i = 0; i < n; ++i) inverse.values[p.values[i] - 1] = static_cast<int>(i) + 1;
      EXPECT_EQ(ts::sortable_brute(p), achievable.count(inverse) == 1) << ts::to_string(p);
    } while (std::next_permutation(p.values.begin(), p.values.end()));
  }
}
