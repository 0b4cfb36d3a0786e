#pragma once

#include "twostacks/error.hpp"
#include "twostacks/word.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <deque>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace twostacks {

struct Permutation {
  std::vector<int> values;

  std::size_t size() const noexcept { return values.size(); }
  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

  /// True iff the values are exactly 1..n in some order.
  bool is_valid() const {
    std::vector<int> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != static_cast<int>(i) + 1) return false;
    }
    return true;
  }

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.values.resize(n);
    std::iota(p.values.begin(), p.values.end(), 1);
    return p;
  }
};

inline std::string to_string(const Permutation& p) {
  std::string s;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p.values[i]);
  }
  return s;
}

/// Configuration of the two-stacks-in-series machine. Stacks keep their top
/// at the back of the vector.
struct MachineState {
  std::deque<int> input;
  std::vector<int> stack1;
  std::vector<int> stack2;
  std::vector<int> output;

  bool operator==(const MachineState&) const = default;

  static MachineState with_input(const std::vector<int>& items) {
    MachineState s;
    s.input.assign(items.begin(), items.end());
    return s;
  }

  bool can_apply(Letter l) const noexcept {
    switch (l) {
      case Letter::Rho: return !input.empty();
      case Letter::Lambda: return !stack1.empty();
      case Letter::Mu: return !stack2.empty();
    }
    return false;
  }

  /// Sorted list of every label held anywhere in the machine.
  std::vector<int> labels() const {
    std::vector<int> all(input.begin(), input.end());
    all.insert(all.end(), stack1.begin(), stack1.end());
    all.insert(all.end(), stack2.begin(), stack2.end());
    all.insert(all.end(), output.begin(), output.end());
    std::sort(all.begin(), all.end());
    return all;
  }
};

/// Applies one move. Throws IllegalMove when the source container is empty.
inline MachineState apply_letter(MachineState s, Letter l) {
  if (!s.can_apply(l)) {
    throw Error(ErrorKind::IllegalMove, std::string("move '") + to_ascii(l) + "' from an empty container");
  }
  switch (l) {
    case Letter::Rho:
      s.stack1.push_back(s.input.front());
      s.input.pop_front();
      break;
    case Letter::Lambda:
      s.stack2.push_back(s.stack1.back());
      s.stack1.pop_back();
      break;
    case Letter::Mu:
      s.output.push_back(s.stack2.back());
      s.stack2.pop_back();
      break;
  }
  return s;
}

/// |w| = 3n, each letter n times, and #rho >= #lambda >= #mu on every prefix.
inline bool is_operation_sequence(const Word& w, std::size_t n) {
  if (w.size() != 3 * n) return false;
  std::size_t counts[3] = {0, 0, 0};
  for (Letter l : w) {
    ++counts[index(l)];
    if (counts[0] < counts[1] || counts[1] < counts[2]) return false;
  }
  return counts[0] == n && counts[1] == n && counts[2] == n;
}

/// Feeds 1..n through the machine under w and returns the output.
/// Precondition: is_operation_sequence(w, n).
inline Permutation run_sequence(std::size_t n, const Word& w) {
  if (!is_operation_sequence(w, n)) {
    throw Error(ErrorKind::InvalidArgument, "'" + to_string(w) + "' is not an operation sequence of size " +
                                                std::to_string(n));
  }
  MachineState s = MachineState::with_input(Permutation::identity(n).values);
  for (Letter l : w) s = apply_letter(std::move(s), l);
  return Permutation{std::move(s.output)};
}

namespace detail {

// Collision-free state key: one byte per label plus separators (labels < 255).
inline std::string encode_state(std::size_t consumed, const std::vector<int>& a, const std::vector<int>& b,
                                const std::vector<int>* out) {
  std::string key;
  key.reserve(4 + a.size() + b.size() + (out ? out->size() : 0));
  key.push_back(static_cast<char>(consumed));
  for (int v : a) key.push_back(static_cast<char>(v));
  key.push_back('\xff');
  for (int v : b) key.push_back(static_cast<char>(v));
  if (out) {
    key.push_back('\xff');
    for (int v : *out) key.push_back(static_cast<char>(v));
  }
  return key;
}

struct AchievableSearch {
  std::size_t n;
  std::vector<int> stack1, stack2, output;
  std::size_t next_input = 1;
  std::unordered_set<std::string> visited;
  std::set<Permutation> found;

  void explore() {
    if (output.size() == n) {
      found.insert(Permutation{output});
      return;
    }
    if (!visited.insert(encode_state(next_input, stack1, stack2, &output)).second) return;
    if (next_input <= n) {
      stack1.push_back(static_cast<int>(next_input++));
      explore();
      --next_input;
      stack1.pop_back();
    }
    if (!stack1.empty()) {
      stack2.push_back(stack1.back());
      stack1.pop_back();
      explore();
      stack1.push_back(stack2.back());
      stack2.pop_back();
    }
    if (!stack2.empty()) {
      output.push_back(stack2.back());
      stack2.pop_back();
      explore();
      stack2.push_back(output.back());
      output.pop_back();
    }
  }
};

}  // namespace detail

/// Every permutation the machine can emit from input 1..n, found by exploring
/// all legal moves. States already explored are skipped, which does not change
/// the result. Practical for n <= 9.
inline std::set<Permutation> achievable_brute(std::size_t n) {
  detail::AchievableSearch search{n, {}, {}, {}};
  search.explore();
  return std::move(search.found);
}

/// True iff the machine can turn input p into 1..n. Depth-first search with a
/// visited set keyed on (input position, stack1, stack2); the output is always
/// 1..k so it is implied by the key.
inline bool sortable_brute(const Permutation& p) {
  const std::size_t n = p.size();
  std::vector<int> stack1, stack2;
  std::unordered_set<std::string> visited;

  auto search = [&](auto&& self, std::size_t consumed, int emitted) -> bool {
    if (static_cast<std::size_t>(emitted) == n) return true;
    if (!visited.insert(detail::encode_state(consumed, stack1, stack2, nullptr)).second) return false;
    // Emitting the next wanted value is never worse than delaying it.
    if (!stack2.empty() && stack2.back() == emitted + 1) {
      const int v = stack2.back();
      stack2.pop_back();
      const bool ok = self(self, consumed, emitted + 1);
      stack2.push_back(v);
      return ok;
    }
    if (consumed < n) {
      stack1.push_back(p.values[consumed]);
      if (self(self, consumed + 1, emitted)) return true;
      stack1.pop_back();
    }
    if (!stack1.empty()) {
      stack2.push_back(stack1.back());
      stack1.pop_back();
      if (self(self, consumed, emitted)) return true;
      stack1.push_back(stack2.back());
      stack2.pop_back();
    }
    return false;
  };
  return search(search, 0, 0);
}

}  // namespace twostacks
