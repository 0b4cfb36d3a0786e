#pragma once

#include "twostacks/error.hpp"
#include "twostacks/word.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace twostacks {

/// Deterministic automaton over {rho, lambda, mu} with a partial transition
/// function. A missing transition is the (implicit) dead state; every live
/// state accepts, so a word is accepted iff all of its letters can be read.
class Dfa {
 public:
  using State = std::int32_t;
  static constexpr State kDead = -1;

  Dfa() = default;

  State add_state() {
    next_.push_back({kDead, kDead, kDead});
    return static_cast<State>(next_.size() - 1);
  }

  void set_transition(State from, Letter l, State to) { next_.at(from)[index(l)] = to; }

  State next(State s, Letter l) const noexcept { return next_[s][index(l)]; }
  State start() const noexcept { return start_; }
  void set_start(State s) { start_ = s; }
  std::size_t size() const noexcept { return next_.size(); }

  /// State reached after reading w from the start, or kDead.
  State run(std::span<const Letter> w) const {
    State s = start_;
    for (Letter l : w) {
      if (s == kDead) break;
      s = next(s, l);
    }
    return s;
  }

  bool accepts(std::span<const Letter> w) const { return run(w) != kDead; }

  /// Flat transition table, three entries per state, for the enumerator's
  /// inner loop.
  std::vector<State> flat_table() const {
    std::vector<State> t;
    t.reserve(3 * next_.size());
    for (const auto& row : next_) t.insert(t.end(), row.begin(), row.end());
    return t;
  }

  std::size_t transition_count() const {
    std::size_t c = 0;
    for (const auto& row : next_)
      for (State s : row) c += (s != kDead);
    return c;
  }

  /// Plain-text adjacency list, one "state letter state" line per transition.
  void write_adjacency(std::ostream& os) const {
    os << "# states " << next_.size() << " start " << start_ << '\n';
    for (std::size_t s = 0; s < next_.size(); ++s)
      for (Letter l : kAlphabet)
        if (next_[s][index(l)] != kDead) os << s << ' ' << to_ascii(l) << ' ' << next_[s][index(l)] << '\n';
  }

 private:
  std::vector<std::array<State, 3>> next_;
  State start_ = 0;
};

/// Aho-Corasick automaton for a set of patterns with every match state made
/// dead: accepts exactly the words containing none of the patterns as a
/// contiguous subword.
inline Dfa build_multi_avoiding_dfa(std::span<const Word> patterns) {
  struct Node {
    std::array<std::int32_t, 3> child{-1, -1, -1};
    std::int32_t fail = 0;
    bool terminal = false;
  };
  std::vector<Node> trie(1);
  for (const Word& p : patterns) {
    if (p.empty()) throw Error(ErrorKind::InvalidArgument, "empty pattern");
    std::int32_t cur = 0;
    for (Letter l : p) {
      auto& c = trie[cur].child[index(l)];
      if (c < 0) {
        c = static_cast<std::int32_t>(trie.size());
        trie.push_back({});
      }
      cur = trie[cur].child[index(l)];
    }
    trie[cur].terminal = true;
  }

  // Breadth-first completion of the goto function; a node is terminal if any
  // suffix of its string is a pattern.
  std::vector<std::array<std::int32_t, 3>> go(trie.size());
  std::queue<std::int32_t> pending;
  for (Letter l : kAlphabet) {
    const auto c = trie[0].child[index(l)];
    go[0][index(l)] = c < 0 ? 0 : c;
    if (c >= 0) {
      trie[c].fail = 0;
      pending.push(c);
    }
  }
  while (!pending.empty()) {
    const auto u = pending.front();
    pending.pop();
    trie[u].terminal = trie[u].terminal || trie[trie[u].fail].terminal;
    for (Letter l : kAlphabet) {
      const auto c = trie[u].child[index(l)];
      if (c >= 0) {
        trie[c].fail = go[trie[u].fail][index(l)];
        go[u][index(l)] = c;
        pending.push(c);
      } else {
        go[u][index(l)] = go[trie[u].fail][index(l)];
      }
    }
  }

  // Renumber live nodes reachable from the root.
  Dfa dfa;
  std::vector<Dfa::State> id(trie.size(), Dfa::kDead);
  if (trie[0].terminal) {
    dfa.set_start(dfa.add_state());
    return dfa;  // unreachable for nonempty patterns; keep a valid object
  }
  std::queue<std::int32_t> order;
  id[0] = dfa.add_state();
  dfa.set_start(id[0]);
  order.push(0);
  while (!order.empty()) {
    const auto u = order.front();
    order.pop();
    for (Letter l : kAlphabet) {
      const auto v = go[u][index(l)];
      if (trie[v].terminal) continue;
      if (id[v] == Dfa::kDead) {
        id[v] = dfa.add_state();
        order.push(v);
      }
      dfa.set_transition(id[u], l, id[v]);
    }
  }
  return dfa;
}

/// Single-pattern failure-function automaton: accepts words without u.
inline Dfa build_avoiding_dfa(const Word& u) { return build_multi_avoiding_dfa(std::span<const Word>(&u, 1)); }

/// Product construction over the reachable part. Accepts the intersection of
/// the factors' languages.
inline Dfa intersect(std::span<const Dfa> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "intersect needs at least one automaton");
  using Tuple = std::vector<Dfa::State>;
  std::map<Tuple, Dfa::State> ids;
  std::vector<Tuple> tuples;
  Dfa product;

  Tuple start;
  for (const Dfa& d : factors) start.push_back(d.start());
  ids.emplace(start, product.add_state());
  tuples.push_back(start);
  product.set_start(0);

  for (std::size_t cur = 0; cur < tuples.size(); ++cur) {
    for (Letter l : kAlphabet) {
      Tuple next(factors.size());
      bool live = true;
      for (std::size_t i = 0; i < factors.size() && live; ++i) {
        next[i] = factors[i].next(tuples[cur][i], l);
        live = next[i] != Dfa::kDead;
      }
      if (!live) continue;
      auto [it, inserted] = ids.emplace(next, static_cast<Dfa::State>(tuples.size()));
      if (inserted) {
        product.add_state();
        tuples.push_back(next);
      }
      product.set_transition(static_cast<Dfa::State>(cur), l, it->second);
    }
  }
  return product;
}

inline Dfa intersect(std::initializer_list<Dfa> factors) {
  return intersect(std::span<const Dfa>(factors.begin(), factors.size()));
}

}  // namespace twostacks
