#pragma once

#include "twostacks/dfa.hpp"
#include "twostacks/error.hpp"
#include "twostacks/forbidden.hpp"
#include "twostacks/word.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace twostacks {

namespace detail {

// Online recogniser for the three pattern families
//   rho mu,  rho lambda mu lambda,  u v  (u a rho,lambda-Catalan word,
//                                         v a lambda,mu-Catalan word, both nonempty).
//
// `excess` is the height of the current {rho, lambda} run above its running
// minimum (rho up, lambda down). A lambda taken with positive excess closes a
// rho,lambda-Catalan suffix, and the next letter may start a v. Open v
// candidates are tracked by their distance above their start in the
// lambda-up / mu-down walk. They always form a contiguous range [lo, hi]; a
// mu that brings any of them back to distance 0 completes a u v factor.
struct GammaState {
  enum Tail : int { kNone, kRho, kRhoLambda, kRhoLambdaMu };

  int excess = 0;
  int lo = -1;  // -1: no open candidates
  int hi = -1;
  int tail = kNone;

  auto operator<=>(const GammaState&) const = default;
};

// Counters are clamped at `cap`. Clamping only ever drops candidates, so the
// automaton stays sound (it never rejects a pattern-free word) and is exact
// for every word of length <= cap.
inline std::optional<GammaState> gamma_step(GammaState s, Letter l, int cap) {
  switch (l) {
    case Letter::Rho:
      s.tail = GammaState::kRho;
      s.excess = std::min(s.excess + 1, cap);
      s.lo = s.hi = -1;
      return s;
    case Letter::Lambda: {
      if (s.tail == GammaState::kRhoLambdaMu) return std::nullopt;
      s.tail = s.tail == GammaState::kRho ? GammaState::kRhoLambda : GammaState::kNone;
      if (s.lo >= 0) {
        ++s.lo;
        s.hi = std::min(s.hi + 1, cap);
        if (s.lo > cap) s.lo = s.hi = -1;
      }
      if (s.excess > 0) {
        --s.excess;
        if (s.lo < 0) s.hi = 0;
        s.lo = 0;
      }
      return s;
    }
    case Letter::Mu:
      if (s.tail == GammaState::kRho) return std::nullopt;
      s.tail = s.tail == GammaState::kRhoLambda ? GammaState::kRhoLambdaMu : GammaState::kNone;
      s.excess = 0;
      if (s.lo >= 0) {
        if (s.lo <= 1 && 1 <= s.hi) return std::nullopt;
        if (s.lo == 0) {
          s.lo = s.hi = -1;
        } else {
          --s.lo;
          --s.hi;
        }
      }
      return s;
  }
  return std::nullopt;
}

}  // namespace detail

/// Truncated pruning automaton Gamma_n. Rejects exactly the words of length
/// <= 3n that contain rho mu, rho lambda mu lambda, or a factor u v with u a
/// rho,lambda-Catalan word and v a lambda,mu-Catalan word. Built by exploring
/// the recogniser's reachable states rather than transcribing a drawing.
inline Dfa build_gamma(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "build_gamma needs n >= 1");
  const int cap = static_cast<int>(3 * n);
  std::map<detail::GammaState, Dfa::State> ids;
  std::vector<detail::GammaState> states;
  Dfa dfa;

  ids.emplace(detail::GammaState{}, dfa.add_state());
  states.push_back({});
  dfa.set_start(0);
  for (std::size_t cur = 0; cur < states.size(); ++cur) {
    for (Letter l : kAlphabet) {
      const auto next = detail::gamma_step(states[cur], l, cap);
      if (!next) continue;
      auto [it, inserted] = ids.emplace(*next, static_cast<Dfa::State>(states.size()));
      if (inserted) {
        dfa.add_state();
        states.push_back(*next);
      }
      dfa.set_transition(static_cast<Dfa::State>(cur), l, it->second);
    }
  }
  return dfa;
}

/// Reference recogniser for the same three families by direct scanning of
/// every factor. Quadratic per start position; used to validate build_gamma.
inline bool contains_gamma_pattern(const Word& w) {
  const std::size_t len = w.size();
  const Word rm = {Letter::Rho, Letter::Mu};
  const Word rlml = {Letter::Rho, Letter::Lambda, Letter::Mu, Letter::Lambda};
  if (std::search(w.begin(), w.end(), rm.begin(), rm.end()) != w.end()) return true;
  if (std::search(w.begin(), w.end(), rlml.begin(), rlml.end()) != w.end()) return true;
  // ends_u[j]: some nonempty rho,lambda-Catalan factor ends right before j.
  std::vector<bool> ends_u(len + 1, false);
  for (std::size_t i = 0; i < len; ++i) {
    long h = 0;
    for (std::size_t j = i; j < len; ++j) {
      if (w[j] == Letter::Rho) ++h;
      else if (w[j] == Letter::Lambda) --h;
      else break;
      if (h < 0) break;
      if (h == 0) ends_u[j + 1] = true;
    }
  }
  for (std::size_t j = 1; j < len; ++j) {
    if (!ends_u[j]) continue;
    long h = 0;
    for (std::size_t k = j; k < len; ++k) {
      if (w[k] == Letter::Lambda) ++h;
      else if (w[k] == Letter::Mu) --h;
      else break;
      if (h < 0) break;
      if (h == 0) return true;
    }
  }
  return false;
}

/// Gamma'_n: Gamma_n intersected with the avoiding automata of every minimal
/// forbidden word of length <= max_forbidden_len. The avoiding automata are
/// combined into one Aho-Corasick automaton, which accepts the same language
/// as their product.
inline Dfa build_pruning_automaton(std::size_t n, std::size_t max_forbidden_len,
                                   const std::set<Word>* forbidden = nullptr) {
  Dfa gamma = build_gamma(n);
  if (max_forbidden_len == 0) return gamma;
  std::set<Word> harvested;
  if (!forbidden) {
    harvested = find_forbidden_words(max_forbidden_len);
    forbidden = &harvested;
  }
  std::vector<Word> patterns;
  for (const Word& w : *forbidden)
    if (w.size() <= max_forbidden_len) patterns.push_back(w);
  const Dfa avoid = build_multi_avoiding_dfa(patterns);
  return intersect({gamma, avoid});
}

}  // namespace twostacks
