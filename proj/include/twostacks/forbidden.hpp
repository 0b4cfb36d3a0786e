#pragma once

#include "twostacks/error.hpp"
#include "twostacks/word.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <set>
#include <vector>

namespace twostacks {

/// Balanced word over {x, y} whose prefixes never hold more y than x
/// (a Dyck path with x up and y down). The empty word counts as Catalan.
inline bool is_catalan_word(const Word& w, Letter x, Letter y) {
  if (x == y) throw Error(ErrorKind::InvalidArgument, "Catalan letters must differ");
  long height = 0;
  bool ok = true;
  for (Letter l : w) {
    if (l == x) {
      ++height;
    } else if (l == y) {
      if (--height < 0) ok = false;
    } else {
      throw Error(ErrorKind::InvalidAlphabet, "'" + to_string(w) + "' uses a letter outside {x, y}");
    }
  }
  return ok && height == 0;
}

/// How a word acts on a machine holding generic distinct items.
///
/// Items are named by where they start: input position k is k, the item at
/// depth d of stack 1 is kStack1 + d, of stack 2 is kStack2 + d. After the
/// word runs, each stack is its untouched remainder with `stackN_pushed`
/// (bottom to top) on top, and `output` is what was emitted. Every move sends
/// an item forward, so touched items never return; the minimal depths are
/// therefore implied by the action and the representation is canonical.
struct EffectSignature {
  static constexpr int kStack1 = 1000;
  static constexpr int kStack2 = 2000;

  int min_input = 0;
  int min_stack1 = 0;
  int min_stack2 = 0;
  std::vector<int> stack1_pushed;
  std::vector<int> stack2_pushed;
  std::vector<int> output;

  auto operator<=>(const EffectSignature&) const = default;
  bool operator==(const EffectSignature&) const = default;
};

inline EffectSignature effect_signature(const Word& w) {
  EffectSignature sig;
  for (Letter l : w) {
    switch (l) {
      case Letter::Rho:
        sig.stack1_pushed.push_back(sig.min_input++);
        break;
      case Letter::Lambda: {
        int item;
        if (!sig.stack1_pushed.empty()) {
          item = sig.stack1_pushed.back();
          sig.stack1_pushed.pop_back();
        } else {
          item = EffectSignature::kStack1 + sig.min_stack1++;
        }
        sig.stack2_pushed.push_back(item);
        break;
      }
      case Letter::Mu: {
        int item;
        if (!sig.stack2_pushed.empty()) {
          item = sig.stack2_pushed.back();
          sig.stack2_pushed.pop_back();
        } else {
          item = EffectSignature::kStack2 + sig.min_stack2++;
        }
        sig.output.push_back(item);
        break;
      }
    }
  }
  return sig;
}

/// True iff some proper contiguous subword of w belongs to `words`.
inline bool contains_proper_subword(const Word& w, const std::set<Word>& words) {
  for (std::size_t len = 1; len < w.size(); ++len) {
    for (std::size_t start = 0; start + len <= w.size(); ++start) {
      if (words.count(Word(w.begin() + start, w.begin() + start + len))) return true;
    }
  }
  return false;
}

/// Words v with |v| <= max_len that have a lexicographically larger word of
/// identical effect, keeping only those with no shorter forbidden subword.
/// Words of one length are grouped by effect; every group member but the
/// largest is forbidden.
inline std::set<Word> find_forbidden_words(std::size_t max_len) {
  std::set<Word> minimal;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::map<EffectSignature, Word> largest;
    const std::vector<Word> words = all_words(len);
    for (const Word& w : words) {
      auto [it, inserted] = largest.emplace(effect_signature(w), w);
      if (!inserted && it->second < w) it->second = w;
    }
    std::vector<Word> found;
    for (const Word& w : words) {
      if (largest.at(effect_signature(w)) != w && !contains_proper_subword(w, minimal)) found.push_back(w);
    }
    minimal.insert(found.begin(), found.end());
  }
  return minimal;
}

}  // namespace twostacks
