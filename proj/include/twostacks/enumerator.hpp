#pragma once

#include "twostacks/dfa.hpp"
#include "twostacks/error.hpp"
#include "twostacks/gamma.hpp"
#include "twostacks/machine.hpp"
#include "twostacks/series.hpp"

#include <absl/container/flat_hash_set.h>
#include <absl/numeric/int128.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

namespace twostacks {

/// A shard: all permutations of length n whose first outputs are `start`.
struct ShardSpec {
  std::size_t n = 0;
  std::vector<int> start;

  std::size_t m() const noexcept { return start.size(); }

  bool is_valid() const {
    if (start.size() >= n && n > 0) return false;
    std::vector<bool> used(n + 1, false);
    for (int v : start) {
      if (v < 1 || static_cast<std::size_t>(v) > n || used[v]) return false;
      used[v] = true;
    }
    return true;
  }
};

struct EnumerationOptions {
  /// Restrict the search to words accepted by Gamma'_n.
  bool pruned = true;
  /// Longest harvested forbidden word folded into Gamma'_n.
  std::size_t max_forbidden_len = 9;
  /// Memory budget: distinct permutations one shard may hold.
  std::size_t max_stored = std::size_t{1} << 28;
  /// Prebuilt automaton for this n; built on demand when null.
  std::shared_ptr<const Dfa> automaton;
};

struct EnumerationStats {
  std::uint64_t nodes = 0;   // operation-sequence prefixes visited
  std::uint64_t leaves = 0;  // complete operation sequences reached
  std::uint64_t count = 0;   // distinct permutations

  EnumerationStats& operator+=(const EnumerationStats& o) {
    nodes += o.nodes;
    leaves += o.leaves;
    count += o.count;
    return *this;
  }
};

namespace detail {

template <bool kPruned, bool kIncrementAvoiding, typename Key>
class ShardSearch {
 public:
  ShardSearch(const ShardSpec& spec, const Dfa::State* table, Dfa::State start_state, std::size_t max_stored)
      : n_(static_cast<int>(spec.n)),
        m_(static_cast<int>(spec.m())),
        bits_(std::bit_width(spec.n)),
        table_(table),
        start_state_(start_state),
        max_stored_(max_stored) {
    start_.fill(0);
    order_.fill(kNotInStart);
    for (int i = 0; i < m_; ++i) {
      start_[i] = static_cast<std::uint8_t>(spec.start[i]);
      order_[spec.start[i]] = static_cast<std::uint8_t>(i);
    }
  }

  EnumerationStats run() {
    if (n_ == 0) return {1, 1, 1};
    dfs(start_state_);
    return {nodes_, leaves_, seen_.size()};
  }

  const absl::flat_hash_set<Key>& keys() const { return seen_; }

 private:
  static constexpr std::uint8_t kNotInStart = 0xff;
  static constexpr int kMaxN = 32;

  Dfa::State step(Dfa::State q, Letter l) const noexcept {
    if constexpr (kPruned) return table_[3 * q + index(l)];
    return 0;
  }

  void dfs(Dfa::State q) {
    ++nodes_;
    if (next_input_ <= n_) {
      const Dfa::State nq = step(q, Letter::Rho);
      if (nq != Dfa::kDead) {
        stack1_[depth1_++] = static_cast<std::uint8_t>(next_input_++);
        dfs(nq);
        --next_input_;
        --depth1_;
      }
    }
    if (depth1_ > 0) {
      const std::uint8_t x = stack1_[depth1_ - 1];
      // Items on stack 2 leave top first; a start-sequence item must not be
      // buried under one that is due later.
      const bool order_ok = depth2_ == 0 || order_[x] <= order_[stack2_[depth2_ - 1]];
      const Dfa::State nq = order_ok ? step(q, Letter::Lambda) : Dfa::kDead;
      if (nq != Dfa::kDead) {
        --depth1_;
        stack2_[depth2_++] = x;
        dfs(nq);
        --depth2_;
        stack1_[depth1_++] = x;
      }
    }
    if (depth2_ > 0) {
      const std::uint8_t x = stack2_[depth2_ - 1];
      if (emitted_ < m_ && x != start_[emitted_]) return;
      if constexpr (kIncrementAvoiding) {
        if (emitted_ > 0 && x == last_ + 1) return;
      }
      const Dfa::State nq = step(q, Letter::Mu);
      if (nq == Dfa::kDead) return;
      const Key key = emitted_ >= m_ ? static_cast<Key>((key_ << bits_) | Key(x)) : key_;
      if (emitted_ + 1 == n_) {
        ++leaves_;
        seen_.insert(key);
        if (seen_.size() > max_stored_) {
          throw Error(ErrorKind::ResourceLimit, "shard exceeded the budget of " + std::to_string(max_stored_) +
                                                    " stored permutations");
        }
        return;
      }
      const Key saved_key = key_;
      const std::uint8_t saved_last = last_;
      --depth2_;
      ++emitted_;
      key_ = key;
      last_ = x;
      dfs(nq);
      last_ = saved_last;
      key_ = saved_key;
      --emitted_;
      stack2_[depth2_++] = x;
    }
  }

  const int n_;
  const int m_;
  const int bits_;
  const Dfa::State* table_;
  const Dfa::State start_state_;
  const std::size_t max_stored_;

  std::array<std::uint8_t, kMaxN> start_{};
  std::array<std::uint8_t, kMaxN + 1> order_{};
  std::array<std::uint8_t, kMaxN> stack1_{};
  std::array<std::uint8_t, kMaxN> stack2_{};
  int depth1_ = 0;
  int depth2_ = 0;
  int next_input_ = 1;
  int emitted_ = 0;
  std::uint8_t last_ = 0;
  Key key_ = 0;

  std::uint64_t nodes_ = 0;
  std::uint64_t leaves_ = 0;
  absl::flat_hash_set<Key> seen_;
};

template <typename Key>
EnumerationStats run_shard_with_key(const ShardSpec& spec, bool increment_avoiding, const Dfa* dfa,
                                    std::size_t max_stored) {
  const std::vector<Dfa::State> table = dfa ? dfa->flat_table() : std::vector<Dfa::State>{};
  const Dfa::State start = dfa ? dfa->start() : 0;
  auto go = [&](auto search) { return search.run(); };
  if (dfa) {
    if (increment_avoiding) return go(ShardSearch<true, true, Key>(spec, table.data(), start, max_stored));
    return go(ShardSearch<true, false, Key>(spec, table.data(), start, max_stored));
  }
  if (increment_avoiding) return go(ShardSearch<false, true, Key>(spec, nullptr, 0, max_stored));
  return go(ShardSearch<false, false, Key>(spec, nullptr, 0, max_stored));
}

inline EnumerationStats run_shard(const ShardSpec& spec, bool increment_avoiding, const Dfa* dfa,
                                  std::size_t max_stored) {
  if (spec.n > 31) throw Error(ErrorKind::InvalidArgument, "n must be below 32");
  if (!spec.is_valid()) throw Error(ErrorKind::InvalidArgument, "invalid start sequence");
  const std::size_t key_bits = (spec.n - spec.m()) * static_cast<std::size_t>(std::bit_width(spec.n));
  if (key_bits <= 64) return run_shard_with_key<std::uint64_t>(spec, increment_avoiding, dfa, max_stored);
  if (key_bits <= 128) return run_shard_with_key<absl::uint128>(spec, increment_avoiding, dfa, max_stored);
  throw Error(ErrorKind::InvalidArgument, "permutation suffix does not fit a 128-bit key");
}

inline std::shared_ptr<const Dfa> automaton_for(std::size_t n, const EnumerationOptions& options) {
  if (!options.pruned || n == 0) return nullptr;
  if (options.automaton) return options.automaton;
  return std::make_shared<const Dfa>(build_pruning_automaton(n, options.max_forbidden_len));
}

}  // namespace detail

/// Achievable (and optionally increment-avoiding) permutations of length
/// spec.n that begin with spec.start. Only the last n - m outputs are stored
/// for deduplication.
inline EnumerationStats count_with_start_sequence_stats(const ShardSpec& spec, bool increment_avoiding,
                                                        const EnumerationOptions& options = {}) {
  const auto dfa = detail::automaton_for(spec.n, options);
  return detail::run_shard(spec, increment_avoiding, dfa.get(), options.max_stored);
}

inline std::uint64_t count_with_start_sequence(const ShardSpec& spec, bool increment_avoiding,
                                               const EnumerationOptions& options = {}) {
  return count_with_start_sequence_stats(spec, increment_avoiding, options).count;
}

inline EnumerationStats count_achievable_stats(std::size_t n, bool pruned, EnumerationOptions options = {}) {
  options.pruned = pruned;
  return count_with_start_sequence_stats(ShardSpec{n, {}}, false, options);
}

/// Number of achievable permutations of length n, by a single unsharded search.
inline std::uint64_t count_achievable(std::size_t n, bool pruned, const EnumerationOptions& options = {}) {
  return count_achievable_stats(n, pruned, options).count;
}

/// t_n: achievable permutations with no adjacent pair v, v+1.
inline std::uint64_t count_increment_avoiding(std::size_t n, const EnumerationOptions& options = {}) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "count_increment_avoiding needs n >= 1");
  return count_with_start_sequence(ShardSpec{n, {}}, true, options);
}

/// Every sequence of m distinct values from 1..n, in lexicographic order.
inline std::vector<ShardSpec> generate_shards(std::size_t n, std::size_t m) {
  std::vector<ShardSpec> shards;
  std::vector<int> prefix;
  std::vector<bool> used(n + 1, false);
  auto extend = [&](auto&& self) -> void {
    if (prefix.size() == m) {
      shards.push_back({n, prefix});
      return;
    }
    for (int v = 1; v <= static_cast<int>(n); ++v) {
      if (used[v]) continue;
      used[v] = true;
      prefix.push_back(v);
      self(self);
      prefix.pop_back();
      used[v] = false;
    }
  };
  extend(extend);
  return shards;
}

/// Runs every start-sequence shard on a pool of worker threads and sums the
/// results. Shards share only the immutable automaton; each owns its search
/// state and dedup set, so totals do not depend on scheduling.
inline EnumerationStats enumerate_parallel_stats(std::size_t n, std::size_t m, std::size_t workers,
                                                 bool increment_avoiding, const EnumerationOptions& options = {}) {
  if (n >= 1 && (m < 1 || m >= n)) throw Error(ErrorKind::InvalidArgument, "start length must satisfy 1 <= m < n");
  if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be >= 1");
  const auto dfa = detail::automaton_for(n, options);
  const std::vector<ShardSpec> shards = generate_shards(n, m);
  std::vector<EnumerationStats> results(shards.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= shards.size()) return;
      try {
        results[i] = detail::run_shard(shards[i], increment_avoiding, dfa.get(), options.max_stored);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t threads = std::min(workers, std::max<std::size_t>(shards.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  EnumerationStats total;
  for (const auto& r : results) total += r;
  return total;
}

inline std::uint64_t enumerate_parallel(std::size_t n, std::size_t m, std::size_t workers, bool increment_avoiding,
                                        const EnumerationOptions& options = {}) {
  return enumerate_parallel_stats(n, m, workers, increment_avoiding, options).count;
}

enum class EnumerationMethod {
  /// Count increment-avoiding permutations, then binomial-transform to s_n.
  Transform,
  /// Count achievable permutations directly.
  Direct,
};

struct SeriesRequest {
  std::size_t max_n = 0;
  std::size_t start_len = 6;  // clamped to n - 1 per coefficient
  std::size_t workers = 1;
  EnumerationMethod method = EnumerationMethod::Transform;
  EnumerationOptions options;
};

/// t_0..t_N, the increment-avoiding counts (t_0 = 1).
inline Series enumerate_increment_avoiding_series(const SeriesRequest& req) {
  Series t{"t", {Integer(1)}, {}};
  for (std::size_t n = 1; n <= req.max_n; ++n) {
    const std::size_t m = std::min(req.start_len, n - 1);
    const std::uint64_t c = m == 0 ? count_increment_avoiding(n, req.options)
                                   : enumerate_parallel(n, m, req.workers, true, req.options);
    t.exact.emplace_back(c);
  }
  return t;
}

/// s_0..s_N, the number of achievable (equivalently sortable) permutations.
inline Series enumerate_series(const SeriesRequest& req) {
  if (req.method == EnumerationMethod::Transform) {
    Series s = binomial_transform(enumerate_increment_avoiding_series(req));
    s.name = "s";
    return s;
  }
  Series s{"s", {Integer(1)}, {}};
  for (std::size_t n = 1; n <= req.max_n; ++n) {
    const std::size_t m = std::min(req.start_len, n - 1);
    const std::uint64_t c =
        m == 0 ? count_achievable(n, req.options.pruned, req.options) : enumerate_parallel(n, m, req.workers, false, req.options);
    s.exact.emplace_back(c);
  }
  return s;
}

/// The permutations themselves (not just their number); for cross-checks at
/// small n. Uses the same search as the counters.
inline std::set<Permutation> collect_achievable(std::size_t n, bool pruned, bool increment_avoiding = false,
                                                const EnumerationOptions& options = {}) {
  if (n > 15) throw Error(ErrorKind::InvalidArgument, "collect_achievable is limited to n <= 15");
  std::set<Permutation> out;
  if (n == 0) {
    out.insert(Permutation{});
    return out;
  }
  EnumerationOptions opts = options;
  opts.pruned = pruned;
  const auto dfa = detail::automaton_for(n, opts);
  const std::vector<Dfa::State> table = dfa ? dfa->flat_table() : std::vector<Dfa::State>{};
  const ShardSpec spec{n, {}};
  auto decode = [&](const auto& keys) {
    const int bits = std::bit_width(n);
    for (std::uint64_t key : keys) {
      Permutation p;
      p.values.resize(n);
      for (std::size_t i = n; i-- > 0;) {
        p.values[i] = static_cast<int>(key & ((std::uint64_t{1} << bits) - 1));
        key >>= bits;
      }
      out.insert(std::move(p));
    }
  };
  auto run = [&](auto search) {
    search.run();
    decode(search.keys());
  };
  const auto start = dfa ? dfa->start() : 0;
  if (dfa && increment_avoiding) run(detail::ShardSearch<true, true, std::uint64_t>(spec, table.data(), start, opts.max_stored));
  else if (dfa) run(detail::ShardSearch<true, false, std::uint64_t>(spec, table.data(), start, opts.max_stored));
  else if (increment_avoiding) run(detail::ShardSearch<false, true, std::uint64_t>(spec, nullptr, 0, opts.max_stored));
  else run(detail::ShardSearch<false, false, std::uint64_t>(spec, nullptr, 0, opts.max_stored));
  return out;
}

}  // namespace twostacks
