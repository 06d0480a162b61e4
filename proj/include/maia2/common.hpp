#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>
#include <functional>

namespace maia2 {

// Error categories map onto CLI exit codes: data errors (2), engine errors (3),
// numeric failures (4).
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class EngineError : public std::runtime_error {
public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class ContractViolation : public std::logic_error {
public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Commutative diagnostics counters. Workers keep their own tally and merge.
struct Tally {
  std::map<std::string, std::uint64_t> counts;

  void bump(const std::string& key, std::uint64_t n = 1) { counts[key] += n; }

  std::uint64_t get(const std::string& key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }

  void merge(const Tally& other) {
    for (const auto& [k, v] : other.counts) counts[k] += v;
  }
};

// One config seed fans out to per-module streams. Mixing is splitmix64 so
// subsystem seeds stay decorrelated regardless of the label hash.
inline std::uint64_t fanout_seed(std::uint64_t root, const std::string& label) {
  std::uint64_t h = root ^ 0x9e3779b97f4a7c15ull;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0xff51afd7ed558ccdull;
  }
  h += 0x9e3779b97f4a7c15ull;
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ull;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 31;
  return h;
}

// Runs fn(i) for i in [0, n). worker_count <= 1 runs inline (reference mode).
// Results must be written to pre-sized slots so the outcome is independent of
// scheduling.
inline void parallel_for(std::size_t n, int worker_count,
                         const std::function<void(std::size_t)>& fn) {
  if (worker_count <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n) return;
        i = next++;
      }
      fn(i);
    }
  };
  int count = std::min<std::size_t>(static_cast<std::size_t>(worker_count), n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace maia2
