#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace explore {

using Rng = std::mt19937_64;

// Derives an independent generator from a run seed and a list of stream tags
// (epoch, trajectory index, purpose, ...). Identical inputs give identical streams.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * tags.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto t : tags) push(t);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

// Stream tags.
enum class Stream : std::uint64_t {
  Init = 1,
  Rollout = 2,
  Selection = 3,
  Curiosity = 4,
  Goals = 5,
  Evaluation = 6,
  Heatmap = 7,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace explore
