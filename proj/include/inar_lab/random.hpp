#pragma once

#include <cstdint>
#include <random>

#include <boost/random/mersenne_twister.hpp>

namespace inar {

// 64-bit Mersenne twister; the algorithm and its seed_seq seeding are fully
// specified, so streams are identical across standard libraries.
using Engine = boost::random::mt19937_64;

// Library-wide default seed used when a caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

// Stream `index` of the family keyed by `master_seed`. Replication r of an
// experiment always draws from make_stream(master_seed, r), independent of
// which worker runs it. seed_seq mixes the key into one 64-bit engine seed;
// filling the whole 312-word state through seed_seq costs ~7us per stream,
// which dominates when streams are short.
inline Engine make_stream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(index),
      static_cast<std::uint32_t>(index >> 32),
  };
  std::uint32_t key[2];
  seq.generate(key, key + 2);
  return Engine((static_cast<std::uint64_t>(key[1]) << 32) | key[0]);
}

}  // namespace inar
