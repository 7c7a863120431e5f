#pragma once

#include <cstdint>

namespace xsched {

// Fixed, portable random source for workload generation. We deliberately
// avoid <random> distributions, whose outputs are implementation-defined:
// identical seeds must give bit-identical workloads on every platform and
// compiler. splitmix64 expands the user seed into the xoshiro256** state;
// both use the reference public-domain constants.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1): top 53 bits scaled by 2^-53.
  double next_double();

  // Uniform real in [lo, hi).
  double uniform_real(double lo, double hi);

  // Uniform integer in [lo, hi], inclusive. Uses simple modulo reduction;
  // the bias is negligible for the tiny ranges the generator draws from and
  // the mapping is trivially portable.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  // True with probability p.
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace xsched
