#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dcoreset/error.hpp"

namespace dcoreset {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; maps (base, stream) to a well-mixed 64-bit seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t base, std::uint64_t stream) {
  return Rng(derive_seed(base, stream));
}

/// Draws indices i.i.d. with probability proportional to nonnegative masses.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> masses) : cumulative_(masses.size()) {
    double run = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (masses[i] < 0.0) throw Error("negative sampling mass");
      run += masses[i];
      cumulative_[i] = run;
      if (masses[i] > 0.0) last_positive_ = i;
    }
    total_ = run;
  }

  double total() const noexcept { return total_; }

  std::size_t operator()(Rng& rng) const {
    if (!(total_ > 0.0)) throw Error("sampling from zero total mass");
    std::uniform_real_distribution<double> unif(0.0, total_);
    const double u = unif(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return last_positive_;
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
  std::size_t last_positive_ = 0;
};

}  // namespace dcoreset
