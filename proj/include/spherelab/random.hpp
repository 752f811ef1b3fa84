#pragma once

#include <cstdint>
#include <random>

namespace spherelab {

/// A reproducible pseudo-random stream identified by (seed, stream_index).
///
/// Two streams constructed from the same pair produce identical draw
/// sequences. Independent workers derive their own streams with
/// `substream`, so no generator state is ever shared.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_index = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Deterministic child stream; distinct `child` values give distinct streams.
  RandomStream substream(std::uint64_t child) const;

  double normal();
  double uniform();
  /// Chi-squared variate with `dof` > 0 degrees of freedom.
  double chi_squared(double dof);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace spherelab
