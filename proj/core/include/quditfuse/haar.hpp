#pragma once

#include <cstdint>
#include <random>

#include "quditfuse/fock.hpp"

namespace quditfuse {

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of R's diagonal moved into Q, which makes the distribution exactly Haar.
CMatrix haar_unitary(std::mt19937_64& rng, int modes);

/// Deterministic stream of Haar unitaries. The same seed always yields the
/// same sequence on a given build.
class HaarSampler {
 public:
  explicit HaarSampler(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  CMatrix next_matrix(int modes) { return haar_unitary(rng_, modes); }
  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

Interferometer haar_sample(HaarSampler& sampler, int modes);

/// Random pure state on C^n (normalized complex Gaussian vector).
CVector random_state(std::mt19937_64& rng, int n);

}  // namespace quditfuse
