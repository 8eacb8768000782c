#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace seabed {

// Deterministic stream-splittable generator. A (seed, stream-name) pair fully
// determines the sequence, so reports can record both and reruns reproduce.
class Rng {
public:
  Rng(std::uint64_t seed, const std::string& stream);

  std::uint64_t seed() const { return seed_; }
  const std::string& stream() const { return stream_; }
  static const char* algorithm() { return "mt19937_64/fnv1a-stream"; }

  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double sigma = 1.0);
  int uniform_int(int lo, int hi);  // inclusive bounds

  Rng split(const std::string& substream) const;

private:
  std::uint64_t seed_;
  std::string stream_;
  std::mt19937_64 eng_;
};

}  // namespace seabed
