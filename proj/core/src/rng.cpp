#include "seabed/rng.hpp"

namespace seabed {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed, const std::string& stream)
    : seed_(seed), stream_(stream), eng_(seed ^ fnv1a(stream)) {}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(eng_);
}

double Rng::normal(double mean, double sigma) {
  std::normal_distribution<double> d(mean, sigma);
  return d(eng_);
}

int Rng::uniform_int(int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  return d(eng_);
}

Rng Rng::split(const std::string& substream) const { return Rng(seed_, stream_ + "/" + substream); }

}  // namespace seabed
