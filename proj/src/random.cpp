#include "ecalab/random.hpp"

#include <cmath>

namespace ecalab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::initializer_list<std::uint64_t> indices) {
  std::uint64_t tag_hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    tag_hash ^= c;
    tag_hash *= 0x100000001b3ULL;
  }
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ tag_hash);
  for (std::uint64_t i : indices) h = splitmix64(h ^ i);
  return h;
}

// Unit draws scaled afterwards: the same stream gives common random numbers at any variance.
cplx complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return cplx{re, im} * std::sqrt(variance);
}

CVector complex_gaussian(Rng& rng, std::size_t n, double variance) {
  CVector out(static_cast<Eigen::Index>(n));
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double scale = std::sqrt(variance);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    out[i] = cplx{re, im} * scale;
  }
  return out;
}

cplx random_phase(Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  return std::polar(1.0, uniform(rng));
}

}  // namespace ecalab
