#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

#include "ecalab/types.hpp"

namespace ecalab {

using Rng = std::mt19937_64;

/// Stable child seed for (base, purpose tag, indices). Tag bytes are folded with FNV-1a and
/// every component is mixed through the splitmix64 finalizer, so streams are reproducible
/// across platforms and independent of call order.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::initializer_list<std::uint64_t> indices = {});

/// Circular complex Gaussian draws with E|z|^2 = variance.
CVector complex_gaussian(Rng& rng, std::size_t n, double variance);
cplx complex_gaussian(Rng& rng, double variance);

/// Unit-modulus phasor with uniform phase.
cplx random_phase(Rng& rng);

}  // namespace ecalab
