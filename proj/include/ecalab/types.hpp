#pragma once

#include <complex>
#include <cstddef>
#include <numbers>

#include <Eigen/Dense>

namespace ecalab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr cplx kJ{0.0, 1.0};

enum class Migration { Static, Migrating };
enum class BatchMode { Consecutive, Sparse };
enum class EstimationMode { DelayDoppler, Theta };

/// Uniform lattice of sample instants t = (first + q * stride) * dt, q = 0..count-1.
struct TimeGrid {
  std::ptrdiff_t first = 0;
  std::ptrdiff_t stride = 1;
  std::size_t count = 0;
  double dt = 1.0;

  std::ptrdiff_t index(std::size_t q) const { return first + static_cast<std::ptrdiff_t>(q) * stride; }
  double time(std::size_t q) const { return static_cast<double>(index(q)) * dt; }
  std::ptrdiff_t last_index() const { return count == 0 ? first : index(count - 1); }
};

inline TimeGrid contiguous_grid(std::size_t count, double dt) { return TimeGrid{0, 1, count, dt}; }

}  // namespace ecalab
