#pragma once

#include <optional>
#include <vector>

#include "ecalab/scene.hpp"
#include "ecalab/types.hpp"

namespace ecalab {

/// How one node's record is cut into batches and what the cancellation needs to know about it.
struct BatchLayout {
  std::size_t samples = 0;       // N
  std::size_t max_delay = 0;     // M_delay
  std::size_t clutter_taps = 0;  // L
  double dt = 1.0;
  std::size_t count = 1;
  BatchMode mode = BatchMode::Consecutive;
  Migration migration = Migration::Static;
  double carrier = 0.0;

  /// Largest delay the reference record can interpolate.
  double max_supported_delay() const;
};

BatchLayout layout_for(const Scenario& scenario, std::size_t node);

/// One batch: surveillance samples on `grid` and a contiguous full-rate stretch of the
/// reference, reference[j] = x(t_{ref_first + j}).
struct Batch {
  CVector surveillance;
  CVector reference;
  std::ptrdiff_t ref_first = 0;
  TimeGrid grid;
  BatchLayout layout;

  /// x(t_i), zero outside the stored stretch.
  cplx reference_at(std::ptrdiff_t i) const;
};

/// Consecutive batches are contiguous slices; sparse batches take every count-th sample and
/// keep the full reference. Times stay global, so the Doppler variable is the physical one in
/// both modes.
std::vector<Batch> batch_split(const NodeRecord& record, const BatchLayout& layout);

inline constexpr int kInterpolationHalfWidth = 16;
inline constexpr double kInterpolationBeta = 12.0;

/// Kaiser-windowed sinc tap weight at offset u (in samples); zero for |u| > half-width.
double kaiser_sinc(double u);

/// [x, X]: reference windows aligned with the batch grid at lattice delays 0..L, plus a thin
/// orthonormal basis of their span.
class InterferenceBasis {
 public:
  explicit InterferenceBasis(CMatrix columns);
  static InterferenceBasis from_batch(const Batch& batch);

  const CMatrix& columns() const { return columns_; }
  const CMatrix& orthonormal() const { return q_; }

  /// v - U (U^H v), never forming the projector.
  CVector project_out(const CVector& v) const;
  CMatrix project_out(const CMatrix& v) const;

 private:
  CMatrix columns_;
  CMatrix q_;
};

/// x(t - tau) (.) v(omega) on the batch grid by fractional-delay interpolation of the reference.
/// Lattice delays copy samples exactly. Throws RangeError outside [0, max_supported_delay].
CVector rc_steering(const Batch& batch, double tau, double omega);

/// |a^H P y|^2 / (a^H P a) with P the projector onto the complement of the basis.
double spectrum_value(const CVector& y, const InterferenceBasis& basis, const CVector& steering);

/// Same quotient with y already projected; nullopt when the projected steering is degenerate.
std::optional<double> spectrum_value_projected(const CVector& y_projected, const InterferenceBasis& basis,
                                               const CVector& steering);

class BatchSpectrum {
 public:
  explicit BatchSpectrum(Batch batch);

  const Batch& batch() const { return batch_; }
  const InterferenceBasis& basis() const { return basis_; }
  const CVector& projected_surveillance() const { return y_projected_; }

  /// nullopt when (tau, omega) is out of range or degenerate.
  std::optional<double> value(double tau, double omega) const;

 private:
  Batch batch_;
  InterferenceBasis basis_;
  CVector y_projected_;
};

/// Incoherent sum of batch spectra for one node.
class NodeSpectrum {
 public:
  NodeSpectrum(const NodeRecord& record, const BatchLayout& layout);

  std::size_t batch_count() const { return batches_.size(); }
  const BatchSpectrum& batch(std::size_t m) const { return batches_.at(m); }
  const BatchLayout& layout() const { return layout_; }

  /// Sum over batches, missing batches adding zero; nullopt only when every batch is missing.
  std::optional<double> value(double tau, double omega) const;

 private:
  BatchLayout layout_;
  std::vector<BatchSpectrum> batches_;
};

double frame_spectrum(const std::vector<BatchSpectrum>& batches, double tau, double omega);

struct AmbiguitySurface {
  RVector tau_grid;    // s
  RVector omega_grid;  // rad/s
  RMatrix values;      // tau x omega; NaN marks missing points
  std::size_t node = 0;
};

struct SpectrumGrid {
  RVector tau;
  RVector omega;
};

/// Quarter-cell grid: tau over [0, max supported delay], omega over [omega_min, omega_max].
SpectrumGrid default_grid(const BatchLayout& layout, double omega_min, double omega_max);

/// Doppler resolution cell 2 pi / T of one batch.
double doppler_cell(const BatchLayout& layout);

AmbiguitySurface spectrum_grid(const NodeSpectrum& spectrum, const RVector& tau_grid, const RVector& omega_grid,
                               std::size_t node = 0);

}  // namespace ecalab
