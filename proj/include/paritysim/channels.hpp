#pragma once

// Imperfection models mapping ideal states and Wigner functions to the ones
// seen by the detector: beam-splitter photon loss, the Gaussian-convolution
// measured-Wigner integral, and mode-mismatch attenuation.

#include <functional>
#include <string>
#include <vector>

#include "paritysim/fock.hpp"
#include "paritysim/grid.hpp"

namespace paritysim {

/// Beam-splitter loss with transmission eta in (0, 1].
class LossChannel {
public:
  explicit LossChannel(double eta);

  double eta() const noexcept { return eta_; }

  /// K_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>, k = 0..n_max.
  std::vector<CMatrix> kraus_operators(const FockSpace& space) const;

  DensityMatrix apply(const DensityMatrix& rho) const;

  /// Heisenberg-picture map sum_k K_k^dag X K_k.
  CMatrix adjoint_apply(const CMatrix& observable) const;

private:
  double eta_;
};

/// Throws BadEfficiency unless 0 < eta <= 1.
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

/// Temporal mode mismatch between signal and displacer pulses.
class ModeMismatch {
public:
  static constexpr double kSigmaVacSq = 0.5;

  explicit ModeMismatch(double epsilon = 0.0);
  /// From the overlap F_mm = sqrt(1 - epsilon^2).
  static ModeMismatch from_overlap(double f_mm);

  double epsilon() const noexcept { return epsilon_; }
  double overlap() const noexcept { return overlap_; }
  double sigma_vac_sq() const noexcept { return kSigmaVacSq; }

  /// exp(-epsilon^2 |alpha|^2 / (2 sigma_vac^2)).
  double attenuation(ComplexAmplitude alpha) const;
  /// sqrt(1 - epsilon^2) * alpha.
  ComplexAmplitude scaled(ComplexAmplitude alpha) const { return overlap_ * alpha; }

private:
  double epsilon_;
  double overlap_;
};

/// W''(alpha) = attenuation(alpha) * W'(sqrt(1 - eps^2) alpha).
double mode_mismatch_wigner(const std::function<double(ComplexAmplitude)>& w_prime,
                            const ModeMismatch& mm, ComplexAmplitude alpha);

/// Loss convolution integral:
///   W'(alpha) = 1/(pi (1-eta)) Int exp(-2 eta |a' - alpha/eta|^2 / (1-eta)) W(a') d^2a'
/// using the trapezoidal rule on w's grid. Throws BadEfficiency unless
/// 0 < eta < 1 and GridTooSmall when more than 1e-4 of the Gaussian kernel's
/// mass falls outside the grid.
double measured_wigner_convolution(const GridFunction& w, double eta, ComplexAmplitude alpha);

/// Fraction of the convolution kernel centred at alpha/eta lying outside the grid.
double convolution_kernel_tail_mass(const PhaseGrid& grid, double eta, ComplexAmplitude alpha);

/// Analytic integral of the convolution kernel over the plane: 1/(2 eta).
double convolution_kernel_mass(double eta);

/// Side-by-side evaluation of the two loss forward models on one grid.
struct ForwardModelComparison {
  std::string authoritative_model = "kraus-loss";
  std::vector<double> kraus;         ///< wigner_point(apply_loss(rho, eta), alpha)
  std::vector<double> convolution;   ///< measured_wigner_convolution(W_rho, eta, alpha)
  double max_abs_difference = 0.0;
  /// Int W' / Int W measured with the trapezoidal rule (analytically eta/2).
  double convolution_normalization = 0.0;
  double kraus_normalization = 0.0;
};

/// Evaluate both forward models on `grid`. The ideal Wigner function feeding
/// the convolution path is sampled on an extension of `grid` (same spacing)
/// large enough to cover the kernel at every grid point.
ForwardModelComparison compare_forward_models(const DensityMatrix& rho, double eta,
                                              const PhaseGrid& grid);

}  // namespace paritysim
