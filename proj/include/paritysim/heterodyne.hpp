#pragma once

// Heterodyne record synthesis and moment estimation. Records are samples of
// the Husimi Q-function broadened by a circular Gaussian of n0 added noise
// photons; signal moments <a^dag^n a^m> are recovered by deconvolving the
// moments of a vacuum reference measured through the same chain.

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "paritysim/detector.hpp"
#include "paritysim/fock.hpp"
#include "paritysim/mle.hpp"
#include "paritysim/rng.hpp"

namespace paritysim {

struct NoiseModel {
  double n0 = 3.3;  ///< added noise photons above the heterodyne vacuum quantum

  double eta_het() const { return 1.0 / (1.0 + n0); }
  void validate() const;
};

struct HeterodyneRecord {
  std::uint64_t shot = 0;
  double i = 0.0;
  double q = 0.0;
  double qubit_q = 0.0;  ///< integrated qubit readout quadrature; +1 excited (even), -1 ground

  Complex s() const { return {i, q}; }
};

/// Two Gaussians at +-1 with width 1 / Phi^-1((1 + f_ro) / 2), so a threshold at
/// zero misassigns with probability (1 - f_ro) / 2.
struct QubitReadout {
  double f_ro = 1.0;

  double sigma() const;
};

/// Exact rejection sampler for the Q-function of a pure state, using a uniform
/// mixture of Fock-state Q-functions as the envelope.
class QSampler {
public:
  explicit QSampler(const CVector& psi);

  Complex operator()(Rng& rng) const;

private:
  CVector psi_;
  int support_ = 0;
};

/// Mixture of eigenstate samplers weighted by the eigenvalues of rho.
class MixedQSampler {
public:
  explicit MixedQSampler(const DensityMatrix& rho);

  Complex operator()(Rng& rng) const;

private:
  std::vector<QSampler> samplers_;
  std::vector<double> weights_;
};

/// Records of rho through the noisy chain; qubit_q is 0.
std::vector<HeterodyneRecord> simulate_heterodyne(const DensityMatrix& rho, const NoiseModel& noise,
                                                  std::size_t shots, std::uint64_t seed);
std::vector<HeterodyneRecord> simulate_heterodyne_serial(const DensityMatrix& rho,
                                                         const NoiseModel& noise,
                                                         std::size_t shots, std::uint64_t seed);

/// Each shot is heralded by the detector: the field is drawn from the actual
/// parity branch, the qubit label carries thermal and Ramsey flips, and
/// qubit_q carries the readout noise.
std::vector<HeterodyneRecord> simulate_heralded_heterodyne(const DensityMatrix& rho_in,
                                                           const DetectorParams& params,
                                                           const NoiseModel& noise,
                                                           std::size_t shots, std::uint64_t seed);

using MomentIndex = std::pair<int, int>;

struct MomentTable {
  int order = 0;                                 ///< max n + m
  std::map<MomentIndex, Complex> values;         ///< <a^dag^n a^m>
  std::map<MomentIndex, double> std_errors;      ///< sqrt(re_err^2 + im_err^2)
  std::map<MomentIndex, double> re_errors;
  std::map<MomentIndex, double> im_errors;
  std::vector<std::map<MomentIndex, Complex>> batch_values;  ///< per-batch estimates

  Complex value(int n, int m) const;
  double std_error(int n, int m) const;
  /// Rotate a -> a e^{i theta}: value(n, m) picks up e^{i (m - n) theta}.
  void rotate(double theta);
  /// Recompute the error maps from batch_values.
  void update_errors();
};

/// Every (n, m) with n + m <= order.
std::vector<MomentIndex> moment_indices(int order);

/// Tabulated <a^dag^n a^m> of rho with unit standard errors.
MomentTable exact_moment_table(const DensityMatrix& rho, int order);

/// Moments of a circular Gaussian with E|g|^2 = 1 + n0: delta_nm n! (1 + n0)^n.
std::map<MomentIndex, Complex> analytic_noise_moments(const NoiseModel& noise, int order);

/// <S^dag^n S^m> = sum C(n,i) C(m,j) <a^dag^i a^j> G(n-i, m-j).
std::map<MomentIndex, Complex> convolve_moments(const std::map<MomentIndex, Complex>& signal,
                                                const std::map<MomentIndex, Complex>& noise,
                                                int order);
/// Inverse of convolve_moments, lowest order first. G(0,0) is taken as 1.
std::map<MomentIndex, Complex> deconvolve_moments(const std::map<MomentIndex, Complex>& raw,
                                                  const std::map<MomentIndex, Complex>& noise,
                                                  int order);

/// Per-batch sums of conj(S)^n S^m over kBatchCount contiguous batches,
/// laid out in moment_indices(order) order.
struct RawMomentSums {
  int order = 0;
  std::vector<std::vector<Complex>> sums;
  std::vector<double> counts;
};

RawMomentSums raw_moment_sums(std::span<const HeterodyneRecord> records, int order);
RawMomentSums raw_moment_sums_serial(std::span<const HeterodyneRecord> records, int order);

/// Deconvolved signal moments with batch-mean standard errors. Throws
/// InsufficientStatistics with fewer than kBatchCount records in either set, or
/// when a moment at max_order has a standard error above max(|value|, 1).
MomentTable moments_from_records(std::span<const HeterodyneRecord> records,
                                 std::span<const HeterodyneRecord> vacuum, int max_order);

struct ConditionedMoments {
  MomentTable even;
  MomentTable odd;
  double even_fraction = 0.0;   ///< after confusion inversion
  double phase_correction = 0.0;
};

/// Split on qubit_q > threshold (even), invert the label confusion on the
/// class-weighted accumulators, deconvolve, then rotate both tables by one
/// phase that makes the pooled <a^2> real and positive.
ConditionedMoments conditioned_moments(std::span<const HeterodyneRecord> records,
                                       std::span<const HeterodyneRecord> vacuum, double threshold,
                                       const ConfusionMatrix& confusion, int max_order);

/// Weighted least squares on the table (inverse variance; (0,0) skipped).
MleResult mle_from_moments(const MomentTable& table, int n_max = 5, const MleSettings& settings = {});

struct G2Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// <a^dag^2 a^2> / <a^dag a>^2 with a batch-mean standard error.
G2Estimate g2_from_moments(const MomentTable& table);

}  // namespace paritysim
