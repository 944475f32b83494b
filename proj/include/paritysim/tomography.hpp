#pragma once

// Displaced-parity Wigner tomography: forward synthesis of tomograms with
// loss, mode mismatch and shot noise, and their inversion by constrained MLE.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "paritysim/channels.hpp"
#include "paritysim/grid.hpp"
#include "paritysim/mle.hpp"

namespace paritysim {

inline constexpr const char* kKrausForwardModel = "kraus-loss+mode-mismatch";

struct TomogramCrossCheck {
  double max_abs_difference = 0.0;  ///< convolution-integral path vs Kraus path
  double convolution_normalization = 0.0;
  double kraus_normalization = 0.0;
};

struct Tomogram {
  PhaseGrid grid;
  std::vector<double> values;            ///< (pi/2) W'' at each grid point
  std::optional<std::size_t> shots;      ///< per point; empty means noiseless
  double eta = 1.0;
  double f_mm = 1.0;
  std::uint64_t seed = 0;
  std::string forward_model = kKrausForwardModel;
  std::optional<TomogramCrossCheck> cross_check;

  /// Size match and |value| <= 1 + 3/sqrt(shots) (1 + 1e-9 when noiseless).
  void validate() const;
};

/// Noiseless forward model att(alpha) * wigner_point(loss(rho), F_mm alpha).
std::vector<double> forward_tomogram_means(const DensityMatrix& rho, double eta, double f_mm,
                                           std::span<const ComplexAmplitude> points);
std::vector<double> forward_tomogram_means_serial(const DensityMatrix& rho, double eta, double f_mm,
                                                  std::span<const ComplexAmplitude> points);

/// Each grid point averages `shots` binary parity outcomes drawn from the
/// forward model (stream = point index, so thread count does not matter).
Tomogram synthesize_tomogram(const DensityMatrix& rho_ideal, double eta, double f_mm,
                             const PhaseGrid& grid, std::optional<std::size_t> shots,
                             std::uint64_t seed);
Tomogram synthesize_tomogram_serial(const DensityMatrix& rho_ideal, double eta, double f_mm,
                                    const PhaseGrid& grid, std::optional<std::size_t> shots,
                                    std::uint64_t seed);

/// Evaluate the convolution-integral forward model next to the Kraus one and
/// attach the comparison to `tomogram`.
void attach_cross_check(Tomogram& tomogram, const DensityMatrix& rho_ideal);

/// Observables whose traces against rho reproduce the forward model at each
/// grid point (loss adjoint of the displaced parity, times attenuation).
std::vector<LinearObservation> tomogram_observations(const Tomogram& tomogram, const FockSpace& space);

struct TomographyReconstruction {
  MleResult mle;
  std::string forward_model;
};

/// Least-squares MLE over the tomogram on {|0>, ..., |n_max>}.
TomographyReconstruction mle_reconstruct(const Tomogram& tomogram, int n_max = 5,
                                         const MleSettings& settings = {});

// -- preparation-angle sweep --------------------------------------------------

struct SourceScenario {
  double theta = 0.0;
  /// Two-photon population reached at theta = 2 pi; scales as (theta / 2 pi)^2.
  double two_photon_contamination = 0.0;
  double t_p = 0.080;                 ///< emission time constant [us], metadata
  double kappa_p = 2.0 * 3.14159265358979323846 * 2.0;  ///< pulse bandwidth [rad/us], metadata

  double contamination_at_theta() const;
  void validate() const;
};

/// cos(theta/2)|0> + sin(theta/2)|1>
Ket gamma_state(double theta, const FockSpace& space);

/// (1 - p2) |gamma><gamma| + p2 |2><2| with p2 = contamination_at_theta().
DensityMatrix source_state(const SourceScenario& scenario, const FockSpace& space);

struct ThetaSweepSettings {
  double eta = 0.78;
  double f_mm = 0.84;
  PhaseGrid grid{};
  std::optional<std::size_t> shots = 10000;
  std::uint64_t seed = 1;
  int n_max = 5;
  double two_photon_contamination = 0.0;
  MleSettings mle{};
};

struct ThetaSweepEntry {
  double theta = 0.0;
  double rho11 = 0.0;
  double re_rho01 = 0.0;
  double im_rho01 = 0.0;
  double fidelity = 0.0;
  double kkt_residual = 0.0;
};

struct ThetaSweepResult {
  std::vector<ThetaSweepEntry> entries;
  double phase_correction = 0.0;  ///< single rotation angle applied to every state
  std::vector<DensityMatrix> states;  ///< phase-corrected reconstructions
};

/// Rotation angle phi in (-pi/2, pi/2] minimizing sum_k Im(z_k e^{-i phi})^2.
double global_phase_minimizing_imaginary(std::span<const Complex> coherences);

ThetaSweepResult theta_sweep_entries(std::span<const double> thetas,
                                     const ThetaSweepSettings& settings);

}  // namespace paritysim
