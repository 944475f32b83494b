#pragma once

// Phenomenological model of the ancilla-based parity detector. The detector
// is described at the measurement-operator level: a conditional phase of
// pi (1 + delta) per photon plus classical bit-flip errors on the outcome
// label (thermal initialization, Ramsey dephasing, readout).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "paritysim/fock.hpp"

namespace paritysim {

enum class Parity { Even, Odd };

std::string_view to_string(Parity p);

struct DetectorParams {
  double t_w = 1.0;       ///< arming window [us]
  double t2_star = 3.5;   ///< dephasing time [us]
  double t1 = 4.5;        ///< lifetime [us], metadata only
  double f_ro = 0.94;     ///< readout fidelity
  double p_e_th = 0.04;   ///< thermal excited population
  double delta = 0.0;     ///< relative conditional-phase error
  double eta = 0.78;      ///< source-to-detector transmission

  /// Perfect detector: no label errors, exact pi phase, unit transmission.
  static DetectorParams ideal();

  /// pi (1 + delta)
  double phi_per_photon() const;
  /// Ramsey error 0.5 (1 - exp(-t_w / t2_star)).
  double p_t2() const;
  /// Readout misassignment (1 - f_ro) / 2.
  double readout_flip() const;
  /// Thermal and Ramsey flips combined (errors before readout).
  double pre_readout_flip() const;
  /// All three flips combined.
  double label_flip() const;

  /// Throws InvalidArgument for out-of-range fields.
  void validate() const;
  /// Non-fatal issues, e.g. t_w >= t2_star.
  std::vector<std::string> warnings() const;
};

/// Probability that an odd number of two independent flips occurs.
double combine_flips(double p, double q);

/// Classical 2x2 channel on outcome labels; entry(observed, actual), index 0 = even.
struct ConfusionMatrix {
  std::array<std::array<double, 2>, 2> p{{{1.0, 0.0}, {0.0, 1.0}}};

  static ConfusionMatrix identity() { return {}; }
  static ConfusionMatrix symmetric(double flip);
  /// Readout-only confusion with misassignment (1 - f_ro) / 2.
  static ConfusionMatrix readout(double f_ro);

  /// Throws SingularConfusion when |det| < 1e-12.
  std::array<std::array<double, 2>, 2> inverse() const;
};

struct ParityKraus {
  CMatrix even;  ///< (1 + U_phi) / 2
  CMatrix odd;   ///< (1 - U_phi) / 2
};

/// M_pm = (1 pm U_phi) / 2 with U_phi = exp(i phi n).
ParityKraus parity_kraus(const DetectorParams& params, const FockSpace& space);

/// Unnormalized conditional states; the trace of each is its probability.
struct ConditionedStates {
  CMatrix even;
  CMatrix odd;
};

/// M_pm rho M_pm^dag for the ideal (error-free) outcome labels.
ConditionedStates ideal_branches(const DensityMatrix& rho, const DetectorParams& params);

/// Mix the branches through a label confusion channel.
ConditionedStates apply_confusion(const ConditionedStates& actual, const ConfusionMatrix& c);

/// Invert a label confusion channel on observed branches.
ConditionedStates invert_confusion(const ConditionedStates& observed, const ConfusionMatrix& c);

struct HeraldResult {
  Parity outcome = Parity::Even;
  double probability = 0.0;
  /// Absent when the outcome has (numerically) zero probability.
  std::optional<DensityMatrix> post_state;
};

struct HeraldPair {
  HeraldResult even;
  HeraldResult odd;
};

HeraldPair to_herald_pair(const ConditionedStates& branches);

/// Herald with every label error applied; probabilities and post-states are
/// those of the reported outcome.
HeraldPair herald(const DensityMatrix& rho, const DetectorParams& params);

/// Herald after inverting the readout part of the confusion (thermal and
/// Ramsey errors remain).
HeraldPair herald_readout_corrected(const DensityMatrix& rho, const DetectorParams& params);

/// P_ro P_Ramsey + (1 - P_ro)(1 - P_Ramsey), P_ro = (1 + f_ro)/2, P_Ramsey = 1 - p_t2.
double single_shot_assignment_prob(const DetectorParams& params);

/// Linear map from excited population to parity using even/odd reference
/// populations. Unclamped. Throws DegenerateReferences if |p_plus - p_minus| < 1e-6.
double population_to_parity(double p_e, double p_e_plus, double p_e_minus);

/// (1 - 2 eta)^N
double parity_train_expected(int n_pulses, double eta);
/// sum_k (-1)^k C(N,k) eta^k (1-eta)^(N-k), the independent route to the above.
double parity_train_binomial_sum(int n_pulses, double eta);

/// Expected raw (uncorrected) parity including conditional-phase and label errors:
/// (1 - 2 q) sum_k B(k; N, eta) cos(k phi).
double parity_train_analytic(int n_pulses, const DetectorParams& params);

struct ParityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t shots = 0;
};

/// Monte Carlo over photon arrivals and label flips. Deterministic for a
/// given seed; batches run in parallel with derived seeds.
ParityEstimate parity_train_sample(int n_pulses, const DetectorParams& params, std::size_t shots,
                                   std::uint64_t seed);
ParityEstimate parity_train_sample_serial(int n_pulses, const DetectorParams& params,
                                          std::size_t shots, std::uint64_t seed);

/// Sampled train parity mapped through simulated even/odd reference traces
/// (population_to_parity), which removes the label-error contrast loss.
ParityEstimate parity_train_corrected(int n_pulses, const DetectorParams& params,
                                      std::size_t shots, std::uint64_t seed);

/// Tr(P rho_even) - Tr(P rho_odd).
double visibility(const DensityMatrix& rho_even, const DensityMatrix& rho_odd);

}  // namespace paritysim
