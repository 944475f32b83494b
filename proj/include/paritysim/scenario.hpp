#pragma once

// Config-driven scenario runner. A scenario file is TOML with a top-level
// `scenario` name, an optional `seed`, and flat sections:
//
//   [detector]  t_w t2_star t1 f_ro p_e_th delta eta
//   [channels]  eta f_mm
//   [noise]     n0
//   [grid]      half_width points
//   [state]     kind n alpha_re alpha_im theta two_photon_contamination n_max
//   [solver]    n_max max_iterations relative_tolerance restarts kkt_tolerance seed
//   [parity-train] [wigner-map] [theta-sweep] [herald-cats] [g2-sweep] [moments]
//
// Unknown sections or keys are rejected with the offending key named.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "paritysim/detector.hpp"
#include "paritysim/grid.hpp"
#include "paritysim/heterodyne.hpp"
#include "paritysim/io.hpp"
#include "paritysim/mle.hpp"

namespace paritysim {

inline const std::vector<std::string> kScenarioNames = {"parity-train", "wigner-map", "theta-sweep",
                                                        "herald-cats",  "g2-sweep",   "moments"};

struct StateSpec {
  std::string kind = "fock";  ///< vacuum | fock | coherent | cat-even | cat-odd | gamma
  int n = 1;
  double alpha_re = 1.06;
  double alpha_im = 0.0;
  double theta = 1.5707963267948966;
  double two_photon_contamination = 0.0;
  int n_max = 20;

  ComplexAmplitude alpha() const { return {alpha_re, alpha_im}; }
};

DensityMatrix build_state(const StateSpec& spec);

struct ParityTrainConfig {
  int max_pulses = 6;
  std::int64_t shots = 100000;
};

struct WignerMapConfig {
  std::int64_t shots = 0;  ///< 0 means noiseless
  bool reconstruct = true;
  bool cross_check = true;
};

struct ThetaSweepConfig {
  std::vector<double> theta_over_pi = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  std::int64_t shots = 10000;
  double two_photon_contamination = 0.0;
};

struct HeraldCatsConfig {
  double alpha = 1.06;
  std::int64_t shots = 1000000;  ///< heralded heterodyne shots; 0 skips the sampled pipeline
  std::int64_t vacuum_shots = 1000000;
  int max_order = 4;
};

struct G2SweepConfig {
  std::vector<double> mean_photons = {0.25, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0};
  std::int64_t shots = 1000000;
  std::int64_t vacuum_shots = 1000000;
  bool ideal_detector = true;
};

struct MomentsConfig {
  std::int64_t shots = 1000000;
  std::int64_t vacuum_shots = 1000000;
  int max_order = 4;
  bool heralded = false;
  bool write_records = false;
};

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  DetectorParams detector;
  double loss_eta = 0.78;
  double f_mm = 0.84;
  NoiseModel noise;
  double grid_half_width = 2.0;
  int grid_points = 41;
  StateSpec state;
  int n_max = 5;
  MleSettings mle;
  ParityTrainConfig parity_train;
  WignerMapConfig wigner_map;
  ThetaSweepConfig theta_sweep;
  HeraldCatsConfig herald_cats;
  G2SweepConfig g2_sweep;
  MomentsConfig moments;

  std::vector<std::string> defaulted;  ///< dotted keys left at their defaults
  std::vector<std::string> warnings;

  PhaseGrid grid() const { return PhaseGrid::square(grid_half_width, grid_points); }
};

/// Throws ConfigError naming the offending key.
ScenarioConfig parse_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& source = "<string>");

/// Every resolved parameter, section by section.
Json resolved_json(const ScenarioConfig& config);
/// The same parameters as a TOML document that parses back to an identical config.
std::string resolved_toml(const ScenarioConfig& config);

/// Runs the scenario into `out_dir` and returns the summary that was written
/// to summary.json. Also writes provenance.json.
Json run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                  int threads = 0);

}  // namespace paritysim
