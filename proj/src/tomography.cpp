#include "paritysim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "paritysim/rng.hpp"

namespace paritysim {

void Tomogram::validate() const {
  grid.validate();
  if (values.size() != grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "tomogram values do not match the grid size");
  }
  if (shots && *shots == 0) throw Error(ErrorKind::InvalidArgument, "tomogram shots must be >= 1");
  const double guard = shots ? 1.0 + 3.0 / std::sqrt(static_cast<double>(*shots)) : 1.0 + 1e-9;
  for (double v : values) {
    if (!std::isfinite(v) || std::abs(v) > guard) {
      throw Error(ErrorKind::InvalidArgument, "tomogram value outside the noise guard");
    }
  }
}

namespace {

double forward_mean(const DensityMatrix& lossy, const ModeMismatch& mm, ComplexAmplitude alpha) {
  return mm.attenuation(alpha) * wigner_point(lossy, mm.scaled(alpha));
}

double draw_parity_average(double mean, std::size_t shots, std::uint64_t seed, std::size_t k) {
  Rng rng = derived_rng(seed, k);
  const double p_even = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
  std::binomial_distribution<std::size_t> outcomes(shots, p_even);
  const double even = static_cast<double>(outcomes(rng));
  return 2.0 * even / static_cast<double>(shots) - 1.0;
}

Tomogram make_tomogram(const PhaseGrid& grid, double eta, double f_mm,
                       std::optional<std::size_t> shots, std::uint64_t seed) {
  grid.validate();
  if (shots && *shots == 0) throw Error(ErrorKind::InvalidArgument, "shots must be >= 1");
  Tomogram t;
  t.grid = grid;
  t.shots = shots;
  t.eta = eta;
  t.f_mm = f_mm;
  t.seed = seed;
  return t;
}

}  // namespace

std::vector<double> forward_tomogram_means(const DensityMatrix& rho, double eta, double f_mm,
                                           std::span<const ComplexAmplitude> points) {
  const DensityMatrix lossy = apply_loss(rho, eta);
  const ModeMismatch mm = ModeMismatch::from_overlap(f_mm);
  std::vector<double> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = forward_mean(lossy, mm, points[k]);
  return out;
}

std::vector<double> forward_tomogram_means_serial(const DensityMatrix& rho, double eta, double f_mm,
                                                  std::span<const ComplexAmplitude> points) {
  const DensityMatrix lossy = apply_loss(rho, eta);
  const ModeMismatch mm = ModeMismatch::from_overlap(f_mm);
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) out[k] = forward_mean(lossy, mm, points[k]);
  return out;
}

Tomogram synthesize_tomogram(const DensityMatrix& rho_ideal, double eta, double f_mm,
                             const PhaseGrid& grid, std::optional<std::size_t> shots,
                             std::uint64_t seed) {
  Tomogram t = make_tomogram(grid, eta, f_mm, shots, seed);
  const std::vector<ComplexAmplitude> points = grid.points();
  t.values = forward_tomogram_means(rho_ideal, eta, f_mm, points);
  if (shots) {
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      t.values[k] = draw_parity_average(t.values[k], *shots, seed, static_cast<std::size_t>(k));
    }
  }
  return t;
}

Tomogram synthesize_tomogram_serial(const DensityMatrix& rho_ideal, double eta, double f_mm,
                                    const PhaseGrid& grid, std::optional<std::size_t> shots,
                                    std::uint64_t seed) {
  Tomogram t = make_tomogram(grid, eta, f_mm, shots, seed);
  const std::vector<ComplexAmplitude> points = grid.points();
  t.values = forward_tomogram_means_serial(rho_ideal, eta, f_mm, points);
  if (shots) {
    for (std::size_t k = 0; k < points.size(); ++k) {
      t.values[k] = draw_parity_average(t.values[k], *shots, seed, k);
    }
  }
  return t;
}

void attach_cross_check(Tomogram& tomogram, const DensityMatrix& rho_ideal) {
  const ForwardModelComparison cmp = compare_forward_models(rho_ideal, tomogram.eta, tomogram.grid);
  tomogram.cross_check = TomogramCrossCheck{cmp.max_abs_difference, cmp.convolution_normalization,
                                            cmp.kraus_normalization};
}

std::vector<LinearObservation> tomogram_observations(const Tomogram& tomogram,
                                                     const FockSpace& space) {
  tomogram.validate();
  const LossChannel loss(tomogram.eta);
  const ModeMismatch mm = ModeMismatch::from_overlap(tomogram.f_mm);
  const std::vector<ComplexAmplitude> points = tomogram.grid.points();
  std::vector<LinearObservation> obs(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const CMatrix parity = displaced_parity_observable(mm.scaled(points[k]), space);
    obs[k].observable = mm.attenuation(points[k]) * loss.adjoint_apply(parity);
    obs[k].target = tomogram.values[k];
    obs[k].weight = 1.0;
  }
  return obs;
}

TomographyReconstruction mle_reconstruct(const Tomogram& tomogram, int n_max,
                                         const MleSettings& settings) {
  const FockSpace space(n_max);
  const std::size_t unknowns = static_cast<std::size_t>(space.dim()) * space.dim();
  if (tomogram.grid.size() < unknowns) {
    throw Error(ErrorKind::InvalidArgument, "tomogram has fewer points than density-matrix parameters");
  }
  const std::vector<LinearObservation> obs = tomogram_observations(tomogram, space);
  return {solve_mle(obs, space.dim(), settings), tomogram.forward_model};
}

// -- theta sweep ---------------------------------------------------------------------

double SourceScenario::contamination_at_theta() const {
  const double x = theta / (2.0 * std::numbers::pi);
  return two_photon_contamination * x * x;
}

void SourceScenario::validate() const {
  if (!(two_photon_contamination >= 0.0 && two_photon_contamination <= 0.1)) {
    throw Error(ErrorKind::InvalidArgument, "two-photon contamination must lie in [0, 0.1]");
  }
}

Ket gamma_state(double theta, const FockSpace& space) {
  CVector v = CVector::Zero(space.dim());
  v(0) = std::cos(0.5 * theta);
  v(1) = std::sin(0.5 * theta);
  return Ket::normalized(std::move(v));
}

DensityMatrix source_state(const SourceScenario& scenario, const FockSpace& space) {
  scenario.validate();
  if (space.n_max() < 2) throw Error(ErrorKind::InvalidArgument, "source state needs n_max >= 2");
  const double p2 = scenario.contamination_at_theta();
  CMatrix rho = (1.0 - p2) * DensityMatrix::pure(gamma_state(scenario.theta, space)).matrix();
  rho(2, 2) += p2;
  return DensityMatrix::normalized(std::move(rho));
}

double global_phase_minimizing_imaginary(std::span<const Complex> coherences) {
  // sum (y cos phi - x sin phi)^2 = v^T M v with v = (cos phi, sin phi).
  double yy = 0.0, xy = 0.0, xx = 0.0;
  for (const Complex& z : coherences) {
    yy += z.imag() * z.imag();
    xy += z.real() * z.imag();
    xx += z.real() * z.real();
  }
  if (xx + yy == 0.0) return 0.0;
  Eigen::Matrix2d m;
  m << yy, -xy, -xy, xx;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  const Eigen::Vector2d v = es.eigenvectors().col(0);
  double phi = std::atan2(v(1), v(0));
  if (phi > 0.5 * std::numbers::pi) phi -= std::numbers::pi;
  if (phi <= -0.5 * std::numbers::pi) phi += std::numbers::pi;
  return phi;
}

ThetaSweepResult theta_sweep_entries(std::span<const double> thetas,
                                     const ThetaSweepSettings& settings) {
  const FockSpace space(settings.n_max);
  ThetaSweepResult result;
  std::vector<DensityMatrix> raw;
  std::vector<double> kkt;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    SourceScenario scenario;
    scenario.theta = thetas[k];
    scenario.two_photon_contamination = settings.two_photon_contamination;
    const DensityMatrix truth = source_state(scenario, space);
    const std::uint64_t seed = derived_rng(settings.seed, k)();
    const Tomogram t = synthesize_tomogram(truth, settings.eta, settings.f_mm, settings.grid,
                                           settings.shots, seed);
    TomographyReconstruction rec = mle_reconstruct(t, settings.n_max, settings.mle);
    kkt.push_back(rec.mle.kkt_residual);
    raw.push_back(std::move(rec.mle.rho));
  }

  std::vector<Complex> coherences;
  for (const auto& rho : raw) coherences.push_back(rho(0, 1));
  result.phase_correction = global_phase_minimizing_imaginary(coherences);

  for (std::size_t k = 0; k < raw.size(); ++k) {
    // U = exp(-i phi n) maps rho_01 -> rho_01 e^{-i phi}.
    DensityMatrix corrected = rotate_phase(raw[k], -result.phase_correction);
    ThetaSweepEntry e;
    e.theta = thetas[k];
    e.rho11 = corrected(1, 1).real();
    e.re_rho01 = corrected(0, 1).real();
    e.im_rho01 = corrected(0, 1).imag();
    e.fidelity = fidelity(corrected, DensityMatrix::pure(gamma_state(thetas[k], space)));
    e.kkt_residual = kkt[k];
    result.entries.push_back(e);
    result.states.push_back(std::move(corrected));
  }
  return result;
}

}  // namespace paritysim
