#include "paritysim/detector.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "paritysim/error.hpp"
#include "paritysim/rng.hpp"

namespace paritysim {

std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

// -- parameters -------------------------------------------------------------------

DetectorParams DetectorParams::ideal() {
  DetectorParams p;
  p.t2_star = std::numeric_limits<double>::infinity();
  p.t1 = std::numeric_limits<double>::infinity();
  p.f_ro = 1.0;
  p.p_e_th = 0.0;
  p.delta = 0.0;
  p.eta = 1.0;
  return p;
}

double DetectorParams::phi_per_photon() const { return std::numbers::pi * (1.0 + delta); }

double DetectorParams::p_t2() const { return 0.5 * (1.0 - std::exp(-t_w / t2_star)); }

double DetectorParams::readout_flip() const { return 0.5 * (1.0 - f_ro); }

double DetectorParams::pre_readout_flip() const { return combine_flips(p_e_th, p_t2()); }

double DetectorParams::label_flip() const { return combine_flips(pre_readout_flip(), readout_flip()); }

void DetectorParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
  };
  require(t_w > 0.0 && std::isfinite(t_w), "t_w must be positive");
  require(t2_star > 0.0, "t2_star must be positive");
  require(t1 > 0.0, "t1 must be positive");
  require(f_ro >= 0.0 && f_ro <= 1.0, "f_ro must lie in [0, 1]");
  require(p_e_th >= 0.0 && p_e_th <= 1.0, "p_e_th must lie in [0, 1]");
  require(std::isfinite(delta), "delta must be finite");
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
}

std::vector<std::string> DetectorParams::warnings() const {
  std::vector<std::string> out;
  if (t_w >= t2_star) {
    out.push_back("t_w (" + std::to_string(t_w) + " us) is not shorter than t2_star (" +
                  std::to_string(t2_star) + " us); parity contrast will be poor");
  }
  return out;
}

double combine_flips(double p, double q) { return p + q - 2.0 * p * q; }

// -- confusion ----------------------------------------------------------------------

ConfusionMatrix ConfusionMatrix::symmetric(double flip) {
  ConfusionMatrix c;
  c.p = {{{1.0 - flip, flip}, {flip, 1.0 - flip}}};
  return c;
}

ConfusionMatrix ConfusionMatrix::readout(double f_ro) { return symmetric(0.5 * (1.0 - f_ro)); }

std::array<std::array<double, 2>, 2> ConfusionMatrix::inverse() const {
  const double det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
  if (std::abs(det) < 1e-12) {
    throw Error(ErrorKind::SingularConfusion, "confusion matrix is not invertible");
  }
  return {{{p[1][1] / det, -p[0][1] / det}, {-p[1][0] / det, p[0][0] / det}}};
}

// -- measurement operators --------------------------------------------------------------

ParityKraus parity_kraus(const DetectorParams& params, const FockSpace& space) {
  const int dim = space.dim();
  const double phi = params.phi_per_photon();
  ParityKraus k{CMatrix::Zero(dim, dim), CMatrix::Zero(dim, dim)};
  for (int n = 0; n < dim; ++n) {
    // Reduce n*phi mod 2 pi so that delta = 0 gives exact +-1 phases.
    const Complex u = std::polar(1.0, std::remainder(n * phi, 2.0 * std::numbers::pi));
    const Complex u_exact = (params.delta == 0.0) ? Complex(n % 2 == 0 ? 1.0 : -1.0, 0.0) : u;
    k.even(n, n) = 0.5 * (1.0 + u_exact);
    k.odd(n, n) = 0.5 * (1.0 - u_exact);
  }
  return k;
}

ConditionedStates ideal_branches(const DensityMatrix& rho, const DetectorParams& params) {
  const ParityKraus k = parity_kraus(params, FockSpace(rho.dim() - 1));
  return {k.even * rho.matrix() * k.even.adjoint(), k.odd * rho.matrix() * k.odd.adjoint()};
}

ConditionedStates apply_confusion(const ConditionedStates& actual, const ConfusionMatrix& c) {
  return {c.p[0][0] * actual.even + c.p[0][1] * actual.odd,
          c.p[1][0] * actual.even + c.p[1][1] * actual.odd};
}

ConditionedStates invert_confusion(const ConditionedStates& observed, const ConfusionMatrix& c) {
  const auto inv = c.inverse();
  return {inv[0][0] * observed.even + inv[0][1] * observed.odd,
          inv[1][0] * observed.even + inv[1][1] * observed.odd};
}

namespace {

HeraldResult make_result(Parity outcome, const CMatrix& unnormalized) {
  HeraldResult r;
  r.outcome = outcome;
  r.probability = unnormalized.trace().real();
  if (r.probability > 1e-14) r.post_state = DensityMatrix::normalized(unnormalized);
  return r;
}

}  // namespace

HeraldPair to_herald_pair(const ConditionedStates& branches) {
  return {make_result(Parity::Even, branches.even), make_result(Parity::Odd, branches.odd)};
}

HeraldPair herald(const DensityMatrix& rho, const DetectorParams& params) {
  const ConditionedStates actual = ideal_branches(rho, params);
  return to_herald_pair(apply_confusion(actual, ConfusionMatrix::symmetric(params.label_flip())));
}

HeraldPair herald_readout_corrected(const DensityMatrix& rho, const DetectorParams& params) {
  const ConditionedStates actual = ideal_branches(rho, params);
  const ConditionedStates observed =
      apply_confusion(actual, ConfusionMatrix::symmetric(params.label_flip()));
  return to_herald_pair(invert_confusion(observed, ConfusionMatrix::readout(params.f_ro)));
}

// -- scalar error budget ----------------------------------------------------------------

double single_shot_assignment_prob(const DetectorParams& params) {
  const double p_ro = 0.5 * (1.0 + params.f_ro);
  const double p_ramsey = 1.0 - params.p_t2();
  return p_ro * p_ramsey + (1.0 - p_ro) * (1.0 - p_ramsey);
}

double population_to_parity(double p_e, double p_e_plus, double p_e_minus) {
  if (std::abs(p_e_plus - p_e_minus) < 1e-6) {
    throw Error(ErrorKind::DegenerateReferences, "even and odd reference populations coincide");
  }
  return (p_e - 0.5 * (p_e_plus + p_e_minus)) / (0.5 * (p_e_plus - p_e_minus));
}

double parity_train_expected(int n_pulses, double eta) {
  if (n_pulses < 0) throw Error(ErrorKind::InvalidArgument, "negative pulse count");
  return std::pow(1.0 - 2.0 * eta, n_pulses);
}

double parity_train_binomial_sum(int n_pulses, double eta) {
  if (n_pulses < 0) throw Error(ErrorKind::InvalidArgument, "negative pulse count");
  double sum = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= n_pulses; ++k) {
    const double term = binom * std::pow(eta, k) * std::pow(1.0 - eta, n_pulses - k);
    sum += (k % 2 == 0) ? term : -term;
    binom = binom * (n_pulses - k) / (k + 1);
  }
  return sum;
}

double parity_train_analytic(int n_pulses, const DetectorParams& params) {
  double sum = 0.0;
  double binom = 1.0;
  const double phi = params.phi_per_photon();
  for (int k = 0; k <= n_pulses; ++k) {
    const double b = binom * std::pow(params.eta, k) * std::pow(1.0 - params.eta, n_pulses - k);
    sum += b * std::cos(k * phi);
    binom = binom * (n_pulses - k) / (k + 1);
  }
  return (1.0 - 2.0 * params.label_flip()) * sum;
}

// -- Monte Carlo ----------------------------------------------------------------------

namespace {

enum class Reference { None, Even, Odd };

// Number of shots in batch b reported as "even" (qubit left in |e>).
std::size_t even_count_in_batch(int n_pulses, const DetectorParams& params, std::size_t shots,
                                std::uint64_t seed, std::uint64_t stream_base, int b,
                                Reference ref) {
  Rng rng = derived_rng(seed, stream_base + static_cast<std::uint64_t>(b));
  const std::size_t n = batch_size(shots, kBatchCount, b);
  std::binomial_distribution<int> arrivals(n_pulses, std::clamp(params.eta, 0.0, 1.0));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::bernoulli_distribution thermal(params.p_e_th);
  std::bernoulli_distribution ramsey(params.p_t2());
  std::bernoulli_distribution readout(params.readout_flip());
  const double phi = params.phi_per_photon();
  std::size_t even = 0;
  for (std::size_t s = 0; s < n; ++s) {
    bool is_even = true;
    if (ref == Reference::None) {
      const int k = n_pulses > 0 ? arrivals(rng) : 0;
      const double c = std::cos(0.5 * k * phi);
      is_even = uniform(rng) < c * c;
    } else {
      is_even = (ref == Reference::Even);
    }
    if (thermal(rng)) is_even = !is_even;
    if (ramsey(rng)) is_even = !is_even;
    if (readout(rng)) is_even = !is_even;
    even += is_even ? 1 : 0;
  }
  return even;
}

std::size_t even_count(int n_pulses, const DetectorParams& params, std::size_t shots,
                       std::uint64_t seed, std::uint64_t stream_base, Reference ref) {
  std::array<std::size_t, kBatchCount> counts{};
#pragma omp parallel for schedule(static)
  for (int b = 0; b < kBatchCount; ++b) {
    counts[b] = even_count_in_batch(n_pulses, params, shots, seed, stream_base, b, ref);
  }
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  return total;
}

ParityEstimate estimate_from_count(std::size_t even, std::size_t shots) {
  ParityEstimate e;
  e.shots = shots;
  e.mean = (2.0 * static_cast<double>(even) - static_cast<double>(shots)) / static_cast<double>(shots);
  const double var = shots > 1 ? (1.0 - e.mean * e.mean) * shots / (shots - 1.0) : 1.0;
  e.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(shots));
  return e;
}

void check_shots(std::size_t shots) {
  if (shots < 1) throw Error(ErrorKind::InvalidArgument, "shots must be >= 1");
}

constexpr std::uint64_t kSignalStream = 0;
constexpr std::uint64_t kEvenRefStream = 1000;
constexpr std::uint64_t kOddRefStream = 2000;

}  // namespace

ParityEstimate parity_train_sample(int n_pulses, const DetectorParams& params, std::size_t shots,
                                   std::uint64_t seed) {
  check_shots(shots);
  params.validate();
  return estimate_from_count(even_count(n_pulses, params, shots, seed, kSignalStream, Reference::None),
                             shots);
}

ParityEstimate parity_train_sample_serial(int n_pulses, const DetectorParams& params,
                                          std::size_t shots, std::uint64_t seed) {
  check_shots(shots);
  params.validate();
  std::size_t total = 0;
  for (int b = 0; b < kBatchCount; ++b) {
    total += even_count_in_batch(n_pulses, params, shots, seed, kSignalStream, b, Reference::None);
  }
  return estimate_from_count(total, shots);
}

ParityEstimate parity_train_corrected(int n_pulses, const DetectorParams& params,
                                      std::size_t shots, std::uint64_t seed) {
  check_shots(shots);
  params.validate();
  const double n = static_cast<double>(shots);
  const double p_e = even_count(n_pulses, params, shots, seed, kSignalStream, Reference::None) / n;
  const double p_plus = even_count(0, params, shots, seed, kEvenRefStream, Reference::Even) / n;
  const double p_minus = even_count(0, params, shots, seed, kOddRefStream, Reference::Odd) / n;
  ParityEstimate e;
  e.shots = shots;
  e.mean = population_to_parity(p_e, p_plus, p_minus);
  // Propagate the binomial error of the signal population only.
  e.std_error = std::sqrt(p_e * (1.0 - p_e) / n) / (0.5 * std::abs(p_plus - p_minus));
  return e;
}

double visibility(const DensityMatrix& rho_even, const DensityMatrix& rho_odd) {
  return expectation_parity(rho_even) - expectation_parity(rho_odd);
}

}  // namespace paritysim
