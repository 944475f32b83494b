#include "paritysim/heterodyne.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "paritysim/error.hpp"

namespace paritysim {

void NoiseModel::validate() const {
  if (!(n0 >= 0.0) || !std::isfinite(n0)) {
    throw Error(ErrorKind::InvalidArgument, "n0 must be finite and >= 0");
  }
}

double QubitReadout::sigma() const {
  if (!(f_ro > 0.0 && f_ro <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "qubit readout fidelity must lie in (0, 1]");
  }
  if (f_ro == 1.0) return 0.0;
  // Phi^-1((1 + f) / 2) = sqrt(2) erf^-1(f)
  return 1.0 / (std::numbers::sqrt2 * boost::math::erf_inv(f_ro));
}

// -- Q-function sampling -------------------------------------------------------------

QSampler::QSampler(const CVector& psi) : psi_(psi) {
  support_ = 0;
  for (int k = 0; k < psi_.size(); ++k) {
    if (std::norm(psi_(k)) > 1e-16) support_ = k;
  }
  psi_.conservativeResize(support_ + 1);
}

Complex QSampler::operator()(Rng& rng) const {
  std::uniform_int_distribution<int> level(0, support_);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    std::gamma_distribution<double> radial(level(rng) + 1.0, 1.0);
    const double r2 = radial(rng);
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    const Complex beta = std::polar(std::sqrt(r2), theta);
    const Complex beta_conj = std::conj(beta);
    // s = sum_k psi_k beta*^k / sqrt(k!), envelope = sum_k r^2k / k!
    Complex term(1.0, 0.0);
    double env_term = 1.0;
    Complex s = psi_(0);
    double envelope = 1.0;
    for (int k = 1; k <= support_; ++k) {
      term *= beta_conj / std::sqrt(static_cast<double>(k));
      env_term *= r2 / k;
      s += psi_(k) * term;
      envelope += env_term;
    }
    if (unit(rng) * envelope < std::norm(s)) return beta;
  }
}

MixedQSampler::MixedQSampler(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()(k);
    if (w <= 1e-14) continue;
    samplers_.emplace_back(es.eigenvectors().col(k));
    weights_.push_back(w);
  }
}

Complex MixedQSampler::operator()(Rng& rng) const {
  if (samplers_.size() == 1) return samplers_.front()(rng);
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  return samplers_[pick(rng)](rng);
}

// -- record synthesis ----------------------------------------------------------------

namespace {

Complex added_noise(Rng& rng, double n0) {
  if (n0 == 0.0) return {};
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * n0));
  const double re = g(rng);
  return {re, g(rng)};
}

void require_shots(std::size_t shots) {
  if (shots == 0) throw Error(ErrorKind::InvalidArgument, "shots must be >= 1");
}

template <class ShotFn>
void fill_batch(std::vector<HeterodyneRecord>& out, std::size_t shots, std::uint64_t seed, int b,
                ShotFn&& shot) {
  Rng rng = derived_rng(seed, static_cast<std::uint64_t>(b));
  const std::size_t begin = batch_offset(shots, kBatchCount, b);
  const std::size_t end = begin + batch_size(shots, kBatchCount, b);
  for (std::size_t k = begin; k < end; ++k) {
    out[k] = shot(rng);
    out[k].shot = k;
  }
}

}  // namespace

std::vector<HeterodyneRecord> simulate_heterodyne(const DensityMatrix& rho, const NoiseModel& noise,
                                                  std::size_t shots, std::uint64_t seed) {
  require_shots(shots);
  noise.validate();
  const MixedQSampler sampler(rho);
  std::vector<HeterodyneRecord> out(shots);
  auto shot = [&](Rng& rng) {
    const Complex s = sampler(rng) + added_noise(rng, noise.n0);
    return HeterodyneRecord{0, s.real(), s.imag(), 0.0};
  };
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < kBatchCount; ++b) fill_batch(out, shots, seed, b, shot);
  return out;
}

std::vector<HeterodyneRecord> simulate_heterodyne_serial(const DensityMatrix& rho,
                                                         const NoiseModel& noise,
                                                         std::size_t shots, std::uint64_t seed) {
  require_shots(shots);
  noise.validate();
  const MixedQSampler sampler(rho);
  std::vector<HeterodyneRecord> out(shots);
  auto shot = [&](Rng& rng) {
    const Complex s = sampler(rng) + added_noise(rng, noise.n0);
    return HeterodyneRecord{0, s.real(), s.imag(), 0.0};
  };
  for (int b = 0; b < kBatchCount; ++b) fill_batch(out, shots, seed, b, shot);
  return out;
}

std::vector<HeterodyneRecord> simulate_heralded_heterodyne(const DensityMatrix& rho_in,
                                                           const DetectorParams& params,
                                                           const NoiseModel& noise,
                                                           std::size_t shots, std::uint64_t seed) {
  require_shots(shots);
  params.validate();
  noise.validate();
  const ConditionedStates branches = ideal_branches(rho_in, params);
  const double p_even = std::clamp(branches.even.trace().real(), 0.0, 1.0);
  // A branch with zero weight is never drawn, so any valid state will do.
  auto sampler_for = [&](const CMatrix& branch) {
    const double p = branch.trace().real();
    if (p <= 1e-14) return MixedQSampler(DensityMatrix::fock(0, FockSpace(1)));
    return MixedQSampler(DensityMatrix::normalized(branch / p));
  };
  const MixedQSampler even_sampler = sampler_for(branches.even);
  const MixedQSampler odd_sampler = sampler_for(branches.odd);
  const double sigma = QubitReadout{params.f_ro}.sigma();
  const double flip = params.pre_readout_flip();

  std::vector<HeterodyneRecord> out(shots);
  auto shot = [&](Rng& rng) {
    std::bernoulli_distribution is_even(p_even);
    std::bernoulli_distribution flipped(flip);
    std::normal_distribution<double> readout(0.0, 1.0);
    const bool even = is_even(rng);
    const Complex s = (even ? even_sampler(rng) : odd_sampler(rng)) + added_noise(rng, noise.n0);
    const bool excited = even != flipped(rng);
    const double q = (excited ? 1.0 : -1.0) + sigma * readout(rng);
    return HeterodyneRecord{0, s.real(), s.imag(), q};
  };
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < kBatchCount; ++b) fill_batch(out, shots, seed, b, shot);
  return out;
}

// -- moment tables -------------------------------------------------------------------

std::vector<MomentIndex> moment_indices(int order) {
  std::vector<MomentIndex> idx;
  for (int o = 0; o <= order; ++o) {
    for (int n = 0; n <= o; ++n) idx.emplace_back(n, o - n);
  }
  return idx;
}

Complex MomentTable::value(int n, int m) const {
  const auto it = values.find({n, m});
  if (it == values.end()) throw Error(ErrorKind::OrderTooHigh, "moment not in table");
  return it->second;
}

double MomentTable::std_error(int n, int m) const {
  const auto it = std_errors.find({n, m});
  if (it == std_errors.end()) throw Error(ErrorKind::OrderTooHigh, "moment not in table");
  return it->second;
}

void MomentTable::rotate(double theta) {
  auto turn = [theta](std::map<MomentIndex, Complex>& table) {
    for (auto& [key, v] : table) v *= std::polar(1.0, (key.second - key.first) * theta);
  };
  turn(values);
  for (auto& batch : batch_values) turn(batch);
  if (!batch_values.empty()) update_errors();
}

void MomentTable::update_errors() {
  const double b = static_cast<double>(batch_values.size());
  if (b < 2.0) return;
  for (const auto& [key, v] : values) {
    double mean_re = 0.0, mean_im = 0.0;
    for (const auto& batch : batch_values) {
      mean_re += batch.at(key).real();
      mean_im += batch.at(key).imag();
    }
    mean_re /= b;
    mean_im /= b;
    double ss_re = 0.0, ss_im = 0.0;
    for (const auto& batch : batch_values) {
      ss_re += std::pow(batch.at(key).real() - mean_re, 2);
      ss_im += std::pow(batch.at(key).imag() - mean_im, 2);
    }
    const double re = std::sqrt(ss_re / (b * (b - 1.0)));
    const double im = std::sqrt(ss_im / (b * (b - 1.0)));
    re_errors[key] = re;
    im_errors[key] = im;
    std_errors[key] = std::hypot(re, im);
  }
}

MomentTable exact_moment_table(const DensityMatrix& rho, int order) {
  MomentTable t;
  t.order = order;
  for (const auto& [n, m] : moment_indices(order)) {
    t.values[{n, m}] = moment(rho, n, m);
    t.std_errors[{n, m}] = 1.0;
    t.re_errors[{n, m}] = 1.0;
    t.im_errors[{n, m}] = 1.0;
  }
  return t;
}

std::map<MomentIndex, Complex> analytic_noise_moments(const NoiseModel& noise, int order) {
  noise.validate();
  std::map<MomentIndex, Complex> g;
  for (const auto& [n, m] : moment_indices(order)) {
    g[{n, m}] = n == m ? std::tgamma(n + 1.0) * std::pow(1.0 + noise.n0, n) : 0.0;
  }
  return g;
}

namespace {

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

Complex noise_at(const std::map<MomentIndex, Complex>& noise, int n, int m) {
  if (n == 0 && m == 0) return 1.0;
  const auto it = noise.find({n, m});
  if (it == noise.end()) throw Error(ErrorKind::OrderTooHigh, "noise moment missing");
  return it->second;
}

}  // namespace

std::map<MomentIndex, Complex> convolve_moments(const std::map<MomentIndex, Complex>& signal,
                                                const std::map<MomentIndex, Complex>& noise,
                                                int order) {
  std::map<MomentIndex, Complex> raw;
  for (const auto& [n, m] : moment_indices(order)) {
    Complex acc = 0.0;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= m; ++j) {
        acc += binomial(n, i) * binomial(m, j) * signal.at({i, j}) * noise_at(noise, n - i, m - j);
      }
    }
    raw[{n, m}] = acc;
  }
  return raw;
}

std::map<MomentIndex, Complex> deconvolve_moments(const std::map<MomentIndex, Complex>& raw,
                                                  const std::map<MomentIndex, Complex>& noise,
                                                  int order) {
  std::map<MomentIndex, Complex> signal;
  for (const auto& [n, m] : moment_indices(order)) {
    Complex acc = raw.at({n, m});
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= m; ++j) {
        if (i == n && j == m) continue;
        acc -= binomial(n, i) * binomial(m, j) * signal.at({i, j}) * noise_at(noise, n - i, m - j);
      }
    }
    signal[{n, m}] = acc;
  }
  return signal;
}

// -- estimation from records -----------------------------------------------------------

namespace {

void accumulate(const HeterodyneRecord& r, int order, std::vector<Complex>& powers_conj,
                std::vector<Complex>& powers, std::vector<Complex>& sums) {
  const Complex s = r.s();
  powers[0] = powers_conj[0] = 1.0;
  for (int k = 1; k <= order; ++k) {
    powers[k] = powers[k - 1] * s;
    powers_conj[k] = std::conj(powers[k]);
  }
  std::size_t idx = 0;
  for (int o = 0; o <= order; ++o) {
    for (int n = 0; n <= o; ++n, ++idx) sums[idx] += powers_conj[n] * powers[o - n];
  }
}

void sum_batch(std::span<const HeterodyneRecord> records, int order, int b, RawMomentSums& out) {
  const std::size_t begin = batch_offset(records.size(), kBatchCount, b);
  const std::size_t count = batch_size(records.size(), kBatchCount, b);
  std::vector<Complex> pc(order + 1), p(order + 1);
  std::vector<Complex>& sums = out.sums[b];
  sums.assign(moment_indices(order).size(), Complex(0.0));
  for (std::size_t k = begin; k < begin + count; ++k) accumulate(records[k], order, pc, p, sums);
  out.counts[b] = static_cast<double>(count);
}

RawMomentSums empty_sums(int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "moment order must be >= 0");
  RawMomentSums out;
  out.order = order;
  out.sums.resize(kBatchCount);
  out.counts.assign(kBatchCount, 0.0);
  return out;
}

std::map<MomentIndex, Complex> to_map(const std::vector<Complex>& flat, double count, int order) {
  std::map<MomentIndex, Complex> m;
  const auto idx = moment_indices(order);
  for (std::size_t k = 0; k < idx.size(); ++k) m[idx[k]] = flat[k] / count;
  return m;
}

std::vector<Complex> total(const std::vector<std::vector<Complex>>& batches) {
  std::vector<Complex> t(batches.front().size(), Complex(0.0));
  for (const auto& b : batches) {
    for (std::size_t k = 0; k < t.size(); ++k) t[k] += b[k];
  }
  return t;
}

double total(const std::vector<double>& v) {
  double t = 0.0;
  for (double x : v) t += x;
  return t;
}

void require_records(std::size_t n, const char* what) {
  if (n < static_cast<std::size_t>(kBatchCount)) {
    throw Error(ErrorKind::InsufficientStatistics,
                std::string(what) + " needs at least " + std::to_string(kBatchCount) + " records");
  }
}

void check_top_order(const MomentTable& t) {
  for (int n = 0; n <= t.order; ++n) {
    const MomentIndex key{n, t.order - n};
    const double se = t.std_errors.at(key);
    if (se > std::max(std::abs(t.values.at(key)), 1.0)) {
      throw Error(ErrorKind::InsufficientStatistics,
                  "standard error of <a^dag^" + std::to_string(key.first) + " a^" +
                      std::to_string(key.second) + "> exceeds its magnitude");
    }
  }
}

}  // namespace

RawMomentSums raw_moment_sums(std::span<const HeterodyneRecord> records, int order) {
  RawMomentSums out = empty_sums(order);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < kBatchCount; ++b) sum_batch(records, order, b, out);
  return out;
}

RawMomentSums raw_moment_sums_serial(std::span<const HeterodyneRecord> records, int order) {
  RawMomentSums out = empty_sums(order);
  for (int b = 0; b < kBatchCount; ++b) sum_batch(records, order, b, out);
  return out;
}

MomentTable moments_from_records(std::span<const HeterodyneRecord> records,
                                 std::span<const HeterodyneRecord> vacuum, int max_order) {
  if (max_order < 0 || max_order > 7) {
    throw Error(ErrorKind::OrderTooHigh, "max_order must lie in [0, 7]");
  }
  require_records(records.size(), "signal");
  require_records(vacuum.size(), "vacuum reference");
  const RawMomentSums sig = raw_moment_sums(records, max_order);
  const RawMomentSums vac = raw_moment_sums(vacuum, max_order);

  MomentTable t;
  t.order = max_order;
  t.values = deconvolve_moments(to_map(total(sig.sums), total(sig.counts), max_order),
                                to_map(total(vac.sums), total(vac.counts), max_order), max_order);
  for (int b = 0; b < kBatchCount; ++b) {
    t.batch_values.push_back(deconvolve_moments(to_map(sig.sums[b], sig.counts[b], max_order),
                                                to_map(vac.sums[b], vac.counts[b], max_order),
                                                max_order));
  }
  t.update_errors();
  check_top_order(t);
  return t;
}

ConditionedMoments conditioned_moments(std::span<const HeterodyneRecord> records,
                                       std::span<const HeterodyneRecord> vacuum, double threshold,
                                       const ConfusionMatrix& confusion, int max_order) {
  if (max_order < 2 || max_order > 7) {
    throw Error(ErrorKind::OrderTooHigh, "max_order must lie in [2, 7]");
  }
  require_records(records.size(), "signal");
  require_records(vacuum.size(), "vacuum reference");
  const auto inv = confusion.inverse();

  std::vector<HeterodyneRecord> cls[2];
  for (const auto& r : records) cls[r.qubit_q > threshold ? 0 : 1].push_back(r);
  // Batch b of either class covers roughly the same slice of the run.
  require_records(cls[0].size(), "even class");
  require_records(cls[1].size(), "odd class");
  const RawMomentSums obs[2] = {raw_moment_sums(cls[0], max_order),
                                raw_moment_sums(cls[1], max_order)};
  const RawMomentSums vac = raw_moment_sums(vacuum, max_order);

  // Observed class sums are C * (actual class sums); invert per moment.
  auto corrected = [&](const std::vector<Complex>& even, const std::vector<Complex>& odd,
                       double n_even, double n_odd, int actual) {
    const double n = inv[actual][0] * n_even + inv[actual][1] * n_odd;
    if (!(n > 0.0)) {
      throw Error(ErrorKind::InsufficientStatistics, "corrected class weight is not positive");
    }
    std::vector<Complex> s(even.size());
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = inv[actual][0] * even[k] + inv[actual][1] * odd[k];
    return std::pair{to_map(s, n, max_order), n};
  };

  ConditionedMoments out;
  MomentTable* tables[2] = {&out.even, &out.odd};
  const auto g_all = to_map(total(vac.sums), total(vac.counts), max_order);
  double weight[2] = {0.0, 0.0};
  for (int a = 0; a < 2; ++a) {
    auto [raw, n] = corrected(total(obs[0].sums), total(obs[1].sums), total(obs[0].counts),
                              total(obs[1].counts), a);
    weight[a] = n;
    tables[a]->order = max_order;
    tables[a]->values = deconvolve_moments(raw, g_all, max_order);
    for (int b = 0; b < kBatchCount; ++b) {
      auto [raw_b, n_b] = corrected(obs[0].sums[b], obs[1].sums[b], obs[0].counts[b],
                                    obs[1].counts[b], a);
      tables[a]->batch_values.push_back(deconvolve_moments(
          raw_b, to_map(vac.sums[b], vac.counts[b], max_order), max_order));
    }
  }
  out.even_fraction = weight[0] / (weight[0] + weight[1]);

  const Complex pooled =
      out.even_fraction * out.even.value(0, 2) + (1.0 - out.even_fraction) * out.odd.value(0, 2);
  out.phase_correction = std::abs(pooled) > 0.0 ? -0.5 * std::arg(pooled) : 0.0;
  for (MomentTable* t : tables) {
    t->rotate(out.phase_correction);
    check_top_order(*t);
  }
  return out;
}

MleResult mle_from_moments(const MomentTable& table, int n_max, const MleSettings& settings) {
  if (table.order < 4) throw Error(ErrorKind::InvalidArgument, "moment MLE needs table order >= 4");
  const FockSpace space(n_max);
  auto weight_of = [](const std::map<MomentIndex, double>& errors, const MomentIndex& key) {
    const auto it = errors.find(key);
    const double se = it == errors.end() ? 1.0 : it->second;
    return se > 0.0 ? 1.0 / (se * se) : 1.0;
  };
  std::vector<LinearObservation> obs;
  for (const auto& [key, v] : table.values) {
    const auto [n, m] = key;
    if (n > m || (n == 0 && m == 0)) continue;
    const CMatrix op = normal_ordered_operator(n, m, space);
    if (n == m) {
      obs.push_back({op, v.real(), weight_of(table.re_errors, key)});
      continue;
    }
    const CMatrix re = 0.5 * (op + op.adjoint());
    const CMatrix im = Complex(0.0, -0.5) * (op - op.adjoint());
    obs.push_back({re, v.real(), weight_of(table.re_errors, key)});
    obs.push_back({im, v.imag(), weight_of(table.im_errors, key)});
  }
  return solve_mle(obs, space.dim(), settings);
}

G2Estimate g2_from_moments(const MomentTable& table) {
  const double num = table.value(2, 2).real();
  const double den = table.value(1, 1).real();
  if (std::abs(den) <= 1e-12) throw Error(ErrorKind::VacuumState, "g2 undefined for <a^dag a> ~ 0");
  G2Estimate out;
  out.value = num / (den * den);
  const std::size_t b = table.batch_values.size();
  if (b < 2) return out;
  // Linearized batch estimates (delta method) around the full-sample value.
  double mean = 0.0;
  std::vector<double> lin(b);
  for (std::size_t k = 0; k < b; ++k) {
    const double dn = table.batch_values[k].at({2, 2}).real() - num;
    const double dd = table.batch_values[k].at({1, 1}).real() - den;
    lin[k] = dn / (den * den) - 2.0 * num * dd / (den * den * den);
    mean += lin[k] / static_cast<double>(b);
  }
  double ss = 0.0;
  for (double x : lin) ss += (x - mean) * (x - mean);
  out.std_error = std::sqrt(ss / (static_cast<double>(b) * (static_cast<double>(b) - 1.0)));
  return out;
}

}  // namespace paritysim
