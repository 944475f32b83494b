#include "paritysim/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "paritysim/error.hpp"
#include "paritysim/kernels.hpp"

namespace paritysim {

namespace {

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(ErrorKind::BadEfficiency, "eta = " + std::to_string(eta) + " outside (0, 1]");
  }
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// sqrt(C(n,k) eta^(n-k) (1-eta)^k); pow(0, 0) == 1 keeps eta = 1 exact.
double kraus_amplitude(int n, int k, double eta) {
  return std::sqrt(std::exp(log_binomial(n, k)) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

LossChannel::LossChannel(double eta) : eta_(eta) { check_efficiency(eta); }

std::vector<CMatrix> LossChannel::kraus_operators(const FockSpace& space) const {
  const int dim = space.dim();
  std::vector<CMatrix> ops;
  ops.reserve(dim);
  for (int k = 0; k < dim; ++k) {
    CMatrix op = CMatrix::Zero(dim, dim);
    for (int n = k; n < dim; ++n) op(n - k, n) = kraus_amplitude(n, k, eta_);
    ops.push_back(std::move(op));
  }
  return ops;
}

DensityMatrix LossChannel::apply(const DensityMatrix& rho) const {
  const int dim = rho.dim();
  CMatrix out = CMatrix::Zero(dim, dim);
  // rho'_{mn} = sum_k A(m+k,k) A(n+k,k) rho_{m+k,n+k}
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      Complex acc{};
      for (int k = 0; m + k < dim && n + k < dim; ++k) {
        acc += kraus_amplitude(m + k, k, eta_) * kraus_amplitude(n + k, k, eta_) * rho(m + k, n + k);
      }
      out(m, n) = acc;
    }
  }
  // The Kraus set is complete on the truncated space, so no renormalization.
  return DensityMatrix(0.5 * (out + out.adjoint()));
}

CMatrix LossChannel::adjoint_apply(const CMatrix& observable) const {
  const int dim = static_cast<int>(observable.rows());
  CMatrix out = CMatrix::Zero(dim, dim);
  // (sum_k K^dag X K)_{ij} = sum_k A(i,k) A(j,k) X_{i-k, j-k}
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Complex acc{};
      for (int k = 0; k <= std::min(i, j); ++k) {
        acc += kraus_amplitude(i, k, eta_) * kraus_amplitude(j, k, eta_) * observable(i - k, j - k);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) { return LossChannel(eta).apply(rho); }

// -- mode mismatch ---------------------------------------------------------------

ModeMismatch::ModeMismatch(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mode mismatch epsilon must lie in [0, 1)");
  }
  overlap_ = std::sqrt(1.0 - epsilon * epsilon);
}

ModeMismatch ModeMismatch::from_overlap(double f_mm) {
  if (!(f_mm > 0.0 && f_mm <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mode matching overlap must lie in (0, 1]");
  }
  return ModeMismatch(std::sqrt(std::max(0.0, 1.0 - f_mm * f_mm)));
}

double ModeMismatch::attenuation(ComplexAmplitude alpha) const {
  return std::exp(-epsilon_ * epsilon_ * std::norm(alpha) / (2.0 * kSigmaVacSq));
}

double mode_mismatch_wigner(const std::function<double(ComplexAmplitude)>& w_prime,
                            const ModeMismatch& mm, ComplexAmplitude alpha) {
  return mm.attenuation(alpha) * w_prime(mm.scaled(alpha));
}

// -- convolution form of the lossy Wigner function -------------------------------------------------------------

double convolution_kernel_mass(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::BadEfficiency, "eta outside (0, 1]");
  return 1.0 / (2.0 * eta);
}

double convolution_kernel_tail_mass(const PhaseGrid& grid, double eta, ComplexAmplitude alpha) {
  // exp(-2 eta |z|^2 / (1 - eta)) is a Gaussian with per-axis variance (1-eta)/(4 eta).
  const double s = std::sqrt((1.0 - eta) / (4.0 * eta));
  const ComplexAmplitude c = alpha / eta;
  const double in_i = normal_cdf((grid.i_max - c.real()) / s) - normal_cdf((grid.i_min - c.real()) / s);
  const double in_q = normal_cdf((grid.q_max - c.imag()) / s) - normal_cdf((grid.q_min - c.imag()) / s);
  return std::max(0.0, 1.0 - in_i * in_q);
}

double measured_wigner_convolution(const GridFunction& w, double eta, ComplexAmplitude alpha) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(ErrorKind::BadEfficiency, "convolution model needs 0 < eta < 1");
  }
  w.grid.validate();
  if (w.values.size() != w.grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "grid function size does not match its grid");
  }
  const double tail = convolution_kernel_tail_mass(w.grid, eta, alpha);
  if (tail > 1e-4) {
    throw Error(ErrorKind::GridTooSmall,
                "kernel mass outside grid " + std::to_string(tail) + " exceeds 1e-4");
  }
  const double coef = 2.0 * eta / (1.0 - eta);
  const ComplexAmplitude c = alpha / eta;
  double sum = 0.0;
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    const double r2 = std::norm(w.grid.point(k) - c);
    sum += w.grid.trapezoid_weight(k) * std::exp(-coef * r2) * w.values[k];
  }
  return sum / (std::numbers::pi * (1.0 - eta));
}

ForwardModelComparison compare_forward_models(const DensityMatrix& rho, double eta,
                                              const PhaseGrid& grid) {
  grid.validate();
  ForwardModelComparison out;
  const std::vector<ComplexAmplitude> points = grid.points();
  const DensityMatrix lossy = apply_loss(rho, eta);
  out.kraus = wigner_map(lossy, points);

  const std::vector<double> ideal_on_grid = wigner_map(rho, points);
  const double ideal_integral = GridFunction{grid, ideal_on_grid}.integrate();
  out.kraus_normalization = GridFunction{grid, out.kraus}.integrate() / ideal_integral;

  if (eta >= 1.0) {
    // The convolution kernel degenerates to a (half-weight) delta.
    out.convolution = ideal_on_grid;
    for (double& v : out.convolution) v *= convolution_kernel_mass(1.0);
  } else {
    const double s = std::sqrt((1.0 - eta) / (4.0 * eta));
    const double margin = 6.0 * s;
    auto extend = [&](double lo, double hi, double step, double& new_lo, int& count) {
      const double want_lo = std::min(lo, lo / eta) - margin;
      const double want_hi = std::max(hi, hi / eta) + margin;
      const int below = static_cast<int>(std::ceil((lo - want_lo) / step));
      const int above = static_cast<int>(std::ceil((want_hi - hi) / step));
      new_lo = lo - below * step;
      count = static_cast<int>(std::lround((hi - lo) / step)) + 1 + below + above;
    };
    PhaseGrid ext;
    extend(grid.i_min, grid.i_max, grid.di(), ext.i_min, ext.ni);
    extend(grid.q_min, grid.q_max, grid.dq(), ext.q_min, ext.nq);
    ext.i_max = ext.i_min + (ext.ni - 1) * grid.di();
    ext.q_max = ext.q_min + (ext.nq - 1) * grid.dq();
    const std::vector<ComplexAmplitude> ext_points = ext.points();
    const GridFunction w{ext, wigner_map(rho, ext_points)};
    out.convolution = convolution_map(w, eta, points);
  }
  out.convolution_normalization = GridFunction{grid, out.convolution}.integrate() / ideal_integral;
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.max_abs_difference = std::max(out.max_abs_difference, std::abs(out.convolution[k] - out.kraus[k]));
  }
  return out;
}

}  // namespace paritysim
