#include "paritysim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "paritysim/error.hpp"

namespace paritysim {

FockSpace::FockSpace(int n_max, int pad) : n_max_(n_max), pad_(pad) {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "FockSpace requires n_max >= 1");
  if (pad < 0) throw Error(ErrorKind::InvalidArgument, "FockSpace requires pad >= 0");
}

// -- Ket --------------------------------------------------------------------

Ket::Ket(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) throw Error(ErrorKind::InvalidArgument, "empty ket");
  const double norm_sq = amplitudes_.squaredNorm();
  if (!std::isfinite(norm_sq) || std::abs(norm_sq - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidArgument,
                "ket is not normalized (|psi|^2 = " + std::to_string(norm_sq) + ")");
  }
}

Ket Ket::normalized(CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::InvalidArgument, "cannot normalize a zero vector");
  }
  return Ket(amplitudes / norm);
}

Ket Ket::fock(int n, const FockSpace& space) {
  if (n < 0 || n > space.n_max()) {
    throw Error(ErrorKind::InvalidArgument, "Fock level outside the truncated space");
  }
  CVector v = CVector::Zero(space.dim());
  v(n) = 1.0;
  return Ket(std::move(v));
}

// -- DensityMatrix ------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw Error(ErrorKind::InvalidArgument, "density matrix must be square and non-empty");
  }
  const double herm_err = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (!(herm_err <= kHermitianTol)) {
    throw Error(ErrorKind::InvalidArgument,
                "density matrix not Hermitian (err " + std::to_string(herm_err) + ")");
  }
  const Complex tr = entries_.trace();
  if (!(std::abs(tr - 1.0) <= kTraceTol)) {
    throw Error(ErrorKind::InvalidArgument,
                "density matrix trace " + std::to_string(tr.real()) + " != 1");
  }
  if (min_eigenvalue() < kEigenTol) {
    throw Error(ErrorKind::InvalidArgument, "density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::normalized(CMatrix entries) {
  CMatrix h = 0.5 * (entries + entries.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw Error(ErrorKind::InvalidArgument, "cannot normalize a matrix with non-positive trace");
  }
  return DensityMatrix(h / tr);
}

DensityMatrix DensityMatrix::pure(const Ket& ket) {
  const CVector& v = ket.amplitudes();
  CMatrix rho = v * v.adjoint();
  // Outer products are Hermitian up to rounding; renormalize the trace exactly.
  return normalized(std::move(rho));
}

DensityMatrix DensityMatrix::fock(int n, const FockSpace& space) {
  return pure(Ket::fock(n, space));
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// -- operators ----------------------------------------------------------------

namespace {

CMatrix annihilation_dim(int dim) {
  CMatrix a = CMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

}  // namespace

CMatrix annihilation(const FockSpace& space) { return annihilation_dim(space.dim()); }

CMatrix number_operator(const FockSpace& space) {
  CMatrix n = CMatrix::Zero(space.dim(), space.dim());
  for (int k = 0; k < space.dim(); ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Eigen::VectorXd parity_diagonal(const FockSpace& space) {
  Eigen::VectorXd p(space.dim());
  for (int k = 0; k < space.dim(); ++k) p(k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

CMatrix parity_operator(const FockSpace& space) {
  return parity_diagonal(space).cast<Complex>().asDiagonal();
}

int padding_for(ComplexAmplitude alpha, const FockSpace& space) {
  const int from_amplitude = 4 * static_cast<int>(std::ceil(std::norm(alpha)));
  return std::max({space.pad(), 10, from_amplitude});
}

CMatrix displacement_padded(ComplexAmplitude alpha, const FockSpace& space) {
  const int dim = space.dim() + padding_for(alpha, space);
  if (alpha == ComplexAmplitude{}) return CMatrix::Identity(dim, dim);
  const CMatrix a = annihilation_dim(dim);
  // Generator A = alpha a^dag - conj(alpha) a is anti-Hermitian; H = iA is
  // Hermitian and exp(A) = V exp(-i Lambda) V^dag.
  const CMatrix h = Complex(0.0, 1.0) * (alpha * a.adjoint() - std::conj(alpha) * a);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd& lambda = es.eigenvalues();
  CVector phases(dim);
  for (int k = 0; k < dim; ++k) phases(k) = std::polar(1.0, -lambda(k));
  const CMatrix& v = es.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

CMatrix displacement(ComplexAmplitude alpha, const FockSpace& space) {
  return displacement_padded(alpha, space).topLeftCorner(space.dim(), space.dim());
}

CMatrix resize_square(const CMatrix& m, int dim) {
  CMatrix out = CMatrix::Zero(dim, dim);
  const int keep = std::min<int>(dim, static_cast<int>(m.rows()));
  out.topLeftCorner(keep, keep) = m.topLeftCorner(keep, keep);
  return out;
}

DensityMatrix rotate_phase(const DensityMatrix& rho, double phi) {
  CMatrix out = rho.matrix();
  for (int m = 0; m < rho.dim(); ++m) {
    for (int n = 0; n < rho.dim(); ++n) out(m, n) *= std::polar(1.0, phi * (m - n));
  }
  return DensityMatrix::normalized(std::move(out));
}

// -- states -------------------------------------------------------------------

namespace {

CVector coherent_amplitudes(ComplexAmplitude alpha, int dim) {
  CVector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

}  // namespace

Ket coherent_state(ComplexAmplitude alpha, const FockSpace& space) {
  return Ket::normalized(coherent_amplitudes(alpha, space.dim()));
}

Ket cat_state(ComplexAmplitude alpha, int parity_sign, const FockSpace& space) {
  if (parity_sign != 1 && parity_sign != -1) {
    throw Error(ErrorKind::InvalidArgument, "cat parity sign must be +1 or -1");
  }
  if (parity_sign == -1 && alpha == ComplexAmplitude{}) {
    throw Error(ErrorKind::ZeroOddCat, "odd cat state is undefined at alpha = 0");
  }
  CVector v = coherent_amplitudes(alpha, space.dim());
  // |-alpha> has amplitudes (-1)^n <n|alpha>, so the sum keeps one parity.
  for (int n = 0; n < space.dim(); ++n) {
    const bool keep = (n % 2 == 0) == (parity_sign == 1);
    v(n) = keep ? 2.0 * v(n) : Complex{};
  }
  if (!(v.norm() > 0.0)) throw Error(ErrorKind::ZeroOddCat, "odd cat amplitude underflow");
  return Ket::normalized(std::move(v));
}

DensityMatrix truncate(const DensityMatrix& rho, const FockSpace& space) {
  return DensityMatrix::normalized(resize_square(rho.matrix(), space.dim()));
}

// -- observables ----------------------------------------------------------------

double expectation_parity(const DensityMatrix& rho) {
  double p = 0.0;
  for (int n = 0; n < rho.dim(); ++n) p += ((n % 2 == 0) ? 1.0 : -1.0) * rho(n, n).real();
  return p;
}

CMatrix displaced_parity_observable(ComplexAmplitude alpha, const FockSpace& space) {
  // D(a) P D(a)^dag = D(2a) P, with <m|D(b)|n> from generalized Laguerre
  // polynomials; exact on the truncated block, no padding needed.
  const int dim = space.dim();
  const Complex beta = 2.0 * alpha;
  const double x = std::norm(beta);
  const double log_abs = x > 0.0 ? 0.5 * std::log(x) : 0.0;
  CMatrix o(dim, dim);
  std::vector<double> lag(dim);
  for (int k = 0; k < dim; ++k) {
    // L_j^(k)(x) for j = 0 .. dim-1-k
    const int jmax = dim - 1 - k;
    lag[0] = 1.0;
    if (jmax >= 1) lag[1] = 1.0 + k - x;
    for (int j = 1; j < jmax; ++j) {
      lag[j + 1] = ((2.0 * j + 1.0 + k - x) * lag[j] - (j + k) * lag[j - 1]) / (j + 1.0);
    }
    const Complex up = k == 0 ? Complex(1.0) : std::polar(1.0, k * std::arg(beta));
    const Complex down = k == 0 ? Complex(1.0) : std::polar(1.0, k * std::arg(-std::conj(beta)));
    for (int j = 0; j <= jmax; ++j) {
      // |<j+k|D|j>| = sqrt(j!/(j+k)!) |b|^k e^{-x/2} |L_j^(k)(x)|
      double mag = -0.5 * x + 0.5 * (std::lgamma(j + 1.0) - std::lgamma(j + k + 1.0));
      if (k > 0) mag += (x > 0.0 ? k * log_abs : -std::numeric_limits<double>::infinity());
      const double scale = std::exp(mag) * lag[j];
      const double sign_lo = (j % 2 == 0) ? 1.0 : -1.0;       // parity of column j
      const double sign_hi = ((j + k) % 2 == 0) ? 1.0 : -1.0;  // parity of column j+k
      o(j + k, j) = scale * up * sign_lo;
      if (k > 0) o(j, j + k) = scale * down * sign_hi;
    }
  }
  return o;
}

double wigner_point(const DensityMatrix& rho, ComplexAmplitude alpha) {
  const CMatrix o = displaced_parity_observable(alpha, FockSpace(rho.dim() - 1));
  // Tr(rho O) = sum_mn rho_nm O_mn
  return (rho.matrix().transpose().cwiseProduct(o)).sum().real();
}

CMatrix normal_ordered_operator(int n, int m, const FockSpace& space) {
  if (n < 0 || m < 0) throw Error(ErrorKind::InvalidArgument, "negative moment order");
  const int dim = space.dim();
  CMatrix op = CMatrix::Zero(dim, dim);
  // <j| a^dag^n a^m |i> = sqrt(i!/(i-m)!) sqrt(j!/(i-m)!) with j = i - m + n.
  for (int i = m; i < dim; ++i) {
    const int k = i - m;
    const int j = k + n;
    if (j >= dim) continue;
    const double log_val = 0.5 * (std::lgamma(i + 1.0) - std::lgamma(k + 1.0)) +
                           0.5 * (std::lgamma(j + 1.0) - std::lgamma(k + 1.0));
    op(j, i) = std::exp(log_val);
  }
  return op;
}

Complex moment(const DensityMatrix& rho, int n, int m) {
  const FockSpace space(rho.dim() - 1);
  if (n < 0 || m < 0) throw Error(ErrorKind::InvalidArgument, "negative moment order");
  if (n + m > space.n_max()) {
    throw Error(ErrorKind::OrderTooHigh, "moment order " + std::to_string(n + m) +
                                             " exceeds n_max " + std::to_string(space.n_max()));
  }
  const CMatrix op = normal_ordered_operator(n, m, space);
  return (op * rho.matrix()).trace();
}

double g2(const DensityMatrix& rho) {
  const double n1 = moment(rho, 1, 1).real();
  if (n1 <= 1e-12) throw Error(ErrorKind::VacuumState, "g2 undefined for <a^dag a> ~ 0");
  return moment(rho, 2, 2).real() / (n1 * n1);
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const int dim = std::max(rho.dim(), sigma.dim());
  const CMatrix r = resize_square(rho.matrix(), dim);
  const CMatrix s = resize_square(sigma.matrix(), dim);
  const CMatrix root = psd_sqrt(r);
  const CMatrix inner = root * s * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const int dim = std::max(rho.dim(), sigma.dim());
  const CMatrix diff = resize_square(rho.matrix(), dim) - resize_square(sigma.matrix(), dim);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace paritysim
