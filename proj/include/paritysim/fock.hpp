#pragma once

// States, operators and observables on a truncated Fock space.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace paritysim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Phase-space point alpha = I + iQ in photon-number units (|alpha|^2 is the
/// mean photon number of the coherent state |alpha>).
using ComplexAmplitude = std::complex<double>;

/// Truncated single-mode Fock space {|0>, ..., |n_max>}.
///
/// `pad` extra levels are used internally when exponentiating the
/// displacement generator so that truncation effects stay away from the
/// levels that are kept.
class FockSpace {
public:
  explicit FockSpace(int n_max, int pad = 10);

  int n_max() const noexcept { return n_max_; }
  int pad() const noexcept { return pad_; }
  int dim() const noexcept { return n_max_ + 1; }

  bool operator==(const FockSpace&) const = default;

private:
  int n_max_;
  int pad_;
};

/// Normalized state vector.
class Ket {
public:
  /// Throws InvalidArgument unless |amplitudes| = 1 within 1e-10.
  explicit Ket(CVector amplitudes);

  /// Normalizes first; throws InvalidArgument on a zero vector.
  static Ket normalized(CVector amplitudes);
  static Ket fock(int n, const FockSpace& space);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }
  Complex operator[](int n) const { return amplitudes_(n); }

private:
  CVector amplitudes_;
};

/// Trace-one Hermitian positive semidefinite matrix.
class DensityMatrix {
public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenTol = -1e-9;

  /// Validates all invariants; throws InvalidArgument on violation.
  explicit DensityMatrix(CMatrix entries);

  /// Hermitizes and rescales to unit trace, then validates positivity.
  static DensityMatrix normalized(CMatrix entries);
  static DensityMatrix pure(const Ket& ket);
  static DensityMatrix fock(int n, const FockSpace& space);

  const CMatrix& matrix() const noexcept { return entries_; }
  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  Complex operator()(int row, int col) const { return entries_(row, col); }

  double min_eigenvalue() const;

private:
  CMatrix entries_;
};

// -- operators ------------------------------------------------------------

CMatrix annihilation(const FockSpace& space);
CMatrix number_operator(const FockSpace& space);
/// Diagonal (-1)^n.
Eigen::VectorXd parity_diagonal(const FockSpace& space);
CMatrix parity_operator(const FockSpace& space);

/// exp(alpha a^dag - conj(alpha) a), computed on a padded space of
/// n_max + 1 + padding_for(alpha) levels and truncated to dim x dim.
CMatrix displacement(ComplexAmplitude alpha, const FockSpace& space);

/// Same operator on the padded space itself (not truncated).
CMatrix displacement_padded(ComplexAmplitude alpha, const FockSpace& space);

/// Padding actually used for alpha: max(space.pad(), 10, 4*ceil(|alpha|^2)).
int padding_for(ComplexAmplitude alpha, const FockSpace& space);

/// Embed (zero-fill) or truncate a square matrix to `dim`.
CMatrix resize_square(const CMatrix& m, int dim);

/// Phase rotation exp(i phi n) applied as U rho U^dag.
DensityMatrix rotate_phase(const DensityMatrix& rho, double phi);

// -- states ---------------------------------------------------------------

Ket coherent_state(ComplexAmplitude alpha, const FockSpace& space);

/// (|alpha> + sign |-alpha>) / N with sign = +1 (even) or -1 (odd).
/// Throws ZeroOddCat for alpha = 0 with sign = -1.
Ket cat_state(ComplexAmplitude alpha, int parity_sign, const FockSpace& space);

/// Truncate (or zero-pad) a state to `space` and renormalize.
DensityMatrix truncate(const DensityMatrix& rho, const FockSpace& space);

// -- observables ----------------------------------------------------------

double expectation_parity(const DensityMatrix& rho);

/// Displaced parity Tr(P D(-alpha) rho D(-alpha)^dag) = (pi/2) W(alpha).
///
/// Sign convention: the state is displaced by -alpha, so a coherent state
/// |beta> evaluates to exp(-2|beta - alpha|^2), peaking at alpha = beta.
/// The displacement is computed on the padded space and the parity trace is
/// taken there, so only rho itself is truncated.
double wigner_point(const DensityMatrix& rho, ComplexAmplitude alpha);

/// Displaced-parity observable D(-alpha)^dag P D(-alpha) restricted to the
/// first `dim` levels: wigner_point(rho, alpha) == Re Tr(O rho).
CMatrix displaced_parity_observable(ComplexAmplitude alpha, const FockSpace& space);

/// (a^dag)^n a^m restricted to `space`, computed on a padded space so that
/// the result is exact for states supported inside `space`.
CMatrix normal_ordered_operator(int n, int m, const FockSpace& space);

/// Tr((a^dag)^n a^m rho). Throws OrderTooHigh when n + m > n_max.
Complex moment(const DensityMatrix& rho, int n, int m);

/// <a^dag^2 a^2> / <a^dag a>^2. Throws VacuumState when <a^dag a> <= 1e-12.
double g2(const DensityMatrix& rho);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2. States of
/// different dimension are compared after zero-padding the smaller one.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// 0.5 * sum |eigenvalues(rho - sigma)|.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Matrix square root of a Hermitian PSD matrix (negative eigenvalues clipped).
CMatrix psd_sqrt(const CMatrix& m);

}  // namespace paritysim
