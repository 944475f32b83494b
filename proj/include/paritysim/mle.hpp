#pragma once

// Maximum-likelihood (weighted least-squares) density-matrix reconstruction
// from linear observables, with rho = G^dag G / Tr(G^dag G) over a complex
// lower-triangular factor G. Positivity and unit trace hold at every iterate.

#include <cstdint>
#include <string>
#include <vector>

#include "paritysim/error.hpp"
#include "paritysim/fock.hpp"

namespace paritysim {

/// One real measurement modelled as Tr(observable * rho).
struct LinearObservation {
  CMatrix observable;  ///< Hermitian, dim x dim
  double target = 0.0;
  double weight = 1.0;
};

struct MleSettings {
  int max_iterations = 100000;
  double relative_tolerance = 1e-10;
  int restarts = 5;
  std::uint64_t seed = 20190101;
  double kkt_tolerance = 1e-6;
  bool record_history = false;
};

struct MleResult {
  DensityMatrix rho;
  double objective = 0.0;     ///< weighted mean squared residual
  double kkt_residual = 0.0;
  int iterations = 0;         ///< of the best restart
  bool converged = false;
  std::vector<double> history;  ///< accepted objective values (best restart, if recorded)
};

/// Thrown when the iteration cap is hit with a KKT residual above tolerance.
class NotConverged : public Error {
public:
  explicit NotConverged(MleResult best)
      : Error(ErrorKind::NotConverged,
              "MLE did not converge (KKT residual " + std::to_string(best.kkt_residual) + ")"),
        best_(std::move(best)) {}

  const MleResult& best() const noexcept { return best_; }

private:
  MleResult best_;
};

/// Quadratic model f(x) = (x^T H x - 2 b^T x + c) / sum(w) over the real
/// coordinates x of a Hermitian matrix.
class QuadraticObjective {
public:
  QuadraticObjective(const std::vector<LinearObservation>& observations, int dim);

  int dim() const noexcept { return dim_; }
  double value(const CMatrix& rho) const;
  /// Hermitian Gamma with df = Tr(Gamma drho).
  CMatrix gradient(const CMatrix& rho) const;

  /// max(||rho Z||_F, -lambda_min(Z)) with Z = Gamma - Tr(Gamma rho) I.
  double kkt_residual(const CMatrix& rho) const;

private:
  Eigen::VectorXd coordinates(const CMatrix& rho) const;

  int dim_;
  Eigen::MatrixXd hessian_;
  Eigen::VectorXd linear_;
  double constant_ = 0.0;
  double total_weight_ = 0.0;
};

/// Throws NotConverged (carrying the best iterate) on failure.
MleResult solve_mle(const std::vector<LinearObservation>& observations, int dim,
                    const MleSettings& settings = {});

}  // namespace paritysim
