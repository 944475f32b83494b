#include "paritysim/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "paritysim/rng.hpp"

namespace paritysim {

namespace {

int pair_count(int dim) { return dim * (dim - 1) / 2; }

// Real coefficients a with Tr(O rho) = a . x(rho).
Eigen::VectorXd observable_coefficients(const CMatrix& o, int dim) {
  const int pairs = pair_count(dim);
  Eigen::VectorXd a(dim * dim);
  for (int i = 0; i < dim; ++i) a(i) = o(i, i).real();
  int p = 0;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j, ++p) {
      a(dim + p) = 2.0 * o(j, i).real();
      a(dim + pairs + p) = -2.0 * o(j, i).imag();
    }
  }
  return a;
}

}  // namespace

QuadraticObjective::QuadraticObjective(const std::vector<LinearObservation>& observations, int dim)
    : dim_(dim),
      hessian_(Eigen::MatrixXd::Zero(dim * dim, dim * dim)),
      linear_(Eigen::VectorXd::Zero(dim * dim)) {
  if (observations.empty()) throw Error(ErrorKind::InvalidArgument, "MLE needs observations");
  for (const auto& obs : observations) {
    if (obs.observable.rows() != dim || obs.observable.cols() != dim) {
      throw Error(ErrorKind::InvalidArgument, "observable dimension mismatch");
    }
    if (!(obs.weight > 0.0) || !std::isfinite(obs.weight) || !std::isfinite(obs.target)) {
      throw Error(ErrorKind::InvalidArgument, "observation weight/target must be finite, weight > 0");
    }
    const Eigen::VectorXd a = observable_coefficients(obs.observable, dim);
    hessian_.selfadjointView<Eigen::Lower>().rankUpdate(a, obs.weight);
    linear_ += obs.weight * obs.target * a;
    constant_ += obs.weight * obs.target * obs.target;
    total_weight_ += obs.weight;
  }
  hessian_ = hessian_.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd QuadraticObjective::coordinates(const CMatrix& rho) const {
  const int pairs = pair_count(dim_);
  Eigen::VectorXd x(dim_ * dim_);
  for (int i = 0; i < dim_; ++i) x(i) = rho(i, i).real();
  int p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j, ++p) {
      x(dim_ + p) = rho(i, j).real();
      x(dim_ + pairs + p) = rho(i, j).imag();
    }
  }
  return x;
}

double QuadraticObjective::value(const CMatrix& rho) const {
  const Eigen::VectorXd x = coordinates(rho);
  const double f = x.dot(hessian_ * x) - 2.0 * linear_.dot(x) + constant_;
  return std::max(f, 0.0) / total_weight_;
}

CMatrix QuadraticObjective::gradient(const CMatrix& rho) const {
  const Eigen::VectorXd x = coordinates(rho);
  const Eigen::VectorXd g = 2.0 * (hessian_ * x - linear_) / total_weight_;
  const int pairs = pair_count(dim_);
  CMatrix gamma = CMatrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i) gamma(i, i) = g(i);
  int p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j, ++p) {
      gamma(j, i) = Complex(0.5 * g(dim_ + p), -0.5 * g(dim_ + pairs + p));
      gamma(i, j) = std::conj(gamma(j, i));
    }
  }
  return gamma;
}

double QuadraticObjective::kkt_residual(const CMatrix& rho) const {
  const CMatrix gamma = gradient(rho);
  const double mu = (gamma * rho).trace().real();
  const CMatrix z = gamma - mu * CMatrix::Identity(dim_, dim_);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (z + z.adjoint()), Eigen::EigenvaluesOnly);
  const double dual_infeasibility = std::max(0.0, -es.eigenvalues().minCoeff());
  return std::max((rho * z).norm(), dual_infeasibility);
}

namespace {

struct RestartOutcome {
  CMatrix rho;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

CMatrix lower_mask(const CMatrix& m) { return m.triangularView<Eigen::Lower>(); }

CMatrix rho_of(const CMatrix& g) {
  const CMatrix r = g.adjoint() * g;
  return r / r.trace().real();
}

double real_inner(const CMatrix& a, const CMatrix& b) {
  return (a.array().conjugate() * b.array()).real().sum();
}

RestartOutcome descend(const QuadraticObjective& objective, CMatrix g, const MleSettings& settings) {
  const int dim = objective.dim();
  RestartOutcome out;
  g /= g.norm();
  CMatrix rho = rho_of(g);
  double f = objective.value(rho);
  auto gradient_of = [&](const CMatrix& factor, const CMatrix& r) {
    const CMatrix gamma = objective.gradient(r);
    const double mu = (gamma * r).trace().real();
    const double t = (factor.adjoint() * factor).trace().real();
    return lower_mask(2.0 * factor * (gamma - mu * CMatrix::Identity(dim, dim)) / t);
  };
  CMatrix grad = gradient_of(g, rho);
  double step = 1.0;
  if (settings.record_history) out.history.push_back(f);

  int it = 0;
  for (; it < settings.max_iterations; ++it) {
    const double grad_sq = grad.squaredNorm();
    if (grad_sq == 0.0 || f <= 1e-30) break;
    double trial_f = f;
    CMatrix trial_g;
    CMatrix trial_rho;
    bool accepted = false;
    double s = step;
    for (int halving = 0; halving < 80; ++halving, s *= 0.5) {
      trial_g = g - s * grad;
      trial_g /= trial_g.norm();
      trial_rho = rho_of(trial_g);
      trial_f = objective.value(trial_rho);
      if (trial_f <= f - 1e-4 * s * grad_sq) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const CMatrix trial_grad = gradient_of(trial_g, trial_rho);
    // Barzilai-Borwein guess for the next trial step; backtracking keeps descent monotone.
    const CMatrix dg = trial_g - g;
    const double curvature = real_inner(dg, trial_grad - grad);
    step = curvature > 0.0 ? std::clamp(dg.squaredNorm() / curvature, 1e-12, 1e12)
                           : std::min(2.0 * s, 1e12);

    const double decrease = f - trial_f;
    g = trial_g;
    rho = trial_rho;
    grad = trial_grad;
    const double previous = f;
    f = trial_f;
    if (settings.record_history) out.history.push_back(f);

    if (decrease <= settings.relative_tolerance * previous) {
      if (objective.kkt_residual(rho) <= settings.kkt_tolerance) break;
    } else if (it % 200 == 199 && objective.kkt_residual(rho) <= 1e-3 * settings.kkt_tolerance) {
      break;
    }
  }
  out.rho = rho;
  out.objective = f;
  out.iterations = it;
  return out;
}

}  // namespace

MleResult solve_mle(const std::vector<LinearObservation>& observations, int dim,
                    const MleSettings& settings) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "MLE dimension must be positive");
  const QuadraticObjective objective(observations, dim);
  Rng rng = derived_rng(settings.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);

  RestartOutcome best;
  best.objective = std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, settings.restarts);
  for (int r = 0; r < restarts; ++r) {
    CMatrix g0 = CMatrix::Identity(dim, dim);
    if (r > 0) {
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) g0(i, j) = Complex(normal(rng), normal(rng));
      }
    }
    RestartOutcome outcome = descend(objective, g0, settings);
    if (outcome.objective < best.objective) best = std::move(outcome);
  }

  DensityMatrix rho = DensityMatrix::normalized(best.rho);
  const double kkt = objective.kkt_residual(rho.matrix());
  MleResult result{std::move(rho), best.objective, kkt, best.iterations,
                   kkt <= settings.kkt_tolerance, std::move(best.history)};
  if (!result.converged) throw NotConverged(std::move(result));
  return result;
}

}  // namespace paritysim
