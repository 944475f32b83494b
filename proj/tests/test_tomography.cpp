#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "paritysim/tomography.hpp"
#include "support.hpp"

using namespace paritysim;

namespace {

constexpr double kPi = std::numbers::pi;

DensityMatrix superposition(const FockSpace& space, Complex c1 = 1.0) {
  CVector v = CVector::Zero(space.dim());
  v(0) = 1.0;
  v(1) = c1;
  return DensityMatrix::pure(Ket::normalized(v));
}

DensityMatrix truncated_cat(int sign, int n_max) {
  const Ket full = cat_state(1.06, sign, FockSpace(20));
  CVector v = full.amplitudes().head(n_max + 1);
  return DensityMatrix::pure(Ket::normalized(v));
}

}  // namespace

TEST_CASE("constrained least squares on complete observations") {
  const int dim = 3;
  CVector v(dim);
  v << 0.7, Complex(0.1, 0.4), -0.3;
  const CMatrix truth = 0.7 * (v * v.adjoint()) / v.squaredNorm() + 0.3 * CMatrix::Identity(dim, dim) / 3.0;
  std::vector<LinearObservation> obs;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      CMatrix re = CMatrix::Zero(dim, dim);
      re(i, j) = re(j, i) = 1.0;
      obs.push_back({re, (re * truth).trace().real(), 1.0});
      if (i != j) {
        CMatrix im = CMatrix::Zero(dim, dim);
        im(i, j) = Complex(0.0, 1.0);
        im(j, i) = Complex(0.0, -1.0);
        obs.push_back({im, (im * truth).trace().real(), 1.0});
      }
    }
  }
  MleSettings s;
  s.record_history = true;
  const MleResult r = solve_mle(obs, dim, s);
  CHECK(r.converged);
  CHECK((r.rho.matrix() - truth).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(r.kkt_residual <= s.kkt_tolerance);
  REQUIRE(r.history.size() > 1);
  bool monotone = true;
  for (std::size_t k = 1; k < r.history.size(); ++k) monotone = monotone && r.history[k] <= r.history[k - 1];
  CHECK(monotone);

  SUBCASE("iteration cap raises NotConverged with the best iterate") {
    MleSettings tight;
    tight.max_iterations = 1;
    tight.restarts = 1;
    try {
      solve_mle(obs, dim, tight);
      FAIL("expected NotConverged");
    } catch (const NotConverged& e) {
      CHECK(e.kind() == ErrorKind::NotConverged);
      CHECK_NEAR(e.best().rho.matrix().trace().real(), 1.0, 1e-12);
      CHECK_FALSE(e.best().converged);
    }
  }
}

TEST_CASE("noiseless tomogram values") {
  const FockSpace space(10);
  const PhaseGrid grid = PhaseGrid::square(2.0, 9);
  SUBCASE("vacuum at the origin") {
    const Tomogram t = synthesize_tomogram(DensityMatrix::fock(0, space), 0.78, 0.84, grid, std::nullopt, 1);
    CHECK_NEAR(t.values[grid.size() / 2], 1.0, 1e-12);
    CHECK_FALSE(t.shots.has_value());
    CHECK(t.forward_model == std::string(kKrausForwardModel));
  }
  SUBCASE("single photon at the origin") {
    const Tomogram t = synthesize_tomogram(DensityMatrix::fock(1, space), 0.78, 0.84, grid, std::nullopt, 1);
    CHECK_NEAR(t.values[grid.size() / 2], -0.56, 1e-12);
  }
  SUBCASE("superposition against position-space quadrature") {
    const double eta = 0.78;
    const double f_mm = 0.84;
    const Complex c0 = 1.0 / std::sqrt(2.0);
    const Complex c1 = c0;
    Eigen::MatrixXcd lossy(2, 2);
    lossy(0, 0) = std::norm(c0) + (1.0 - eta) * std::norm(c1);
    lossy(1, 1) = eta * std::norm(c1);
    lossy(0, 1) = std::sqrt(eta) * c0 * std::conj(c1);
    lossy(1, 0) = std::conj(lossy(0, 1));
    const Tomogram t = synthesize_tomogram(superposition(space), eta, f_mm, grid, std::nullopt, 1);
    for (std::size_t k = 0; k < grid.size(); k += 3) {
      const ComplexAmplitude a = grid.point(k);
      const double expect =
          std::exp(-(1.0 - f_mm * f_mm) * std::norm(a)) * oracle::wigner_position(lossy, f_mm * a);
      CHECK_NEAR(t.values[k], expect, 1e-6);
    }
    // the coherence tilts the map along I
    const std::size_t left = 2 * 9 + 4;
    const std::size_t right = 6 * 9 + 4;
    CHECK(t.values[right] - t.values[left] > 0.1);
  }
}

TEST_CASE("tomogram sampling") {
  const FockSpace space(10);
  const PhaseGrid grid = PhaseGrid::square(2.0, 11);
  const DensityMatrix rho = DensityMatrix::fock(1, space);
  const Tomogram a = synthesize_tomogram(rho, 0.78, 0.84, grid, 400, 7);
  const Tomogram b = synthesize_tomogram(rho, 0.78, 0.84, grid, 400, 7);
  const Tomogram c = synthesize_tomogram(rho, 0.78, 0.84, grid, 400, 8);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(*a.shots == 400);
  CHECK_NOTHROW(a.validate());
  for (double v : a.values) CHECK(std::abs(v) <= 1.0);
  // each value is an average of +-1 outcomes
  for (double v : a.values) CHECK_NEAR(std::round((v + 1.0) * 200.0), (v + 1.0) * 200.0, 1e-9);

  Tomogram bad = a;
  bad.values.pop_back();
  CHECK(error_kind([&] { bad.validate(); }) == ErrorKind::InvalidArgument);
  Tomogram wild = synthesize_tomogram(rho, 0.78, 0.84, grid, std::nullopt, 1);
  wild.values[0] = 1.01;
  CHECK(error_kind([&] { wild.validate(); }) == ErrorKind::InvalidArgument);
  wild.shots = 100;
  CHECK_NOTHROW(wild.validate());
}

TEST_CASE("reconstruction round trips") {
  const FockSpace space(5);
  const PhaseGrid grid = PhaseGrid::square(2.0, 21);
  std::vector<std::pair<std::string, DensityMatrix>> cases = {
      {"vacuum", DensityMatrix::fock(0, space)},
      {"one photon", DensityMatrix::fock(1, space)},
      {"three photons", DensityMatrix::fock(3, space)},
      {"plus", superposition(space)},
      {"minus i", superposition(space, Complex(0.0, -1.0))},
      {"even cat", truncated_cat(+1, 5)},
      {"odd cat", truncated_cat(-1, 5)},
  };
  for (const auto& [name, truth] : cases) {
    INFO(name);
    const Tomogram t = synthesize_tomogram(truth, 0.78, 0.84, grid, std::nullopt, 1);
    const TomographyReconstruction r = mle_reconstruct(t, 5);
    CHECK(r.mle.converged);
    CHECK(fidelity(r.mle.rho, truth) >= 0.999);
    CHECK(r.forward_model == std::string(kKrausForwardModel));
    if (name == "vacuum") CHECK(trace_distance(r.mle.rho, truth) <= 1e-3);
  }
}

TEST_CASE("reconstruction from sampled data") {
  const FockSpace space(5);
  const PhaseGrid grid = PhaseGrid::square(2.0, 21);
  const DensityMatrix truth = DensityMatrix::fock(1, space);
  const Tomogram t = synthesize_tomogram(truth, 0.78, 0.84, grid, 5000, 3);
  const TomographyReconstruction r = mle_reconstruct(t, 5);
  CHECK(fidelity(r.mle.rho, truth) >= 0.95);
}

TEST_CASE("reconstruction needs enough grid points") {
  const PhaseGrid grid = PhaseGrid::square(2.0, 5);
  const Tomogram t = synthesize_tomogram(DensityMatrix::fock(0, FockSpace(5)), 0.78, 0.84, grid, std::nullopt, 1);
  CHECK(error_kind([&] { mle_reconstruct(t, 5); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("global phase estimate") {
  for (double phi : {0.0, 0.3, -1.2, kPi / 2.0 - 1e-3}) {
    std::vector<Complex> z;
    for (double r : {0.1, -0.4, 0.25, 0.5}) z.push_back(std::polar(r, phi));
    CHECK_NEAR(global_phase_minimizing_imaginary(z), phi, 1e-10);
  }
  const std::vector<Complex> flipped = {std::polar(0.3, 0.2 + kPi)};
  CHECK_NEAR(global_phase_minimizing_imaginary(flipped), 0.2, 1e-10);
}

TEST_CASE("source states") {
  const FockSpace space(5);
  CHECK_NEAR(std::abs(gamma_state(kPi / 2.0, space)[1]), 1.0 / std::sqrt(2.0), 1e-15);
  SourceScenario s;
  s.theta = kPi;
  s.two_photon_contamination = 0.05;
  CHECK_NEAR(s.contamination_at_theta(), 0.0125, 1e-15);
  const DensityMatrix rho = source_state(s, space);
  CHECK_NEAR(rho(2, 2).real(), 0.0125, 1e-15);
  CHECK_NEAR(rho(0, 0).real() + rho(1, 1).real(), 0.9875, 1e-12);
  s.two_photon_contamination = 0.2;
  CHECK(error_kind([&] { s.validate(); }) == ErrorKind::InvalidArgument);
  s.two_photon_contamination = 0.0;
  CHECK(error_kind([&] { source_state(s, FockSpace(1)); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("preparation-angle sweep, noiseless") {
  ThetaSweepSettings s;
  s.grid = PhaseGrid::square(2.0, 21);
  s.shots = std::nullopt;
  const std::vector<double> thetas = {0.0, kPi / 2.0, kPi};
  const ThetaSweepResult r = theta_sweep_entries(thetas, s);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0].rho11 < 1e-3);
  CHECK(std::abs(r.entries[0].re_rho01) < 1e-3);
  CHECK_NEAR(r.entries[1].re_rho01, 0.5, 2e-3);
  CHECK(std::abs(r.entries[1].im_rho01) < 1e-3);
  CHECK_NEAR(r.entries[2].rho11, 1.0, 1e-3);
  for (const auto& e : r.entries) CHECK(e.fidelity >= 0.999);
  CHECK(std::abs(r.phase_correction) < 1e-3);
}
