#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "paritysim/channels.hpp"
#include "paritysim/error.hpp"
#include "paritysim/kernels.hpp"
#include "support.hpp"

using namespace paritysim;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix test_state(const FockSpace& space) {
  CVector v = CVector::Zero(space.dim());
  v(0) = 0.6;
  v(1) = Complex(0.2, 0.5);
  v(2) = -0.4;
  v(4) = Complex(0.0, 0.3);
  const DensityMatrix pure = DensityMatrix::pure(Ket::normalized(v));
  return DensityMatrix(0.8 * pure.matrix() + 0.2 * DensityMatrix::fock(3, space).matrix());
}

}  // namespace

TEST_CASE("loss Kraus operators are complete") {
  const FockSpace space(12);
  for (double eta : {0.2, 0.78, 1.0}) {
    CMatrix sum = CMatrix::Zero(13, 13);
    for (const auto& k : LossChannel(eta).kraus_operators(space)) sum += k.adjoint() * k;
    CHECK(max_abs(sum - CMatrix::Identity(13, 13)) < 1e-10);
  }
}

TEST_CASE("loss channel examples") {
  const FockSpace space(20);
  SUBCASE("unit transmission is the identity") {
    const DensityMatrix rho = test_state(space);
    CHECK(max_abs(apply_loss(rho, 1.0).matrix() - rho.matrix()) < 1e-14);
  }
  SUBCASE("single photon") {
    const DensityMatrix out = apply_loss(DensityMatrix::fock(1, space), 0.78);
    CHECK_NEAR(out(0, 0).real(), 0.22, 1e-14);
    CHECK_NEAR(out(1, 1).real(), 0.78, 1e-14);
    CHECK(max_abs(out.matrix().bottomRightCorner(19, 19)) < 1e-15);
  }
  SUBCASE("coherent states stay coherent") {
    const ComplexAmplitude alpha(1.1, -0.6);
    const double eta = 0.6;
    const DensityMatrix out = apply_loss(DensityMatrix::pure(coherent_state(alpha, space)), eta);
    const DensityMatrix expect = DensityMatrix::pure(coherent_state(std::sqrt(eta) * alpha, space));
    CHECK(max_abs(out.matrix() - expect.matrix()) < 1e-8);
  }
  SUBCASE("efficiency outside (0, 1]") {
    for (double eta : {0.0, -0.1, 1.2}) {
      try {
        apply_loss(DensityMatrix::fock(1, space), eta);
        FAIL("expected BadEfficiency");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BadEfficiency);
      }
    }
  }
}

TEST_CASE("loss channel invariants") {
  const FockSpace space(16);
  const DensityMatrix rho = test_state(space);
  CHECK_NEAR(apply_loss(rho, 0.37).matrix().trace().real(), 1.0, 1e-10);

  const CMatrix twice = apply_loss(apply_loss(rho, 0.9), 0.7).matrix();
  CHECK(max_abs(twice - apply_loss(rho, 0.63).matrix()) < 1e-9);

  for (double eta : {0.1, 0.5, 0.78, 0.95}) {
    CHECK_NEAR(expectation_parity(apply_loss(DensityMatrix::fock(1, space), eta)), 1.0 - 2.0 * eta, 1e-14);
  }

  // <X, L(rho)> = <L^dag(X), rho>
  const LossChannel loss(0.65);
  const CMatrix x = displaced_parity_observable(Complex(0.3, -0.2), space);
  const Complex lhs = (x * loss.apply(rho).matrix()).trace();
  const Complex rhs = (loss.adjoint_apply(x) * rho.matrix()).trace();
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("convolution model: vacuum gives a Gaussian") {
  const FockSpace space(10);
  const PhaseGrid grid = PhaseGrid::square(4.0, 81);
  const GridFunction w{grid, wigner_map(DensityMatrix::fock(0, space), grid.points())};
  for (double eta : {0.5, 0.78, 0.9}) {
    for (const ComplexAmplitude alpha : {ComplexAmplitude(0.0), ComplexAmplitude(0.4, -0.3),
                                         ComplexAmplitude(1.0, 0.5)}) {
      const double expect = 0.5 * std::exp(-2.0 * std::norm(alpha) / eta);
      CHECK_NEAR(measured_wigner_convolution(w, eta, alpha), expect, 1e-6);
    }
  }
}

TEST_CASE("convolution model: near-unit efficiency approaches W times the kernel mass") {
  const PhaseGrid grid = PhaseGrid::square(0.6, 241);
  std::vector<double> values;
  auto smooth = [](ComplexAmplitude a) { return std::exp(-2.0 * std::norm(a - Complex(0.1, 0.0))); };
  for (const auto& a : grid.points()) values.push_back(smooth(a));
  const GridFunction w{grid, values};
  const double eta = 0.999;
  for (const ComplexAmplitude alpha : {ComplexAmplitude(0.0), ComplexAmplitude(0.2, 0.1)}) {
    const double ratio = measured_wigner_convolution(w, eta, alpha) / convolution_kernel_mass(eta);
    CHECK(std::abs(ratio / smooth(alpha) - 1.0) < 0.01);
  }
  CHECK_NEAR(convolution_kernel_mass(0.999), 1.0 / 1.998, 1e-15);
}

TEST_CASE("convolution model: single photon against brute-force quadrature") {
  const FockSpace space(10);
  const PhaseGrid grid = PhaseGrid::square(4.0, 81);
  const GridFunction w{grid, wigner_map(DensityMatrix::fock(1, space), grid.points())};
  const double eta = 0.78;
  const double s = std::sqrt((1.0 - eta) / (4.0 * eta));
  for (const ComplexAmplitude alpha : {ComplexAmplitude(0.0), ComplexAmplitude(0.5, 0.0),
                                       ComplexAmplitude(-0.4, 0.9), ComplexAmplitude(1.2, 0.3)}) {
    const double expect = oracle::convolution_bruteforce(oracle::wigner_one_photon, eta, alpha, 8.0 * s, 400);
    CHECK_NEAR(measured_wigner_convolution(w, eta, alpha), expect, 1e-3);
  }
  // closed form at the origin: (1 - eta) - 1/2
  CHECK_NEAR(measured_wigner_convolution(w, eta, 0.0), -0.28, 1e-6);
}

TEST_CASE("convolution model guards") {
  const PhaseGrid grid = PhaseGrid::square(1.0, 21);
  const GridFunction w{grid, std::vector<double>(grid.size(), 1.0)};
  try {
    measured_wigner_convolution(w, 0.78, Complex(0.9, 0.0));
    FAIL("expected GridTooSmall");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooSmall);
  }
  for (double eta : {0.0, 1.0}) {
    try {
      measured_wigner_convolution(w, eta, 0.0);
      FAIL("expected BadEfficiency");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BadEfficiency);
    }
  }
  CHECK(convolution_kernel_tail_mass(PhaseGrid::square(4.0, 81), 0.78, 0.0) < 1e-12);
}

TEST_CASE("mode mismatch") {
  auto w_prime = [](ComplexAmplitude a) { return std::exp(-std::norm(a - Complex(0.3, 0.1))); };
  const ModeMismatch none(0.0);
  for (const ComplexAmplitude a : {ComplexAmplitude(0.0), ComplexAmplitude(0.7, -0.2)}) {
    CHECK(mode_mismatch_wigner(w_prime, none, a) == w_prime(a));
  }
  const ModeMismatch mm = ModeMismatch::from_overlap(0.84);
  CHECK_NEAR(mm.epsilon() * mm.epsilon(), 0.2944, 1e-12);
  CHECK(mm.sigma_vac_sq() == 0.5);
  CHECK(mode_mismatch_wigner(w_prime, mm, 0.0) == w_prime(0.0));

  const ComplexAmplitude alpha = std::polar(1.0, 0.4);
  CHECK_NEAR(mm.attenuation(alpha), std::exp(-0.2944), 1e-12);
  CHECK_NEAR(mm.attenuation(alpha), 0.745, 5e-4);
  CHECK_NEAR(mode_mismatch_wigner(w_prime, mm, alpha), std::exp(-0.2944) * w_prime(0.84 * alpha), 1e-12);
  CHECK_THROWS_AS(ModeMismatch(1.0), Error);
  CHECK_THROWS_AS(ModeMismatch(-0.1), Error);
}

TEST_CASE("forward model comparison reports both normalizations") {
  const FockSpace space(10);
  const PhaseGrid grid = PhaseGrid::square(2.5, 25);
  const double eta = 0.78;
  const ForwardModelComparison cmp = compare_forward_models(DensityMatrix::fock(1, space), eta, grid);
  CHECK(cmp.authoritative_model == std::string("kraus-loss"));
  CHECK(cmp.kraus.size() == grid.size());
  CHECK(cmp.convolution.size() == grid.size());
  CHECK_NEAR(cmp.kraus_normalization, 1.0, 0.01);
  // the convolution integral carries total weight eta/2
  CHECK_NEAR(cmp.convolution_normalization, eta / 2.0, 0.01);
  // at the origin the two paths differ by exactly the kernel's 1/2 offset
  const std::size_t origin = grid.size() / 2;
  CHECK(std::abs(grid.point(origin)) < 1e-12);
  CHECK_NEAR(cmp.kraus[origin], -0.56, 1e-10);
  CHECK_NEAR(cmp.convolution[origin], -0.28, 1e-4);
  CHECK(cmp.max_abs_difference >= 0.28 - 1e-4);
}
