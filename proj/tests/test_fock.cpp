#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "paritysim/error.hpp"
#include "paritysim/fock.hpp"
#include "paritysim/grid.hpp"
#include "paritysim/channels.hpp"
#include "support.hpp"

using namespace paritysim;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("annihilation operator entries") {
  const CMatrix a2 = annihilation(FockSpace(1));
  CHECK(a2(0, 1) == Complex(1.0));
  CHECK(a2(0, 0) == Complex(0.0));
  CHECK(a2(1, 0) == Complex(0.0));
  CHECK(a2(1, 1) == Complex(0.0));

  const CMatrix a3 = annihilation(FockSpace(2));
  CHECK_NEAR(a3(1, 2).real(), std::sqrt(2.0), 1e-15);

  const FockSpace space(7);
  const CMatrix a = annihilation(space);
  const CMatrix n = a.adjoint() * a;
  for (int k = 0; k <= 7; ++k) CHECK_NEAR(n(k, k).real(), double(k), 1e-12);
  CHECK(max_abs(n - number_operator(space)) < 1e-12);
}

TEST_CASE("FockSpace rejects bad sizes") {
  CHECK_THROWS_AS(FockSpace(0), Error);
  CHECK_THROWS_AS(FockSpace(3, -1), Error);
}

TEST_CASE("DensityMatrix invariants are enforced") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix{m});
  CMatrix bad_trace = m * 1.1;
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, Error);
  CMatrix non_hermitian = m;
  non_hermitian(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{non_hermitian}, Error);
  CMatrix negative = m;
  negative(0, 0) = 1.2;
  negative(1, 1) = -0.2;
  CHECK_THROWS_AS(DensityMatrix{negative}, Error);
  CHECK_THROWS_AS(Ket(CVector::Ones(2)), Error);
}

TEST_CASE("displacement") {
  const FockSpace space(20, 10);
  SUBCASE("zero amplitude is the identity") {
    CHECK(max_abs(displacement(0.0, space) - CMatrix::Identity(21, 21)) < 1e-12);
  }
  SUBCASE("D(1)|0> has coherent amplitudes") {
    const CMatrix d = displacement(1.0, space);
    const double e = std::exp(-0.5);
    double fact = 1.0;
    for (int n = 0; n <= 10; ++n) {
      if (n > 0) fact *= n;
      CHECK_NEAR(std::abs(d(n, 0) - Complex(e / std::sqrt(fact))), 0.0, 1e-10);
    }
  }
  SUBCASE("D(alpha) D(-alpha) is the identity on the padded space") {
    for (double r : {0.3, 1.0, 1.5}) {
      for (double phase : {0.0, 0.7, 2.5}) {
        const ComplexAmplitude alpha = std::polar(r, phase);
        const CMatrix prod = displacement_padded(alpha, space) * displacement_padded(-alpha, space);
        INFO("alpha = " << alpha);
        CHECK(max_abs(prod.topLeftCorner(21, 21) - CMatrix::Identity(21, 21)) < 1e-8);
      }
    }
  }
  SUBCASE("truncated D(alpha) D(-alpha) is the identity well below the edge") {
    // The 21-level product drops intermediate levels above n_max, which is
    // only negligible for the lowest levels.
    for (double r : {0.3, 1.0}) {
      const CMatrix prod = displacement(r, space) * displacement(-r, space);
      CHECK(max_abs(prod.topLeftCorner(6, 6) - CMatrix::Identity(6, 6)) < 1e-8);
    }
  }
  SUBCASE("displaced vacuum is the coherent state") {
    const ComplexAmplitude alpha(0.8, -0.4);
    const CVector col = displacement(alpha, space).col(0);
    const Ket coh = coherent_state(alpha, space);
    CHECK(std::abs(col.dot(coh.amplitudes())) > 1.0 - 1e-10);
  }
}

TEST_CASE("parity operator") {
  const FockSpace space(6);
  const CMatrix p = parity_operator(space);
  for (int n = 0; n <= 6; ++n) CHECK(p(n, n).real() == (n % 2 ? -1.0 : 1.0));
  CHECK(expectation_parity(DensityMatrix::fock(0, space)) == 1.0);
  CHECK(expectation_parity(DensityMatrix::fock(1, space)) == -1.0);

  const FockSpace big(30);
  for (double r : {0.3, 1.0, 1.5}) {
    const auto rho = DensityMatrix::pure(coherent_state(r, big));
    CHECK_NEAR(expectation_parity(rho), std::exp(-2.0 * r * r), 1e-10);
  }
}

TEST_CASE("parity expectation is the alternating diagonal sum") {
  const FockSpace space(5);
  CMatrix m = CMatrix::Zero(6, 6);
  const double p[6] = {0.3, 0.25, 0.2, 0.1, 0.1, 0.05};
  for (int n = 0; n < 6; ++n) m(n, n) = p[n];
  m(0, 1) = m(1, 0) = 0.1;
  const DensityMatrix rho(m);
  CHECK(expectation_parity(rho) == doctest::Approx(0.3 - 0.25 + 0.2 - 0.1 + 0.1 - 0.05).epsilon(1e-15));
}

TEST_CASE("coherent states") {
  const FockSpace space(20);
  const Ket vac = coherent_state(0.0, space);
  CHECK_NEAR(std::abs(vac[0]), 1.0, 1e-15);

  const Ket k = coherent_state(1.06, space);
  CHECK_NEAR(std::norm(k[0]), std::exp(-1.1236), 1e-10);
  CHECK_NEAR(std::norm(k[0]), 0.3251, 5e-5);

  const ComplexAmplitude alpha(0.9, 0.5);
  const auto rho = DensityMatrix::pure(coherent_state(alpha, space));
  CHECK(std::abs(moment(rho, 0, 1) - alpha) < 1e-6);
}

TEST_CASE("cat states") {
  const FockSpace space(20);
  const ComplexAmplitude alpha = 1.06;

  SUBCASE("normalization constant") {
    const FockSpace big(40);
    const CVector sum = coherent_state(alpha, big).amplitudes() + coherent_state(-alpha, big).amplitudes();
    CHECK_NEAR(sum.squaredNorm(), 2.0 * (1.0 + std::exp(-2.2472)), 1e-10);
    CHECK_NEAR(sum.squaredNorm(), 2.2113, 1e-4);
  }
  SUBCASE("parity support") {
    const Ket even = cat_state(alpha, +1, space);
    const Ket odd = cat_state(alpha, -1, space);
    for (int n = 0; n <= 20; ++n) {
      if (n % 2) CHECK(std::abs(even[n]) < 1e-15);
      else CHECK(std::abs(odd[n]) < 1e-15);
    }
  }
  SUBCASE("small amplitude even cat tends to vacuum") {
    CHECK_NEAR(std::abs(cat_state(1e-6, +1, space)[0]), 1.0, 1e-10);
    CHECK(std::abs(cat_state(0.0, +1, space)[0]) == doctest::Approx(1.0));
  }
  SUBCASE("zero odd cat is an error") {
    try {
      cat_state(0.0, -1, space);
      FAIL("expected ZeroOddCat");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ZeroOddCat);
    }
  }
  SUBCASE("cats are a^2 eigenstates") {
    const CMatrix a = annihilation(space);
    for (int sign : {+1, -1}) {
      const CVector psi = cat_state(alpha, sign, space).amplitudes();
      CHECK((a * a * psi - alpha * alpha * psi).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("Wigner sign convention against the coherent-state Gaussian") {
  const FockSpace space(20);
  const ComplexAmplitude beta(0.5, -0.3);
  const auto rho = DensityMatrix::pure(coherent_state(beta, space));
  for (int i = 0; i < 5; ++i) {
    for (int q = 0; q < 5; ++q) {
      const ComplexAmplitude alpha(-1.0 + 0.5 * i, -1.0 + 0.5 * q);
      CHECK_NEAR(wigner_point(rho, alpha), std::exp(-2.0 * std::norm(beta - alpha)), 1e-9);
    }
  }
}

TEST_CASE("Wigner values at the origin") {
  const FockSpace space(10);
  CHECK_NEAR(wigner_point(DensityMatrix::fock(0, space), 0.0), 1.0, 1e-12);
  CHECK_NEAR(wigner_point(DensityMatrix::fock(1, space), 0.0), -1.0, 1e-12);
  const DensityMatrix lossy = apply_loss(DensityMatrix::fock(1, space), 0.78);
  CHECK_NEAR(wigner_point(lossy, 0.0), -0.56, 1e-12);
  // measured value -0.55 sits within 0.02 of the model
  CHECK(std::abs(wigner_point(lossy, 0.0) - (-0.55)) <= 0.02);
}

TEST_CASE("Wigner values match the position-space quadrature oracle") {
  const FockSpace space(12);
  std::vector<DensityMatrix> states;
  states.push_back(DensityMatrix::fock(2, space));
  states.push_back(DensityMatrix::pure(cat_state(1.06, +1, space)));
  states.push_back(DensityMatrix::pure(cat_state(Complex(0.4, 0.9), -1, space)));
  CVector sup = CVector::Zero(13);
  sup(0) = 1.0;
  sup(1) = Complex(0.0, 1.0);
  sup(3) = 0.5;
  states.push_back(DensityMatrix::pure(Ket::normalized(sup)));
  CMatrix mixed = 0.6 * states[1].matrix() + 0.4 * DensityMatrix::fock(1, space).matrix();
  states.push_back(DensityMatrix(mixed));

  const ComplexAmplitude points[] = {{0.0, 0.0}, {0.7, 0.0}, {-0.3, 0.5}, {1.1, -0.9}, {0.2, 1.4}};
  for (const auto& rho : states) {
    for (const auto& alpha : points) {
      INFO("alpha = " << alpha);
      CHECK_NEAR(wigner_point(rho, alpha), oracle::wigner_position(rho.matrix(), alpha), 1e-7);
    }
  }
}

TEST_CASE("Wigner map integrates to the trace") {
  const FockSpace space(20);
  const PhaseGrid grid = PhaseGrid::square(3.0, 41);
  const double cell = grid.di() * grid.dq();
  std::vector<DensityMatrix> states = {DensityMatrix::fock(1, space), DensityMatrix::fock(2, space),
                                       DensityMatrix::pure(cat_state(1.06, -1, space)),
                                       DensityMatrix::pure(coherent_state(Complex(0.5, 0.5), space))};
  for (const auto& rho : states) {
    double sum = 0.0;
    for (const auto& alpha : grid.points()) sum += wigner_point(rho, alpha);
    CHECK_NEAR(2.0 / std::numbers::pi * sum * cell, 1.0, 0.02);
  }
}

TEST_CASE("moments") {
  const FockSpace space(20);
  const ComplexAmplitude alpha(0.7, 0.4);
  const auto coh = DensityMatrix::pure(coherent_state(alpha, space));
  for (int n = 0; n <= 3; ++n) {
    for (int m = 0; m <= 3; ++m) {
      const Complex expect = std::pow(std::conj(alpha), n) * std::pow(alpha, m);
      CHECK(std::abs(moment(coh, n, m) - expect) < 1e-8);
    }
  }
  CHECK_NEAR(moment(DensityMatrix::fock(1, space), 1, 1).real(), 1.0, 1e-14);

  const auto even = DensityMatrix::pure(cat_state(1.06, +1, space));
  for (int n = 0; n <= 4; ++n) {
    for (int m = 0; m <= 4; ++m) {
      const Complex got = moment(even, n, m);
      if ((n + m) % 2) CHECK(std::abs(got) < 1e-14);
      CHECK(std::abs(got - oracle::cat_moment(1.06, +1, n, m)) < 1e-10);
    }
  }
  try {
    moment(DensityMatrix::fock(0, FockSpace(3)), 2, 2);
    FAIL("expected OrderTooHigh");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderTooHigh);
  }
}

TEST_CASE("displacement covariance of the field amplitude") {
  const FockSpace space(24);
  const auto rho = DensityMatrix::pure(cat_state(0.8, -1, space));
  for (const ComplexAmplitude beta : {ComplexAmplitude(0.5, 0.0), ComplexAmplitude(-0.3, 0.9)}) {
    const CMatrix d = displacement(beta, space);
    const DensityMatrix shifted = DensityMatrix::normalized(d * rho.matrix() * d.adjoint());
    CHECK(std::abs(moment(shifted, 0, 1) - (moment(rho, 0, 1) + beta)) < 1e-6);
  }
}

TEST_CASE("g2") {
  const FockSpace space(30);
  CHECK_NEAR(g2(DensityMatrix::pure(coherent_state(1.0, space))), 1.0, 1e-10);
  for (int n = 2; n <= 6; ++n) CHECK_NEAR(g2(DensityMatrix::fock(n, space)), (n - 1.0) / n, 1e-10);

  const double x = 0.5;
  const double odd = g2(DensityMatrix::pure(cat_state(std::sqrt(x), -1, space)));
  CHECK_NEAR(odd, std::pow(std::tanh(x), 2), 1e-10);
  CHECK_NEAR(odd, 0.2135, 1e-4);
  const double even = g2(DensityMatrix::pure(cat_state(std::sqrt(0.35), +1, space)));
  CHECK_NEAR(even, 1.0 / std::pow(std::tanh(0.35), 2), 1e-9);
  CHECK(even == doctest::Approx(8.8).epsilon(0.02));

  try {
    g2(DensityMatrix::fock(0, space));
    FAIL("expected VacuumState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VacuumState);
  }
}

TEST_CASE("fidelity") {
  const FockSpace space(8);
  const auto zero = DensityMatrix::fock(0, space);
  const auto one = DensityMatrix::fock(1, space);
  CHECK_NEAR(fidelity(zero, zero), 1.0, 1e-12);
  CHECK_NEAR(fidelity(zero, one), 0.0, 1e-12);

  const Ket a = coherent_state(Complex(0.4, 0.2), space);
  const Ket b = cat_state(0.9, +1, space);
  const double overlap = std::norm(a.amplitudes().dot(b.amplitudes()));
  CHECK_NEAR(fidelity(DensityMatrix::pure(a), DensityMatrix::pure(b)), overlap, 1e-8);

  const DensityMatrix mixed(0.7 * zero.matrix() + 0.3 * one.matrix());
  const DensityMatrix other = DensityMatrix::pure(b);
  CHECK_NEAR(fidelity(mixed, other), fidelity(other, mixed), 1e-8);
  CHECK_NEAR(fidelity(mixed, mixed), 1.0, 1e-8);
}
