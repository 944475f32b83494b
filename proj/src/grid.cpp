#include "paritysim/grid.hpp"

#include "paritysim/error.hpp"

namespace paritysim {

PhaseGrid PhaseGrid::square(double half_width, int n) {
  return PhaseGrid{-half_width, half_width, n, -half_width, half_width, n};
}

ComplexAmplitude PhaseGrid::point(std::size_t k) const {
  const int ii = static_cast<int>(k / static_cast<std::size_t>(nq));
  const int iq = static_cast<int>(k % static_cast<std::size_t>(nq));
  return {i_at(ii), q_at(iq)};
}

std::vector<ComplexAmplitude> PhaseGrid::points() const {
  std::vector<ComplexAmplitude> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = point(k);
  return out;
}

double PhaseGrid::trapezoid_weight(std::size_t k) const {
  const int ii = static_cast<int>(k / static_cast<std::size_t>(nq));
  const int iq = static_cast<int>(k % static_cast<std::size_t>(nq));
  const double wi = (ii == 0 || ii == ni - 1) ? 0.5 : 1.0;
  const double wq = (iq == 0 || iq == nq - 1) ? 0.5 : 1.0;
  return wi * wq * di() * dq();
}

void PhaseGrid::validate() const {
  if (ni < 2 || nq < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least 2x2 points");
  if (!(i_max > i_min) || !(q_max > q_min)) {
    throw Error(ErrorKind::InvalidArgument, "grid axes must be increasing");
  }
}

double GridFunction::integrate() const {
  if (values.size() != grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "grid function size does not match its grid");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) sum += grid.trapezoid_weight(k) * values[k];
  return sum;
}

}  // namespace paritysim
