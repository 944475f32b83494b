#pragma once

#include <cstddef>
#include <vector>

#include "paritysim/fock.hpp"

namespace paritysim {

/// Uniform rectangular grid of displacement points alpha = I + iQ.
/// Points are ordered with I as the outer index: k = i_index * nq + q_index.
struct PhaseGrid {
  double i_min = -2.0;
  double i_max = 2.0;
  int ni = 41;
  double q_min = -2.0;
  double q_max = 2.0;
  int nq = 41;

  /// n x n grid spanning [-half_width, half_width] on both axes.
  static PhaseGrid square(double half_width, int n);

  std::size_t size() const { return static_cast<std::size_t>(ni) * static_cast<std::size_t>(nq); }
  double di() const { return ni > 1 ? (i_max - i_min) / (ni - 1) : 0.0; }
  double dq() const { return nq > 1 ? (q_max - q_min) / (nq - 1) : 0.0; }
  double i_at(int index) const { return i_min + index * di(); }
  double q_at(int index) const { return q_min + index * dq(); }
  ComplexAmplitude point(std::size_t k) const;
  std::vector<ComplexAmplitude> points() const;

  /// Trapezoidal weight of point k (dI dQ times edge factors).
  double trapezoid_weight(std::size_t k) const;

  /// Throws InvalidArgument for non-increasing axes or fewer than two points.
  void validate() const;
};

/// Values of a real function sampled on a PhaseGrid.
struct GridFunction {
  PhaseGrid grid;
  std::vector<double> values;

  /// Trapezoidal integral over the grid.
  double integrate() const;
};

}  // namespace paritysim
