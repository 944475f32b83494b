#include "paritysim/kernels.hpp"

#include <omp.h>

#include "paritysim/channels.hpp"

namespace paritysim {

std::vector<double> wigner_map(const DensityMatrix& rho, std::span<const ComplexAmplitude> points) {
  std::vector<double> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = wigner_point(rho, points[k]);
  return out;
}

std::vector<double> wigner_map_serial(const DensityMatrix& rho,
                                      std::span<const ComplexAmplitude> points) {
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) out[k] = wigner_point(rho, points[k]);
  return out;
}

std::vector<double> convolution_map(const GridFunction& w, double eta,
                                    std::span<const ComplexAmplitude> points) {
  std::vector<double> out(points.size());
  if (points.empty()) return out;
  // Exceptions must not escape the parallel region: run every check that
  // measured_wigner_convolution performs up front, serially.
  out[0] = measured_wigner_convolution(w, eta, points[0]);
  for (const auto& p : points) {
    if (convolution_kernel_tail_mass(w.grid, eta, p) > 1e-4) (void)measured_wigner_convolution(w, eta, p);
  }
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 1; k < n; ++k) out[k] = measured_wigner_convolution(w, eta, points[k]);
  return out;
}

std::vector<double> convolution_map_serial(const GridFunction& w, double eta,
                                           std::span<const ComplexAmplitude> points) {
  std::vector<double> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) out[k] = measured_wigner_convolution(w, eta, points[k]);
  return out;
}

void set_worker_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int worker_threads() { return omp_get_max_threads(); }

}  // namespace paritysim
