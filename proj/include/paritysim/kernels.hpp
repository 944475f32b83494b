#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial reference with the
// same signature and suffix `_serial`; the test suite checks they agree and
// bench/ compares their throughput. Results never depend on the thread
// count: parallel loops write disjoint outputs, and reductions are done over
// a fixed number of batches merged in index order.

#include <cstdint>
#include <span>
#include <vector>

#include "paritysim/fock.hpp"
#include "paritysim/grid.hpp"

namespace paritysim {

/// wigner_point(rho, alpha) for every alpha.
std::vector<double> wigner_map(const DensityMatrix& rho, std::span<const ComplexAmplitude> points);
std::vector<double> wigner_map_serial(const DensityMatrix& rho,
                                      std::span<const ComplexAmplitude> points);

/// measured_wigner_convolution(w, eta, alpha) for every alpha.
std::vector<double> convolution_map(const GridFunction& w, double eta,
                                    std::span<const ComplexAmplitude> points);
std::vector<double> convolution_map_serial(const GridFunction& w, double eta,
                                           std::span<const ComplexAmplitude> points);

/// Cap the OpenMP worker count; n <= 0 leaves the runtime default.
void set_worker_threads(int n);
int worker_threads();

}  // namespace paritysim
