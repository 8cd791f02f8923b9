#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference implementation;
// vector variants (AVX2+FMA on x86-64, NEON on aarch64) are chosen once at
// startup from CPU capabilities. Set NPSR_SIMD=scalar to force the reference.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace npsr::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
};

const KernelTable& scalar_kernels();
/// Null when the variant was not compiled for this target.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Whether the running CPU can execute the given variant.
bool cpu_supports(Isa isa);

/// Kernels selected for this process.
const KernelTable& active();
Isa active_isa();

/// Overrides the selection; throws std::invalid_argument if unsupported here.
void force_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

}  // namespace npsr::simd
