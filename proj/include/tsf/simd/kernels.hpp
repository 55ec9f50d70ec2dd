#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense inner loops used by the network layers, the optimizers and forest
// aggregation. Each kernel has a scalar reference and vector variants; the
// variant is chosen once per process from the running CPU.

namespace tsf::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Best variant this CPU can run. TSF_SIMD=scalar in the environment forces
// the reference path.
Isa detect_isa();

// Variant currently used by the free functions below.
Isa active_isa();

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += x
  void (*accumulate)(const double* x, double* y, std::size_t n);
  // y *= alpha
  void (*scale)(double alpha, double* y, std::size_t n);
};

// Table for a given variant. Requesting a variant the CPU cannot run (or
// that was not compiled in) returns the scalar table.
const KernelTable& kernels_for(Isa isa);
bool isa_available(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void accumulate(std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> y);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void accumulate(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TSF_SIMD_HAVE_AVX2 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void accumulate(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define TSF_SIMD_HAVE_NEON 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void accumulate(const double* x, double* y, std::size_t n);
void scale(double alpha, double* y, std::size_t n);
}  // namespace neon
#endif

}  // namespace tsf::simd
