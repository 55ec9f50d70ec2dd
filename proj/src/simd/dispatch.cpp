#include <cassert>
#include <cstdlib>
#include <cstring>

#include "tsf/simd/kernels.hpp"

namespace tsf::simd {

namespace {

constexpr KernelTable kScalar{&scalar::dot, &scalar::axpy, &scalar::accumulate, &scalar::scale};
#if defined(TSF_SIMD_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::dot, &avx2::axpy, &avx2::accumulate, &avx2::scale};
#endif
#if defined(TSF_SIMD_HAVE_NEON)
constexpr KernelTable kNeon{&neon::dot, &neon::axpy, &neon::accumulate, &neon::scale};
#endif

const KernelTable& active_table() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    case Isa::Scalar: break;
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(TSF_SIMD_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(TSF_SIMD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* forced = std::getenv("TSF_SIMD"); forced && std::strcmp(forced, "scalar") == 0) {
    return Isa::Scalar;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() {
  static const Isa isa = detect_isa();
  return isa;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) return kScalar;
  switch (isa) {
#if defined(TSF_SIMD_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(TSF_SIMD_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_table().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

void accumulate(std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active_table().accumulate(x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> y) { active_table().scale(alpha, y.data(), y.size()); }

}  // namespace tsf::simd
