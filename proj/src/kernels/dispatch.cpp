#include "spike/kernels/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace spike::kernels {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("SPIKE_SHOOTER_SIMD")) {
    const std::string_view v(env);
    if (v == "off" || v == "scalar" || v == "0") return Isa::Scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detected_isa() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
  return Isa::Scalar;
}

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  isa_slot().store(isa == Isa::Avx2 ? detected_isa() : Isa::Scalar,
                   std::memory_order_relaxed);
}

void reset_isa() { isa_slot().store(initial_isa(), std::memory_order_relaxed); }

void dopri_step(DopriBatch& batch) {
  if (active_isa() == Isa::Avx2) {
    dopri_step_avx2(batch);
  } else {
    dopri_step_scalar(batch);
  }
}

void horner_parity(std::span<const double> coeffs, int parity,
                   std::span<const double> t, std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    horner_parity_avx2(coeffs, parity, t, out);
  } else {
    horner_parity_scalar(coeffs, parity, t, out);
  }
}

}  // namespace spike::kernels
