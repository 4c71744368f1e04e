#include <cstddef>

#include "dopri_tableau.hpp"
#include "spike/kernels/dispatch.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define SPIKE_HAVE_X86 1
#define SPIKE_TARGET_AVX2 __attribute__((target("avx2")))
#else
#define SPIKE_HAVE_X86 0
#define SPIKE_TARGET_AVX2
#endif

namespace spike::kernels {

#if SPIKE_HAVE_X86

namespace {

struct Lanes {
  __m256d u, v;
};

SPIKE_TARGET_AVX2 inline __m256d splat(double x) { return _mm256_set1_pd(x); }

// Polynomial part of the acceleration in vector form; the friction factor is
// evaluated per lane with the shared scalar helper.
SPIKE_TARGET_AVX2 inline __m256d accel(__m256d t, __m256d yu, __m256d yv,
                                       __m256d p5c, __m256d p1c, const double* fric) {
  alignas(32) double tt[kLanes];
  alignas(32) double gg[kLanes];
  _mm256_store_pd(tt, t);
  for (std::size_t l = 0; l < kLanes; ++l) gg[l] = dp::friction_term(tt[l], fric[l]);
  const __m256d g = _mm256_load_pd(gg);
  const __m256d u2 = _mm256_mul_pd(yu, yu);
  const __m256d u4 = _mm256_mul_pd(u2, u2);
  const __m256d p5 = _mm256_mul_pd(u4, yu);
  const __m256d s = _mm256_add_pd(_mm256_mul_pd(p5c, p5), _mm256_mul_pd(p1c, yu));
  return _mm256_sub_pd(s, _mm256_mul_pd(g, yv));
}

SPIKE_TARGET_AVX2 inline __m256d madd(__m256d acc, double a, __m256d k) {
  return _mm256_add_pd(acc, _mm256_mul_pd(splat(a), k));
}

SPIKE_TARGET_AVX2 inline __m256d scaled_error(__m256d e, __m256d y0, __m256d y1,
                                              __m256d atol, __m256d rtol) {
  const __m256d sign = splat(-0.0);
  const __m256d a0 = _mm256_andnot_pd(sign, y0);
  const __m256d a1 = _mm256_andnot_pd(sign, y1);
  const __m256d sc = _mm256_add_pd(atol, _mm256_mul_pd(rtol, _mm256_max_pd(a0, a1)));
  return _mm256_div_pd(_mm256_andnot_pd(sign, e), sc);
}

}  // namespace

SPIKE_TARGET_AVX2 void dopri_step_avx2(DopriBatch& b) {
  using namespace dp;
  const __m256d t = _mm256_load_pd(b.t);
  const __m256d h = _mm256_load_pd(b.h);
  const __m256d u = _mm256_load_pd(b.u);
  const __m256d du = _mm256_load_pd(b.du);
  const __m256d p5c = _mm256_load_pd(b.c5);
  const __m256d p1c = _mm256_load_pd(b.c1);

  __m256d ku[7];
  __m256d kv[7];
  ku[0] = _mm256_load_pd(b.ku[0]);
  kv[0] = _mm256_load_pd(b.kdu[0]);

  auto stage = [&](int idx, double c, __m256d su, __m256d sv) SPIKE_TARGET_AVX2 {
    const __m256d yu = _mm256_add_pd(u, _mm256_mul_pd(h, su));
    const __m256d yv = _mm256_add_pd(du, _mm256_mul_pd(h, sv));
    ku[idx] = yv;
    const __m256d tc = c == 1.0 ? _mm256_add_pd(t, h) : _mm256_add_pd(t, _mm256_mul_pd(splat(c), h));
    kv[idx] = accel(tc, yu, yv, p5c, p1c, b.fric);
  };

  stage(1, c2, _mm256_mul_pd(splat(a21), ku[0]), _mm256_mul_pd(splat(a21), kv[0]));

  {
    __m256d su = _mm256_mul_pd(splat(a31), ku[0]);
    su = madd(su, a32, ku[1]);
    __m256d sv = _mm256_mul_pd(splat(a31), kv[0]);
    sv = madd(sv, a32, kv[1]);
    stage(2, c3, su, sv);
  }
  {
    __m256d su = _mm256_mul_pd(splat(a41), ku[0]);
    su = madd(su, a42, ku[1]);
    su = madd(su, a43, ku[2]);
    __m256d sv = _mm256_mul_pd(splat(a41), kv[0]);
    sv = madd(sv, a42, kv[1]);
    sv = madd(sv, a43, kv[2]);
    stage(3, c4, su, sv);
  }
  {
    __m256d su = _mm256_mul_pd(splat(a51), ku[0]);
    su = madd(su, a52, ku[1]);
    su = madd(su, a53, ku[2]);
    su = madd(su, a54, ku[3]);
    __m256d sv = _mm256_mul_pd(splat(a51), kv[0]);
    sv = madd(sv, a52, kv[1]);
    sv = madd(sv, a53, kv[2]);
    sv = madd(sv, a54, kv[3]);
    stage(4, c5, su, sv);
  }
  {
    __m256d su = _mm256_mul_pd(splat(a61), ku[0]);
    su = madd(su, a62, ku[1]);
    su = madd(su, a63, ku[2]);
    su = madd(su, a64, ku[3]);
    su = madd(su, a65, ku[4]);
    __m256d sv = _mm256_mul_pd(splat(a61), kv[0]);
    sv = madd(sv, a62, kv[1]);
    sv = madd(sv, a63, kv[2]);
    sv = madd(sv, a64, kv[3]);
    sv = madd(sv, a65, kv[4]);
    stage(5, 1.0, su, sv);
  }
  __m256d yu;
  __m256d yv;
  {
    __m256d su = _mm256_mul_pd(splat(a71), ku[0]);
    su = madd(su, a73, ku[2]);
    su = madd(su, a74, ku[3]);
    su = madd(su, a75, ku[4]);
    su = madd(su, a76, ku[5]);
    __m256d sv = _mm256_mul_pd(splat(a71), kv[0]);
    sv = madd(sv, a73, kv[2]);
    sv = madd(sv, a74, kv[3]);
    sv = madd(sv, a75, kv[4]);
    sv = madd(sv, a76, kv[5]);
    yu = _mm256_add_pd(u, _mm256_mul_pd(h, su));
    yv = _mm256_add_pd(du, _mm256_mul_pd(h, sv));
    ku[6] = yv;
    kv[6] = accel(_mm256_add_pd(t, h), yu, yv, p5c, p1c, b.fric);
  }

  __m256d eu = _mm256_mul_pd(splat(e1), ku[0]);
  eu = madd(eu, e3, ku[2]);
  eu = madd(eu, e4, ku[3]);
  eu = madd(eu, e5, ku[4]);
  eu = madd(eu, e6, ku[5]);
  eu = madd(eu, e7, ku[6]);
  __m256d ev = _mm256_mul_pd(splat(e1), kv[0]);
  ev = madd(ev, e3, kv[2]);
  ev = madd(ev, e4, kv[3]);
  ev = madd(ev, e5, kv[4]);
  ev = madd(ev, e6, kv[5]);
  ev = madd(ev, e7, kv[6]);
  eu = _mm256_mul_pd(h, eu);
  ev = _mm256_mul_pd(h, ev);

  const __m256d atol = _mm256_load_pd(b.atol);
  const __m256d rtol = _mm256_load_pd(b.rtol);
  const __m256d ru = scaled_error(eu, u, yu, atol, rtol);
  const __m256d rv = scaled_error(ev, du, yv, atol, rtol);

  _mm256_store_pd(b.u5, yu);
  _mm256_store_pd(b.du5, yv);
  _mm256_store_pd(b.err, _mm256_max_pd(ru, rv));
  for (int i = 1; i < 7; ++i) {
    _mm256_store_pd(b.ku[i], ku[i]);
    _mm256_store_pd(b.kdu[i], kv[i]);
  }
}

SPIKE_TARGET_AVX2 void horner_parity_avx2(std::span<const double> coeffs, int parity,
                                          std::span<const double> t, std::span<double> out) {
  const std::size_t n = t.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(t.data() + i);
    const __m256d x2 = _mm256_mul_pd(x, x);
    __m256d acc = _mm256_setzero_pd();
    for (const double c : coeffs) acc = _mm256_add_pd(_mm256_mul_pd(acc, x2), _mm256_set1_pd(c));
    if (parity != 0) acc = _mm256_mul_pd(acc, x);
    _mm256_storeu_pd(out.data() + i, acc);
  }
  if (i < n) horner_parity_scalar(coeffs, parity, t.subspan(i), out.subspan(i));
}

#else

void dopri_step_avx2(DopriBatch& b) { dopri_step_scalar(b); }

void horner_parity_avx2(std::span<const double> coeffs, int parity,
                        std::span<const double> t, std::span<double> out) {
  horner_parity_scalar(coeffs, parity, t, out);
}

#endif

}  // namespace spike::kernels
