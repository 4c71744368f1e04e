#include <cstddef>

#include "dopri_tableau.hpp"
#include "spike/kernels/dispatch.hpp"

namespace spike::kernels {

double lane_accel(double t, double u, double du, double c5, double c1, double fric) {
  const double g = dp::friction_term(t, fric);
  const double u2 = u * u;
  const double u4 = u2 * u2;
  const double p5 = u4 * u;
  const double s = c5 * p5 + c1 * u;
  return s - g * du;
}

void DopriBatch::idle(std::size_t lane) {
  t[lane] = 0.5;
  h[lane] = 0.0;
  u[lane] = 0.0;
  du[lane] = 0.0;
  c5[lane] = 0.0;
  c1[lane] = 0.0;
  fric[lane] = 0.0;
  rtol[lane] = 1.0;
  atol[lane] = 1.0;
  ku[0][lane] = 0.0;
  kdu[0][lane] = 0.0;
}

void dopri_step_scalar(DopriBatch& b) {
  using namespace dp;
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double t = b.t[l];
    const double h = b.h[l];
    const double u = b.u[l];
    const double du = b.du[l];
    const double p5c = b.c5[l];
    const double p1c = b.c1[l];
    const double fr = b.fric[l];
    double (&ku)[7][kLanes] = b.ku;
    double (&kv)[7][kLanes] = b.kdu;

    double su = a21 * ku[0][l];
    double sv = a21 * kv[0][l];
    double yu = u + h * su;
    double yv = du + h * sv;
    ku[1][l] = yv;
    kv[1][l] = lane_accel(t + c2 * h, yu, yv, p5c, p1c, fr);

    su = a31 * ku[0][l];
    su = su + a32 * ku[1][l];
    sv = a31 * kv[0][l];
    sv = sv + a32 * kv[1][l];
    yu = u + h * su;
    yv = du + h * sv;
    ku[2][l] = yv;
    kv[2][l] = lane_accel(t + c3 * h, yu, yv, p5c, p1c, fr);

    su = a41 * ku[0][l];
    su = su + a42 * ku[1][l];
    su = su + a43 * ku[2][l];
    sv = a41 * kv[0][l];
    sv = sv + a42 * kv[1][l];
    sv = sv + a43 * kv[2][l];
    yu = u + h * su;
    yv = du + h * sv;
    ku[3][l] = yv;
    kv[3][l] = lane_accel(t + c4 * h, yu, yv, p5c, p1c, fr);

    su = a51 * ku[0][l];
    su = su + a52 * ku[1][l];
    su = su + a53 * ku[2][l];
    su = su + a54 * ku[3][l];
    sv = a51 * kv[0][l];
    sv = sv + a52 * kv[1][l];
    sv = sv + a53 * kv[2][l];
    sv = sv + a54 * kv[3][l];
    yu = u + h * su;
    yv = du + h * sv;
    ku[4][l] = yv;
    kv[4][l] = lane_accel(t + c5 * h, yu, yv, p5c, p1c, fr);

    su = a61 * ku[0][l];
    su = su + a62 * ku[1][l];
    su = su + a63 * ku[2][l];
    su = su + a64 * ku[3][l];
    su = su + a65 * ku[4][l];
    sv = a61 * kv[0][l];
    sv = sv + a62 * kv[1][l];
    sv = sv + a63 * kv[2][l];
    sv = sv + a64 * kv[3][l];
    sv = sv + a65 * kv[4][l];
    yu = u + h * su;
    yv = du + h * sv;
    ku[5][l] = yv;
    kv[5][l] = lane_accel(t + h, yu, yv, p5c, p1c, fr);

    su = a71 * ku[0][l];
    su = su + a73 * ku[2][l];
    su = su + a74 * ku[3][l];
    su = su + a75 * ku[4][l];
    su = su + a76 * ku[5][l];
    sv = a71 * kv[0][l];
    sv = sv + a73 * kv[2][l];
    sv = sv + a74 * kv[3][l];
    sv = sv + a75 * kv[4][l];
    sv = sv + a76 * kv[5][l];
    yu = u + h * su;
    yv = du + h * sv;
    b.u5[l] = yu;
    b.du5[l] = yv;
    ku[6][l] = yv;
    kv[6][l] = lane_accel(t + h, yu, yv, p5c, p1c, fr);

    double eu = e1 * ku[0][l];
    eu = eu + e3 * ku[2][l];
    eu = eu + e4 * ku[3][l];
    eu = eu + e5 * ku[4][l];
    eu = eu + e6 * ku[5][l];
    eu = eu + e7 * ku[6][l];
    double ev = e1 * kv[0][l];
    ev = ev + e3 * kv[2][l];
    ev = ev + e4 * kv[3][l];
    ev = ev + e5 * kv[4][l];
    ev = ev + e6 * kv[5][l];
    ev = ev + e7 * kv[6][l];
    eu = h * eu;
    ev = h * ev;

    const double ru = scaled_error(eu, u, yu, b.atol[l], b.rtol[l]);
    const double rv = scaled_error(ev, du, yv, b.atol[l], b.rtol[l]);
    b.err[l] = ru > rv ? ru : rv;
  }
}

void horner_parity_scalar(std::span<const double> coeffs, int parity,
                          std::span<const double> t, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i];
    const double x2 = x * x;
    double acc = 0.0;
    for (const double c : coeffs) acc = acc * x2 + c;
    out[i] = parity != 0 ? acc * x : acc;
  }
}

}  // namespace spike::kernels
