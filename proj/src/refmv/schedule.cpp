// SPDX-License-Identifier: Apache-2.0
#include "refmv/schedule.hpp"

#include <cmath>

#include "refmv/errors.hpp"

namespace refmv {

NoiseSchedule make_schedule(int T) {
  if (T < 2) throw ValidationError("make_schedule: T must be >= 2");
  NoiseSchedule s;
  s.T = T;
  s.alpha_bar.resize(T + 1);
  constexpr double kOffset = 0.008;
  constexpr double kPi = 3.14159265358979323846;
  auto f = [&](double t) {
    double a = std::cos((t / T + kOffset) / (1.0 + kOffset) * kPi * 0.5);
    return a * a;
  };
  double f0 = f(0);
  s.alpha_bar[0] = 1.0;
  double prev_raw = 1.0;
  for (int t = 1; t <= T; t++) {
    double raw = f(double(t)) / f0;
    double retain = raw / prev_raw;  // 1 - beta_t
    if (retain < 1e-3) retain = 1e-3;
    s.alpha_bar[t] = s.alpha_bar[t - 1] * retain;
    prev_raw = raw;
  }
  return s;
}

Tensor add_noise(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& schedule) {
  if (t < 0 || t > schedule.T) throw ValidationError("add_noise: t out of range");
  if (!x0.same_shape(eps)) throw ValidationError("add_noise: eps shape mismatch");
  double a = schedule.alpha_bar[t];
  double sa = std::sqrt(a), sn = std::sqrt(1.0 - a);
  Tensor out(x0.c, x0.h, x0.w);
  for (size_t i = 0; i < x0.size(); i++) out.v[i] = sa * x0.v[i] + sn * eps.v[i];
  return out;
}

}  // namespace refmv
