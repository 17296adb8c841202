// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "refmv/tensor.hpp"

namespace refmv {

// Signal-retention schedule: alpha_bar[0] = 1, strictly decreasing, always
// positive. alpha_bar[t] is the fraction of signal kept at step t.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> alpha_bar;  // size T+1
};

// Cosine-shaped curve with per-step retention clipped to >= 1e-3 so the
// terminal signal level stays strictly positive.
NoiseSchedule make_schedule(int T);

// sqrt(a_t) * x0 + sqrt(1 - a_t) * eps
Tensor add_noise(const Tensor& x0, int t, const Tensor& eps, const NoiseSchedule& schedule);

}  // namespace refmv
