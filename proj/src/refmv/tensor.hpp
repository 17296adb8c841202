// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace refmv {

// Dense channel-major activation tensor (c, h, w). Vectors are (c, 1, 1).
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_, double fill = 0.0)
      : c(c_), h(h_), w(w_), v(size_t(c_) * h_ * w_, fill) {}

  size_t size() const { return v.size(); }
  int hw() const { return h * w; }
  double& at(int ch, int y, int x) { return v[(size_t(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return v[(size_t(ch) * h + y) * w + x]; }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

// Row-major C(m x n) = alpha * op(A) * op(B) + beta * C.
// A is stored (ta ? k x m : m x k) contiguously, B (tb ? n x k : k x n).
void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, const double* b,
          double beta, double* c);

}  // namespace refmv
