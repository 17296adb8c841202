// SPDX-License-Identifier: Apache-2.0
#include "refmv/tensor.hpp"

#include <cblas.h>

namespace refmv {

void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a, const double* b,
          double beta, double* c) {
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans, tb ? CblasTrans : CblasNoTrans, m, n,
              k, alpha, a, ta ? m : k, b, tb ? k : n, beta, c, n);
}

}  // namespace refmv
