// SPDX-License-Identifier: Apache-2.0
#include "refmv/graph.hpp"

#include <cmath>
#include <memory>

#include "refmv/errors.hpp"

namespace refmv {

int ParamStore::add(const std::string& name, std::vector<int> shape, Init init, Rng& rng) {
  if (find(name) >= 0) throw ValidationError("duplicate parameter name: " + name);
  Entry e;
  e.name = name;
  e.shape = std::move(shape);
  size_t n = 1;
  for (int d : e.shape) n *= size_t(d);
  e.w.assign(n, 0.0);
  e.g.assign(n, 0.0);
  if (init == Init::kOne) {
    for (auto& x : e.w) x = 1.0;
  } else if (init == Init::kHeNormal) {
    // fan_in = product of all dims but the first (conv: cin*k*k, linear: cin)
    size_t fan_in = 1;
    for (size_t i = 1; i < e.shape.size(); i++) fan_in *= size_t(e.shape[i]);
    double std = std::sqrt(2.0 / double(fan_in ? fan_in : 1));
    for (auto& x : e.w) x = rng.normal() * std;
  }
  entries_.push_back(std::move(e));
  return int(entries_.size()) - 1;
}

int ParamStore::find(const std::string& name) const {
  for (size_t i = 0; i < entries_.size(); i++)
    if (entries_[i].name == name) return int(i);
  return -1;
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) std::fill(e.g.begin(), e.g.end(), 0.0);
}

void ParamStore::set_trainable(const std::string& prefix, bool trainable) {
  for (auto& e : entries_)
    if (e.name.rfind(prefix, 0) == 0) e.trainable = trainable;
}

int Graph::push(Tensor val, std::function<void(Graph&, int)> back) {
  Node node;
  node.val = std::move(val);
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return int(nodes_.size()) - 1;
}

int Graph::input(Tensor value) { return push(std::move(value), nullptr); }

namespace {

// col is (cin*k*k) x (ho*wo), row-major.
void im2col(const Tensor& x, int k, int stride, int pad, int ho, int wo, double* col) {
  for (int ci = 0; ci < x.c; ci++) {
    for (int ky = 0; ky < k; ky++) {
      for (int kx = 0; kx < k; kx++) {
        double* row = col + ((size_t(ci) * k + ky) * k + kx) * (size_t(ho) * wo);
        for (int oy = 0; oy < ho; oy++) {
          int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= x.h) {
            for (int ox = 0; ox < wo; ox++) row[oy * wo + ox] = 0.0;
            continue;
          }
          const double* src = &x.v[(size_t(ci) * x.h + iy) * x.w];
          for (int ox = 0; ox < wo; ox++) {
            int ix = ox * stride + kx - pad;
            row[oy * wo + ox] = (ix < 0 || ix >= x.w) ? 0.0 : src[ix];
          }
        }
      }
    }
  }
}

void col2im_add(const double* col, int cin, int k, int stride, int pad, int ho, int wo,
                Tensor& dx) {
  for (int ci = 0; ci < cin; ci++) {
    for (int ky = 0; ky < k; ky++) {
      for (int kx = 0; kx < k; kx++) {
        const double* row = col + ((size_t(ci) * k + ky) * k + kx) * (size_t(ho) * wo);
        for (int oy = 0; oy < ho; oy++) {
          int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= dx.h) continue;
          double* dst = &dx.v[(size_t(ci) * dx.h + iy) * dx.w];
          for (int ox = 0; ox < wo; ox++) {
            int ix = ox * stride + kx - pad;
            if (ix >= 0 && ix < dx.w) dst[ix] += row[oy * wo + ox];
          }
        }
      }
    }
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

int Graph::conv2d(int x, int wid, int bid, int stride, int pad) {
  const Tensor& in = nodes_[x].val;
  const auto& wp = params_.at(wid);
  const int cout = wp.shape[0], cin = wp.shape[1], k = wp.shape[2];
  if (cin != in.c) throw ValidationError("conv2d: channel mismatch for " + wp.name);
  const int ho = (in.h + 2 * pad - k) / stride + 1;
  const int wo = (in.w + 2 * pad - k) / stride + 1;
  const int n = ho * wo;
  const int kk = cin * k * k;

  auto col = std::make_shared<std::vector<double>>(size_t(kk) * n);
  im2col(in, k, stride, pad, ho, wo, col->data());

  Tensor out(cout, ho, wo);
  gemm(false, false, cout, n, kk, 1.0, wp.w.data(), col->data(), 0.0, out.v.data());
  const auto& bb = params_.at(bid).w;
  for (int co = 0; co < cout; co++) {
    double b = bb[co];
    double* dst = &out.v[size_t(co) * n];
    for (int i = 0; i < n; i++) dst[i] += b;
  }

  return push(std::move(out), [x, wid, bid, stride, pad, col, cout, cin, k, ho, wo, n,
                               kk](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    auto& wp = g.params_.at(wid);
    auto& bp = g.params_.at(bid);
    if (wp.trainable) {
      gemm(false, true, cout, kk, n, 1.0, dy.v.data(), col->data(), 1.0, wp.g.data());
      for (int co = 0; co < cout; co++) {
        double s = 0;
        const double* src = &dy.v[size_t(co) * n];
        for (int i = 0; i < n; i++) s += src[i];
        bp.g[co] += s;
      }
    }
    std::vector<double> dcol(size_t(kk) * n);
    gemm(true, false, kk, n, cout, 1.0, wp.w.data(), dy.v.data(), 0.0, dcol.data());
    col2im_add(dcol.data(), cin, k, stride, pad, ho, wo, g.nodes_[x].grad);
  });
}

int Graph::group_norm(int x, int gid, int bid, int groups) {
  const Tensor& in = nodes_[x].val;
  if (in.c % groups != 0) throw ValidationError("group_norm: channels not divisible by groups");
  const int cg = in.c / groups;
  const size_t gn = size_t(cg) * in.hw();
  constexpr double eps = 1e-5;

  auto xhat = std::make_shared<std::vector<double>>(in.size());
  auto inv_std = std::make_shared<std::vector<double>>(groups);
  Tensor out(in.c, in.h, in.w);
  const auto& gamma = params_.at(gid).w;
  const auto& beta = params_.at(bid).w;

  for (int g = 0; g < groups; g++) {
    const double* src = &in.v[size_t(g) * gn];
    double mean = 0;
    for (size_t i = 0; i < gn; i++) mean += src[i];
    mean /= double(gn);
    double var = 0;
    for (size_t i = 0; i < gn; i++) var += (src[i] - mean) * (src[i] - mean);
    var /= double(gn);
    double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[g] = is;
    double* xh = &(*xhat)[size_t(g) * gn];
    double* dst = &out.v[size_t(g) * gn];
    for (int c = 0; c < cg; c++) {
      int ch = g * cg + c;
      for (int i = 0; i < in.hw(); i++) {
        double v = (src[size_t(c) * in.hw() + i] - mean) * is;
        xh[size_t(c) * in.hw() + i] = v;
        dst[size_t(c) * in.hw() + i] = gamma[ch] * v + beta[ch];
      }
    }
  }

  return push(std::move(out), [x, gid, bid, groups, cg, gn, xhat, inv_std](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.nodes_[x].grad;
    auto& gp = g.params_.at(gid);
    auto& bp = g.params_.at(bid);
    const auto& gamma = gp.w;
    const int hw = dx.hw();

    for (int grp = 0; grp < groups; grp++) {
      const double* dyp = &dy.v[size_t(grp) * gn];
      const double* xh = &(*xhat)[size_t(grp) * gn];
      double is = (*inv_std)[grp];
      // Param grads.
      if (gp.trainable) {
        for (int c = 0; c < cg; c++) {
          int ch = grp * cg + c;
          double dgamma = 0, dbeta = 0;
          for (int i = 0; i < hw; i++) {
            dgamma += dyp[size_t(c) * hw + i] * xh[size_t(c) * hw + i];
            dbeta += dyp[size_t(c) * hw + i];
          }
          gp.g[ch] += dgamma;
          bp.g[ch] += dbeta;
        }
      }
      // Input grads.
      double mean_dxh = 0, mean_dxh_xh = 0;
      for (int c = 0; c < cg; c++) {
        int ch = grp * cg + c;
        for (int i = 0; i < hw; i++) {
          double dxh = dyp[size_t(c) * hw + i] * gamma[ch];
          mean_dxh += dxh;
          mean_dxh_xh += dxh * xh[size_t(c) * hw + i];
        }
      }
      mean_dxh /= double(gn);
      mean_dxh_xh /= double(gn);
      double* dxp = &dx.v[size_t(grp) * gn];
      for (int c = 0; c < cg; c++) {
        int ch = grp * cg + c;
        for (int i = 0; i < hw; i++) {
          double dxh = dyp[size_t(c) * hw + i] * gamma[ch];
          dxp[size_t(c) * hw + i] +=
              is * (dxh - mean_dxh - xh[size_t(c) * hw + i] * mean_dxh_xh);
        }
      }
    }
  });
}

int Graph::silu(int x) {
  const Tensor& in = nodes_[x].val;
  Tensor out(in.c, in.h, in.w);
  for (size_t i = 0; i < in.size(); i++) out.v[i] = in.v[i] * sigmoid(in.v[i]);
  return push(std::move(out), [x](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    const Tensor& in = g.nodes_[x].val;
    Tensor& dx = g.nodes_[x].grad;
    for (size_t i = 0; i < in.size(); i++) {
      double s = sigmoid(in.v[i]);
      dx.v[i] += dy.v[i] * s * (1.0 + in.v[i] * (1.0 - s));
    }
  });
}

int Graph::add(int a, int b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (!ta.same_shape(tb)) throw ValidationError("add: shape mismatch");
  Tensor out(ta.c, ta.h, ta.w);
  for (size_t i = 0; i < ta.size(); i++) out.v[i] = ta.v[i] + tb.v[i];
  return push(std::move(out), [a, b](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& da = g.nodes_[a].grad;
    Tensor& db = g.nodes_[b].grad;
    for (size_t i = 0; i < dy.size(); i++) {
      da.v[i] += dy.v[i];
      db.v[i] += dy.v[i];
    }
  });
}

int Graph::add_bias_hw(int x, int bias_node) {
  const Tensor& in = nodes_[x].val;
  const Tensor& bias = nodes_[bias_node].val;
  if (bias.c != in.c || bias.hw() != 1) throw ValidationError("add_bias_hw: bad bias shape");
  Tensor out(in.c, in.h, in.w);
  for (int c = 0; c < in.c; c++)
    for (int i = 0; i < in.hw(); i++)
      out.v[size_t(c) * in.hw() + i] = in.v[size_t(c) * in.hw() + i] + bias.v[c];
  return push(std::move(out), [x, bias_node](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.nodes_[x].grad;
    Tensor& db = g.nodes_[bias_node].grad;
    int hw = dx.hw();
    for (int c = 0; c < dx.c; c++) {
      double s = 0;
      for (int i = 0; i < hw; i++) {
        dx.v[size_t(c) * hw + i] += dy.v[size_t(c) * hw + i];
        s += dy.v[size_t(c) * hw + i];
      }
      db.v[c] += s;
    }
  });
}

int Graph::concat_ch(int a, int b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  if (ta.h != tb.h || ta.w != tb.w) throw ValidationError("concat_ch: spatial mismatch");
  Tensor out(ta.c + tb.c, ta.h, ta.w);
  std::copy(ta.v.begin(), ta.v.end(), out.v.begin());
  std::copy(tb.v.begin(), tb.v.end(), out.v.begin() + ta.size());
  return push(std::move(out), [a, b](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& da = g.nodes_[a].grad;
    Tensor& db = g.nodes_[b].grad;
    for (size_t i = 0; i < da.size(); i++) da.v[i] += dy.v[i];
    for (size_t i = 0; i < db.size(); i++) db.v[i] += dy.v[da.size() + i];
  });
}

int Graph::upsample2(int x) {
  const Tensor& in = nodes_[x].val;
  Tensor out(in.c, in.h * 2, in.w * 2);
  for (int c = 0; c < in.c; c++)
    for (int y = 0; y < out.h; y++)
      for (int px = 0; px < out.w; px++) out.at(c, y, px) = in.at(c, y / 2, px / 2);
  return push(std::move(out), [x](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.nodes_[x].grad;
    for (int c = 0; c < dy.c; c++)
      for (int y = 0; y < dy.h; y++)
        for (int px = 0; px < dy.w; px++) dx.at(c, y / 2, px / 2) += dy.at(c, y, px);
  });
}

int Graph::global_avg_pool(int x) {
  const Tensor& in = nodes_[x].val;
  Tensor out(in.c, 1, 1);
  for (int c = 0; c < in.c; c++) {
    double s = 0;
    for (int i = 0; i < in.hw(); i++) s += in.v[size_t(c) * in.hw() + i];
    out.v[c] = s / in.hw();
  }
  return push(std::move(out), [x](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    Tensor& dx = g.nodes_[x].grad;
    int hw = dx.hw();
    for (int c = 0; c < dx.c; c++) {
      double d = dy.v[c] / hw;
      for (int i = 0; i < hw; i++) dx.v[size_t(c) * hw + i] += d;
    }
  });
}

int Graph::linear(int x, int wid, int bid) {
  const Tensor& in = nodes_[x].val;
  const auto& wp = params_.at(wid);
  const int cout = wp.shape[0], cin = wp.shape[1];
  if (in.c != cin || in.hw() != 1) throw ValidationError("linear: bad input for " + wp.name);
  Tensor out(cout, 1, 1);
  const auto& bb = params_.at(bid).w;
  for (int o = 0; o < cout; o++) {
    double s = bb[o];
    const double* row = &wp.w[size_t(o) * cin];
    for (int i = 0; i < cin; i++) s += row[i] * in.v[i];
    out.v[o] = s;
  }
  return push(std::move(out), [x, wid, bid, cout, cin](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    const Tensor& in = g.nodes_[x].val;
    Tensor& dx = g.nodes_[x].grad;
    auto& wp = g.params_.at(wid);
    auto& bp = g.params_.at(bid);
    for (int o = 0; o < cout; o++) {
      double d = dy.v[o];
      if (wp.trainable) {
        bp.g[o] += d;
        for (int i = 0; i < cin; i++) wp.g[size_t(o) * cin + i] += d * in.v[i];
      }
      const double* row = &wp.w[size_t(o) * cin];
      for (int i = 0; i < cin; i++) dx.v[i] += d * row[i];
    }
  });
}

int Graph::attention(int x, int gnw, int gnb, int groups, int wqkv, int bqkv, int wproj,
                     int bproj) {
  int normed = group_norm(x, gnw, gnb, groups);
  const Tensor& in = nodes_[normed].val;
  const int C = in.c, N = in.hw();
  const double scale = 1.0 / std::sqrt(double(C));

  // Token-major copies: X (N x C).
  auto X = std::make_shared<std::vector<double>>(size_t(N) * C);
  for (int c = 0; c < C; c++)
    for (int n = 0; n < N; n++) (*X)[size_t(n) * C + c] = in.v[size_t(c) * N + n];

  const auto& wq = params_.at(wqkv);  // (3C, C)
  const auto& bq = params_.at(bqkv).w;
  auto QKV = std::make_shared<std::vector<double>>(size_t(N) * 3 * C);
  gemm(false, true, N, 3 * C, C, 1.0, X->data(), wq.w.data(), 0.0, QKV->data());
  for (int n = 0; n < N; n++)
    for (int j = 0; j < 3 * C; j++) (*QKV)[size_t(n) * 3 * C + j] += bq[j];

  auto Q = std::make_shared<std::vector<double>>(size_t(N) * C);
  auto K = std::make_shared<std::vector<double>>(size_t(N) * C);
  auto V = std::make_shared<std::vector<double>>(size_t(N) * C);
  for (int n = 0; n < N; n++)
    for (int c = 0; c < C; c++) {
      (*Q)[size_t(n) * C + c] = (*QKV)[size_t(n) * 3 * C + c];
      (*K)[size_t(n) * C + c] = (*QKV)[size_t(n) * 3 * C + C + c];
      (*V)[size_t(n) * C + c] = (*QKV)[size_t(n) * 3 * C + 2 * C + c];
    }

  auto P = std::make_shared<std::vector<double>>(size_t(N) * N);
  gemm(false, true, N, N, C, scale, Q->data(), K->data(), 0.0, P->data());
  for (int n = 0; n < N; n++) {
    double* row = &(*P)[size_t(n) * N];
    double mx = row[0];
    for (int j = 1; j < N; j++) mx = std::max(mx, row[j]);
    double z = 0;
    for (int j = 0; j < N; j++) {
      row[j] = std::exp(row[j] - mx);
      z += row[j];
    }
    for (int j = 0; j < N; j++) row[j] /= z;
  }

  auto O = std::make_shared<std::vector<double>>(size_t(N) * C);
  gemm(false, false, N, C, N, 1.0, P->data(), V->data(), 0.0, O->data());

  const auto& wpj = params_.at(wproj);  // (C, C)
  const auto& bpj = params_.at(bproj).w;
  std::vector<double> Y(size_t(N) * C);
  gemm(false, true, N, C, C, 1.0, O->data(), wpj.w.data(), 0.0, Y.data());

  // Residual add, back to channel-major.
  const Tensor& res = nodes_[x].val;
  Tensor out(res.c, res.h, res.w);
  for (int c = 0; c < C; c++)
    for (int n = 0; n < N; n++)
      out.v[size_t(c) * N + n] = res.v[size_t(c) * N + n] + Y[size_t(n) * C + c] + bpj[c];

  return push(std::move(out), [x, normed, wqkv, bqkv, wproj, bproj, X, Q, K, V, P, O, C, N,
                               scale](Graph& g, int self) {
    const Tensor& dy = g.nodes_[self].grad;
    // Residual path.
    Tensor& dres = g.nodes_[x].grad;
    for (size_t i = 0; i < dy.size(); i++) dres.v[i] += dy.v[i];

    // dY token-major.
    std::vector<double> dY(size_t(N) * C);
    for (int c = 0; c < C; c++)
      for (int n = 0; n < N; n++) dY[size_t(n) * C + c] = dy.v[size_t(c) * N + n];

    auto& wpj = g.params_.at(wproj);
    auto& bpj = g.params_.at(bproj);
    if (wpj.trainable) {
      gemm(true, false, C, C, N, 1.0, dY.data(), O->data(), 1.0, wpj.g.data());
      for (int n = 0; n < N; n++)
        for (int c = 0; c < C; c++) bpj.g[c] += dY[size_t(n) * C + c];
    }
    std::vector<double> dO(size_t(N) * C);
    gemm(false, false, N, C, C, 1.0, dY.data(), wpj.w.data(), 0.0, dO.data());

    std::vector<double> dP(size_t(N) * N);
    gemm(false, true, N, N, C, 1.0, dO.data(), V->data(), 0.0, dP.data());
    std::vector<double> dV(size_t(N) * C);
    gemm(true, false, N, C, N, 1.0, P->data(), dO.data(), 0.0, dV.data());

    // Softmax backward (row-wise).
    std::vector<double> dS(size_t(N) * N);
    for (int n = 0; n < N; n++) {
      const double* p = &(*P)[size_t(n) * N];
      const double* dp = &dP[size_t(n) * N];
      double dot = 0;
      for (int j = 0; j < N; j++) dot += p[j] * dp[j];
      for (int j = 0; j < N; j++) dS[size_t(n) * N + j] = p[j] * (dp[j] - dot);
    }

    std::vector<double> dQ(size_t(N) * C), dK(size_t(N) * C);
    gemm(false, false, N, C, N, scale, dS.data(), K->data(), 0.0, dQ.data());
    gemm(true, false, N, C, N, scale, dS.data(), Q->data(), 0.0, dK.data());

    std::vector<double> dQKV(size_t(N) * 3 * C);
    for (int n = 0; n < N; n++)
      for (int c = 0; c < C; c++) {
        dQKV[size_t(n) * 3 * C + c] = dQ[size_t(n) * C + c];
        dQKV[size_t(n) * 3 * C + C + c] = dK[size_t(n) * C + c];
        dQKV[size_t(n) * 3 * C + 2 * C + c] = dV[size_t(n) * C + c];
      }

    auto& wq = g.params_.at(wqkv);
    auto& bq = g.params_.at(bqkv);
    if (wq.trainable) {
      gemm(true, false, 3 * C, C, N, 1.0, dQKV.data(), X->data(), 1.0, wq.g.data());
      for (int n = 0; n < N; n++)
        for (int j = 0; j < 3 * C; j++) bq.g[j] += dQKV[size_t(n) * 3 * C + j];
    }
    std::vector<double> dX(size_t(N) * C);
    gemm(false, false, N, C, 3 * C, 1.0, dQKV.data(), wq.w.data(), 0.0, dX.data());

    Tensor& dnorm = g.nodes_[normed].grad;
    for (int c = 0; c < C; c++)
      for (int n = 0; n < N; n++) dnorm.v[size_t(c) * N + n] += dX[size_t(n) * C + c];
  });
}

int Graph::mse(int pred, Tensor target) {
  const Tensor& p = nodes_[pred].val;
  if (!p.same_shape(target)) throw ValidationError("mse: shape mismatch");
  double s = 0;
  for (size_t i = 0; i < p.size(); i++) {
    double d = p.v[i] - target.v[i];
    s += d * d;
  }
  Tensor out(1, 1, 1);
  out.v[0] = s / double(p.size());
  auto tgt = std::make_shared<Tensor>(std::move(target));
  return push(std::move(out), [pred, tgt](Graph& g, int self) {
    double seed = g.nodes_[self].grad.v[0];
    const Tensor& p = g.nodes_[pred].val;
    Tensor& dp = g.nodes_[pred].grad;
    double k = 2.0 * seed / double(p.size());
    for (size_t i = 0; i < p.size(); i++) dp.v[i] += k * (p.v[i] - tgt->v[i]);
  });
}

void Graph::backward(int loss, double seed) {
  for (auto& node : nodes_) {
    node.grad = Tensor(node.val.c, node.val.h, node.val.w);
  }
  nodes_[loss].grad.v[0] = seed;
  for (int i = loss; i >= 0; i--) {
    if (nodes_[i].back) nodes_[i].back(*this, i);
  }
}

}  // namespace refmv
