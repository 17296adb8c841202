// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "refmv/graph.hpp"

namespace refmv {

// Thin layer wrappers: construction registers parameters, operator() builds
// graph nodes.

struct Conv {
  int wid = -1, bid = -1, stride = 1, pad = 1;
  Conv() = default;
  Conv(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, int k, int stride_,
       int pad_, Init init);
  int operator()(Graph& g, int x) const { return g.conv2d(x, wid, bid, stride, pad); }
};

struct LinearLayer {
  int wid = -1, bid = -1;
  LinearLayer() = default;
  LinearLayer(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, Init init);
  int operator()(Graph& g, int x) const { return g.linear(x, wid, bid); }
};

struct Norm {
  int gid = -1, bid = -1, groups = 8;
  Norm() = default;
  Norm(ParamStore& ps, Rng& rng, const std::string& name, int channels, int groups_);
  int operator()(Graph& g, int x) const { return g.group_norm(x, gid, bid, groups); }
};

// GN -> SiLU -> conv, timestep/conditioning vector added per channel, then
// GN -> SiLU -> conv with a residual (1x1 projection when widths differ).
struct ResBlock {
  Norm gn1, gn2;
  Conv conv1, conv2;
  LinearLayer emb_proj;
  Conv skip;
  bool project_skip = false;
  ResBlock() = default;
  ResBlock(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, int emb_dim,
           int groups);
  int operator()(Graph& g, int x, int emb) const;
};

struct AttentionBlock {
  Norm gn;
  int wqkv = -1, bqkv = -1, wproj = -1, bproj = -1;
  AttentionBlock() = default;
  AttentionBlock(ParamStore& ps, Rng& rng, const std::string& name, int channels, int groups);
  int operator()(Graph& g, int x) const {
    return g.attention(x, gn.gid, gn.bid, gn.groups, wqkv, bqkv, wproj, bproj);
  }
};

// The shared down/mid chain: three resolution scales (x1, x1/2, x1/4) with
// widths (w, 2w, 4w) and full-grid self-attention at the coarsest scale.
// Outputs the per-scale features (down0, down1, down2, mid); `inject` adds a
// signal after each of those blocks and feeds it onward through the chain.
struct EncoderBlocks {
  ResBlock down0, down1, down2, mid1, mid2;
  Conv ds0, ds1;
  AttentionBlock attn;
  EncoderBlocks() = default;
  EncoderBlocks(ParamStore& ps, Rng& rng, const std::string& name, int width, int emb_dim,
                int groups);
  std::array<int, 4> run(Graph& g, int x, int emb, const std::array<int, 4>* inject) const;
};

struct UNetConfig {
  int view_res = 32;  // R; the tiled grid is (3R x 2R)
  int width = 32;     // base channel count, multiple of `groups`
  int emb_dim = 64;
  int groups = 8;
  int grid_h() const { return 3 * view_res; }
  int grid_w() const { return 2 * view_res; }
};

// Noise-prediction UNet over the tiled six-view grid. The concept image
// conditions the model twice: tiled and concatenated to the input channels,
// and as a global vector added to the timestep embedding.
struct UNet {
  UNetConfig cfg;
  Conv in_conv;
  EncoderBlocks enc;
  ResBlock up2, up1, up0;
  Norm out_gn;
  Conv out_conv;
  Conv cond_conv1, cond_conv2;
  LinearLayer cond_fc;
  LinearLayer emb_fc1, emb_fc2;

  UNet() = default;
  UNet(ParamStore& ps, Rng& rng, const UNetConfig& cfg, const std::string& prefix = "base");

  // Timestep + concept-image conditioning vector. `concept_image` is (3, R, R).
  int build_embedding(Graph& g, int t, const Tensor& concept_image) const;
  // `x_in` is the 6-channel grid (noisy grid ++ tiled concept_image); `control`, when
  // present, is added to the skip and mid features consumed by the decoder.
  int forward(Graph& g, int x_in, int emb, const std::array<int, 4>* control) const;
};

Tensor sinusoidal_embedding(int t, int dim);

}  // namespace refmv
