// SPDX-License-Identifier: Apache-2.0
#include "refmv/unet.hpp"

#include <cmath>

namespace refmv {

Conv::Conv(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout, int k,
           int stride_, int pad_, Init init)
    : stride(stride_), pad(pad_) {
  wid = ps.add(name + "/w", {cout, cin, k, k}, init, rng);
  bid = ps.add(name + "/b", {cout}, Init::kZero, rng);
}

LinearLayer::LinearLayer(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout,
                         Init init) {
  wid = ps.add(name + "/w", {cout, cin}, init, rng);
  bid = ps.add(name + "/b", {cout}, Init::kZero, rng);
}

Norm::Norm(ParamStore& ps, Rng& rng, const std::string& name, int channels, int groups_)
    : groups(groups_) {
  gid = ps.add(name + "/g", {channels}, Init::kOne, rng);
  bid = ps.add(name + "/b", {channels}, Init::kZero, rng);
}

ResBlock::ResBlock(ParamStore& ps, Rng& rng, const std::string& name, int cin, int cout,
                   int emb_dim, int groups)
    : gn1(ps, rng, name + "/gn1", cin, groups),
      gn2(ps, rng, name + "/gn2", cout, groups),
      conv1(ps, rng, name + "/conv1", cin, cout, 3, 1, 1, Init::kHeNormal),
      conv2(ps, rng, name + "/conv2", cout, cout, 3, 1, 1, Init::kHeNormal),
      emb_proj(ps, rng, name + "/emb", emb_dim, cout, Init::kHeNormal),
      project_skip(cin != cout) {
  if (project_skip) skip = Conv(ps, rng, name + "/skip", cin, cout, 1, 1, 0, Init::kHeNormal);
}

int ResBlock::operator()(Graph& g, int x, int emb) const {
  int h = conv1(g, g.silu(gn1(g, x)));
  h = g.add_bias_hw(h, emb_proj(g, g.silu(emb)));
  h = conv2(g, g.silu(gn2(g, h)));
  return g.add(h, project_skip ? skip(g, x) : x);
}

AttentionBlock::AttentionBlock(ParamStore& ps, Rng& rng, const std::string& name, int channels,
                               int groups)
    : gn(ps, rng, name + "/gn", channels, groups) {
  wqkv = ps.add(name + "/qkv/w", {3 * channels, channels}, Init::kHeNormal, rng);
  bqkv = ps.add(name + "/qkv/b", {3 * channels}, Init::kZero, rng);
  wproj = ps.add(name + "/proj/w", {channels, channels}, Init::kHeNormal, rng);
  bproj = ps.add(name + "/proj/b", {channels}, Init::kZero, rng);
}

EncoderBlocks::EncoderBlocks(ParamStore& ps, Rng& rng, const std::string& name, int width,
                             int emb_dim, int groups)
    : down0(ps, rng, name + "/down0", width, width, emb_dim, groups),
      down1(ps, rng, name + "/down1", 2 * width, 2 * width, emb_dim, groups),
      down2(ps, rng, name + "/down2", 4 * width, 4 * width, emb_dim, groups),
      mid1(ps, rng, name + "/mid1", 4 * width, 4 * width, emb_dim, groups),
      mid2(ps, rng, name + "/mid2", 4 * width, 4 * width, emb_dim, groups),
      ds0(ps, rng, name + "/ds0", width, 2 * width, 3, 2, 1, Init::kHeNormal),
      ds1(ps, rng, name + "/ds1", 2 * width, 4 * width, 3, 2, 1, Init::kHeNormal),
      attn(ps, rng, name + "/attn", 4 * width, groups) {}

std::array<int, 4> EncoderBlocks::run(Graph& g, int x, int emb,
                                      const std::array<int, 4>* inject) const {
  int h0 = down0(g, x, emb);
  if (inject) h0 = g.add(h0, (*inject)[0]);
  int h1 = down1(g, ds0(g, h0), emb);
  if (inject) h1 = g.add(h1, (*inject)[1]);
  int h2 = down2(g, ds1(g, h1), emb);
  if (inject) h2 = g.add(h2, (*inject)[2]);
  int m = mid2(g, attn(g, mid1(g, h2, emb)), emb);
  if (inject) m = g.add(m, (*inject)[3]);
  return {h0, h1, h2, m};
}

UNet::UNet(ParamStore& ps, Rng& rng, const UNetConfig& cfg_, const std::string& prefix)
    : cfg(cfg_),
      in_conv(ps, rng, prefix + "/in", 6, cfg_.width, 3, 1, 1, Init::kHeNormal),
      enc(ps, rng, prefix + "/enc", cfg_.width, cfg_.emb_dim, cfg_.groups),
      up2(ps, rng, prefix + "/up2", 8 * cfg_.width, 2 * cfg_.width, cfg_.emb_dim, cfg_.groups),
      up1(ps, rng, prefix + "/up1", 4 * cfg_.width, cfg_.width, cfg_.emb_dim, cfg_.groups),
      up0(ps, rng, prefix + "/up0", 2 * cfg_.width, cfg_.width, cfg_.emb_dim, cfg_.groups),
      out_gn(ps, rng, prefix + "/out_gn", cfg_.width, cfg_.groups),
      // Zero-initialized output head: the untrained model predicts zero noise.
      out_conv(ps, rng, prefix + "/out", cfg_.width, 3, 3, 1, 1, Init::kZero),
      cond_conv1(ps, rng, prefix + "/cond1", 3, cfg_.width, 3, 2, 1, Init::kHeNormal),
      cond_conv2(ps, rng, prefix + "/cond2", cfg_.width, cfg_.width, 3, 2, 1, Init::kHeNormal),
      cond_fc(ps, rng, prefix + "/cond_fc", cfg_.width, cfg_.emb_dim, Init::kHeNormal),
      emb_fc1(ps, rng, prefix + "/emb1", cfg_.emb_dim, cfg_.emb_dim, Init::kHeNormal),
      emb_fc2(ps, rng, prefix + "/emb2", cfg_.emb_dim, cfg_.emb_dim, Init::kHeNormal) {}

int UNet::build_embedding(Graph& g, int t, const Tensor& concept_image) const {
  int sinus = g.input(sinusoidal_embedding(t, cfg.emb_dim));
  int e = emb_fc2(g, g.silu(emb_fc1(g, sinus)));
  int c = g.input(concept_image);
  c = g.silu(cond_conv1(g, c));
  c = g.silu(cond_conv2(g, c));
  int pooled = g.global_avg_pool(c);
  return g.add(e, cond_fc(g, pooled));
}

int UNet::forward(Graph& g, int x_in, int emb, const std::array<int, 4>* control) const {
  int x = in_conv(g, x_in);
  std::array<int, 4> feats = enc.run(g, x, emb, nullptr);
  if (control)
    for (int i = 0; i < 4; i++) feats[i] = g.add(feats[i], (*control)[i]);
  int u2 = up2(g, g.concat_ch(feats[3], feats[2]), emb);
  int u1 = up1(g, g.concat_ch(g.upsample2(u2), feats[1]), emb);
  int u0 = up0(g, g.concat_ch(g.upsample2(u1), feats[0]), emb);
  return out_conv(g, g.silu(out_gn(g, u0)));
}

Tensor sinusoidal_embedding(int t, int dim) {
  Tensor e(dim, 1, 1);
  int half = dim / 2;
  for (int k = 0; k < half; k++) {
    double freq = std::exp(-std::log(10000.0) * double(k) / double(half));
    e.v[k] = std::sin(t * freq);
    e.v[half + k] = std::cos(t * freq);
  }
  return e;
}

}  // namespace refmv
