// SPDX-License-Identifier: Apache-2.0
#include "refmv/control.hpp"

#include "refmv/errors.hpp"
#include "refmv/grid.hpp"

namespace refmv {

MetaControlNet::MetaControlNet(ParamStore& ps, Rng& rng, const UNetConfig& cfg_,
                               const std::string& prefix)
    : cfg(cfg_),
      meta_width(cfg_.width / 2),
      ref_stem1(ps, rng, prefix + "/ref_stem1", 3, cfg_.width, 3, 1, 1, Init::kHeNormal),
      ref_stem2(ps, rng, prefix + "/ref_stem2", cfg_.width, cfg_.width, 3, 1, 1, Init::kHeNormal),
      base_blocks(ps, rng, prefix + "/enc", cfg_.width, cfg_.emb_dim, cfg_.groups),
      pair_stem1(ps, rng, prefix + "/pair_stem1", 6, meta_width, 3, 1, 1, Init::kHeNormal),
      pair_stem2(ps, rng, prefix + "/pair_stem2", meta_width, meta_width, 3, 1, 1,
                 Init::kHeNormal),
      meta_blocks(ps, rng, prefix + "/meta", meta_width, cfg_.emb_dim, cfg_.groups) {
  if (cfg_.width % (2 * cfg_.groups) != 0)
    throw ValidationError("MetaControlNet: width must be a multiple of 2*groups");
  const int w = cfg_.width, mw = meta_width;
  const int scale_w[4] = {w, 2 * w, 4 * w, 4 * w};
  const int meta_w[4] = {mw, 2 * mw, 4 * mw, 4 * mw};
  for (int i = 0; i < 4; i++) {
    std::string n = std::to_string(i);
    z_base[i] = Conv(ps, rng, prefix + "/z_base" + n, scale_w[i], scale_w[i], 1, 1, 0, Init::kZero);
    z_meta1[i] =
        Conv(ps, rng, prefix + "/z_meta1_" + n, meta_w[i], scale_w[i], 1, 1, 0, Init::kZero);
    z_meta2[i] =
        Conv(ps, rng, prefix + "/z_meta2_" + n, meta_w[i], scale_w[i], 1, 1, 0, Init::kZero);
  }
}

int MetaControlNet::encode_reference(Graph& g, const CCMSet& ccms) const {
  for (const auto& v : ccms.views)
    if (v.width != ccms.resolution || v.height != ccms.resolution || v.channels != 3)
      throw ValidationError("encode_reference: bad CCM view");
  int x = g.input(grid_tensor_from_views(ccms.views));
  return ref_stem2(g, g.silu(ref_stem1(g, x)));
}

int MetaControlNet::encode_pair(Graph& g, const Tensor& concept_image, const Tensor& front_ccm) const {
  if (concept_image.c != 3 || front_ccm.c != 3 || concept_image.h != front_ccm.h ||
      concept_image.w != front_ccm.w || concept_image.h != concept_image.w)
    throw ValidationError("encode_pair: resolution mismatch");
  Tensor pair(6, concept_image.h, concept_image.w);
  std::copy(concept_image.v.begin(), concept_image.v.end(), pair.v.begin());
  std::copy(front_ccm.v.begin(), front_ccm.v.end(), pair.v.begin() + concept_image.size());
  int x = g.input(tile_to_grid(pair));
  return pair_stem2(g, g.silu(pair_stem1(g, x)));
}

std::pair<std::array<int, 4>, std::array<int, 4>> MetaControlNet::meta_forward(Graph& g,
                                                                               int z_pair,
                                                                               int emb) const {
  std::array<int, 4> feats = meta_blocks.run(g, z_pair, emb, nullptr);
  std::array<int, 4> y1{}, y2{};
  for (int i = 0; i < 4; i++) {
    y1[i] = z_meta1[i](g, feats[i]);
    y2[i] = z_meta2[i](g, feats[i]);
  }
  return {y1, y2};
}

std::array<int, 4> MetaControlNet::base_forward(Graph& g, int z_ref,
                                                const std::array<int, 4>& y_meta1,
                                                int emb) const {
  std::array<int, 4> feats = base_blocks.run(g, z_ref, emb, &y_meta1);
  std::array<int, 4> y{};
  for (int i = 0; i < 4; i++) y[i] = z_base[i](g, feats[i]);
  return y;
}

std::array<int, 4> adaptive_signal(Graph& g, const std::array<int, 4>& y_base,
                                   const std::array<int, 4>& y_meta2) {
  std::array<int, 4> out{};
  for (int i = 0; i < 4; i++) out[i] = g.add(y_base[i], y_meta2[i]);
  return out;
}

ControlSignalNodes MetaControlNet::forward(Graph& g, const CCMSet& routed_ccms,
                                           const Tensor& concept_image, const Tensor& front_ccm,
                                           int emb) const {
  ControlSignalNodes s;
  s.z_pair = encode_pair(g, concept_image, front_ccm);
  auto [y1, y2] = meta_forward(g, s.z_pair, emb);
  s.y_meta1 = y1;
  s.y_meta2 = y2;
  s.z_ref = encode_reference(g, routed_ccms);
  s.y_base = base_forward(g, s.z_ref, s.y_meta1, emb);
  s.y_adaptive = adaptive_signal(g, s.y_base, s.y_meta2);
  return s;
}

void copy_params_by_prefix(ParamStore& ps, const std::string& src_prefix,
                           const std::string& dst_prefix) {
  for (auto& e : ps.entries()) {
    if (e.name.rfind(dst_prefix, 0) != 0) continue;
    std::string src_name = src_prefix + e.name.substr(dst_prefix.size());
    int src = ps.find(src_name);
    if (src < 0) throw ValidationError("copy_params_by_prefix: missing source " + src_name);
    const auto& se = ps.at(src);
    if (se.w.size() != e.w.size())
      throw ValidationError("copy_params_by_prefix: shape mismatch at " + e.name);
    e.w = se.w;
  }
}

}  // namespace refmv
