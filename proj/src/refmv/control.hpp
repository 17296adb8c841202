// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "refmv/raster.hpp"
#include "refmv/unet.hpp"

namespace refmv {

// Node ids of the per-scale control signals inside one forward graph. Each
// array holds one entry per down-block scale plus the mid block.
struct ControlSignalNodes {
  int z_ref = -1, z_pair = -1;
  std::array<int, 4> y_meta1{}, y_meta2{}, y_base{}, y_adaptive{};
};

// Two collaborating subnets over the frozen denoiser:
//  * base net: reference-CCM encoder + a trainable copy of the denoiser's
//    down/mid blocks + zero-conv heads -> y_base
//  * meta net: (concept_image, front-CCM) pair encoder + a half-width block chain
//    with two zero-conv head sets -> y_meta1 (into the base net) and y_meta2
//  y_adaptive = y_base + y_meta2 is what the frozen denoiser consumes.
// All heads start at exactly zero, so an untrained conditioner is a no-op.
struct MetaControlNet {
  UNetConfig cfg;
  int meta_width = 0;

  Conv ref_stem1, ref_stem2;   // 3 -> w -> w over the tiled CCM grid
  EncoderBlocks base_blocks;   // width w, initialized as copies of the frozen blocks
  std::array<Conv, 4> z_base;

  Conv pair_stem1, pair_stem2;  // 6 -> w/2 -> w/2 over the tiled pair
  EncoderBlocks meta_blocks;    // width w/2
  std::array<Conv, 4> z_meta1;  // half-width features -> base-net widths
  std::array<Conv, 4> z_meta2;  // half-width features -> frozen-net widths

  MetaControlNet() = default;
  MetaControlNet(ParamStore& ps, Rng& rng, const UNetConfig& cfg,
                 const std::string& prefix = "ctrl");

  // Feature map of the routed reference CCMs, tiled-grid layout. Throws on a
  // wrong view count or resolution.
  int encode_reference(Graph& g, const CCMSet& ccms) const;
  // Feature map of (concept_image ++ front CCM), tiled to the grid layout so every
  // scale matches the other nets. Both inputs at view resolution.
  int encode_pair(Graph& g, const Tensor& concept_image, const Tensor& front_ccm) const;

  // y_meta1 / y_meta2 from the shared meta trunk.
  std::pair<std::array<int, 4>, std::array<int, 4>> meta_forward(Graph& g, int z_pair,
                                                                 int emb) const;
  // y_meta1 entries are added after each copied block, then zero convs emit
  // y_base.
  std::array<int, 4> base_forward(Graph& g, int z_ref, const std::array<int, 4>& y_meta1,
                                  int emb) const;

  ControlSignalNodes forward(Graph& g, const CCMSet& routed_ccms, const Tensor& concept_image,
                             const Tensor& front_ccm, int emb) const;
};

// Element-wise sum at every scale.
std::array<int, 4> adaptive_signal(Graph& g, const std::array<int, 4>& y_base,
                                   const std::array<int, 4>& y_meta2);

// Copies every parameter named `src_prefix`+rest into `dst_prefix`+rest.
// Shapes must match; missing destinations are an error.
void copy_params_by_prefix(ParamStore& ps, const std::string& src_prefix,
                           const std::string& dst_prefix);

}  // namespace refmv
