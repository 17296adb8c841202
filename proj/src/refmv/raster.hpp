// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "refmv/camera.hpp"
#include "refmv/image.hpp"
#include "refmv/mesh.hpp"

namespace refmv {

// Six canonical-coordinate-map views plus their coverage masks. Background is
// exactly white; a foreground pixel value v encodes the canonical coordinate
// c = 2v - 1 of the visible surface point.
struct CCMSet {
  std::array<Image, 6> views;
  std::array<Image, 6> masks;
  int resolution = 0;
};

// Z-buffered perspective rasterization of the canonical coordinate map.
// Pixel-center coverage with top-left tie-break; white background.
void render_ccm(const TriMesh& mesh, const CameraPose& pose, int resolution, Image& image,
                Image& mask);

// Flat-shaded render: per-face albedo times a Lambert term with a headlight
// at the camera, plus a small ambient floor. White background.
Image render_target(const TriMesh& mesh, const CameraPose& pose, int resolution);

// CCMs for the six target poses of a protocol.
CCMSet render_ccm_set(const TriMesh& mesh, const ViewProtocol& protocol, int resolution);

}  // namespace refmv
