// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "refmv/vec.hpp"

namespace refmv {

// Right-handed convention: +z is up, azimuth rotates about +z, elevation is
// measured from the horizontal plane, and the camera always looks at the
// origin. Azimuth is stored modulo 360.
struct CameraPose {
  double azimuth_deg = 0;
  double elevation_deg = 0;
  double distance = 1.866;
  double fov_deg = 30;

  CameraPose() = default;
  CameraPose(double az, double el, double dist, double fov);
};

constexpr double kProtocolDistance = 1.866;
constexpr double kProtocolFov = 30.0;

// One concept pose plus the six fixed target poses: absolute elevations
// {20,-10,...} interleaved, azimuths phi+{30,90,...,330}.
struct ViewProtocol {
  CameraPose concept_pose;
  std::array<CameraPose, 6> target_poses;
};

ViewProtocol make_view_protocol(double phi_deg, double concept_elevation_deg = 0.0);

// World->camera frame; camera looks down -z, +y up in view space.
struct CameraFrame {
  vec3 position;
  vec3 right, up, back;  // rows of the world->camera rotation
  double tan_half_fov;

  explicit CameraFrame(const CameraPose& pose);
  vec3 to_camera(const vec3& world) const;
  // Projects a camera-space point to pixel coordinates (continuous, origin at
  // the top-left corner of the image). Valid only for points with z < 0.
  void project(const vec3& cam, int resolution, double& px, double& py) const;
};

}  // namespace refmv
