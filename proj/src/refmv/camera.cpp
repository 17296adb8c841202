// SPDX-License-Identifier: Apache-2.0
#include "refmv/camera.hpp"

#include <cmath>

#include "refmv/errors.hpp"

namespace refmv {

namespace {
double wrap_degrees(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0) w += 360.0;
  return w;
}
}  // namespace

CameraPose::CameraPose(double az, double el, double dist, double fov)
    : azimuth_deg(wrap_degrees(az)), elevation_deg(el), distance(dist), fov_deg(fov) {
  if (distance <= 0) throw ValidationError("CameraPose: distance must be > 0");
  if (fov_deg <= 0 || fov_deg >= 180) throw ValidationError("CameraPose: fov out of (0,180)");
}

ViewProtocol make_view_protocol(double phi_deg, double concept_elevation_deg) {
  ViewProtocol proto;
  proto.concept_pose = CameraPose(phi_deg, concept_elevation_deg, kProtocolDistance, kProtocolFov);
  constexpr double rel_azimuth[6] = {30, 90, 150, 210, 270, 330};
  constexpr double elevation[6] = {20, -10, 20, -10, 20, -10};
  for (int i = 0; i < 6; i++)
    proto.target_poses[i] =
        CameraPose(phi_deg + rel_azimuth[i], elevation[i], kProtocolDistance, kProtocolFov);
  return proto;
}

CameraFrame::CameraFrame(const CameraPose& pose) {
  double az = radians(pose.azimuth_deg);
  double el = radians(pose.elevation_deg);
  position = vec3{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)} *
             pose.distance;
  vec3 forward = normalize(vec3{0, 0, 0} - position);
  vec3 world_up{0, 0, 1};
  // Degenerate straight-up/down poses fall back to a fixed right axis.
  vec3 r = cross(forward, world_up);
  if (length(r) < 1e-12) r = {0, 1, 0};
  right = normalize(r);
  up = cross(right, forward);
  back = forward * -1.0;
  tan_half_fov = std::tan(radians(pose.fov_deg) * 0.5);
}

vec3 CameraFrame::to_camera(const vec3& world) const {
  vec3 d = world - position;
  return {dot(d, right), dot(d, up), dot(d, back)};
}

void CameraFrame::project(const vec3& cam, int resolution, double& px, double& py) const {
  double inv = 1.0 / (-cam.z);
  double u = cam.x * inv / tan_half_fov;  // NDC in [-1,1]
  double v = cam.y * inv / tan_half_fov;
  px = (u * 0.5 + 0.5) * resolution;
  py = (0.5 - v * 0.5) * resolution;
}

}  // namespace refmv
