// SPDX-License-Identifier: Apache-2.0
#include "refmv/routing.hpp"

#include <cmath>

#include "refmv/errors.hpp"

namespace refmv {

RoutingSchedule default_routing_schedule(int native_resolution) {
  RoutingSchedule s;
  s.native_resolution = native_resolution;
  int r0, r1, r2;
  if (native_resolution == 320) {
    r0 = 16;
    r1 = 32;
    r2 = 64;
  } else {
    r0 = std::max(1, native_resolution / 4);
    r1 = std::max(1, native_resolution / 2);
    r2 = native_resolution;
  }
  s.tiers = {{0.0, 0.05, r0}, {0.05, 0.4, r1}, {0.4, 1.0, r2}};
  validate_routing_schedule(s);
  return s;
}

void validate_routing_schedule(const RoutingSchedule& s) {
  if (s.tiers.empty()) throw ValidationError("routing: empty schedule");
  if (s.tiers.front().lo != 0.0 || s.tiers.back().hi != 1.0)
    throw ValidationError("routing: tiers must cover [0,1]");
  for (size_t i = 0; i < s.tiers.size(); i++) {
    if (s.tiers[i].hi <= s.tiers[i].lo) throw ValidationError("routing: empty tier interval");
    if (i > 0) {
      if (s.tiers[i].lo != s.tiers[i - 1].hi)
        throw ValidationError("routing: tiers must partition [0,1]");
      if (s.tiers[i].resolution <= s.tiers[i - 1].resolution)
        throw ValidationError("routing: resolutions must increase with signal level");
    }
  }
  if (s.native_resolution > 0 && s.tiers.back().resolution > s.native_resolution)
    throw ValidationError("routing: tier resolution above native");
}

int resolution_for(const RoutingSchedule& schedule, double signal_level) {
  if (signal_level < 0.0 || signal_level > 1.0)
    throw ValidationError("resolution_for: signal level out of [0,1]");
  for (size_t i = 0; i < schedule.tiers.size(); i++) {
    const auto& tier = schedule.tiers[i];
    bool last = i + 1 == schedule.tiers.size();
    if (signal_level >= tier.lo && (signal_level < tier.hi || (last && signal_level <= tier.hi)))
      return tier.resolution;
  }
  throw ValidationError("resolution_for: no tier matched");  // unreachable after validate
}

namespace {
Image resample_nearest(const Image& in, int out_res) {
  Image out(out_res, out_res, in.channels);
  for (int y = 0; y < out_res; y++) {
    int sy = std::min(in.height - 1, int((y + 0.5) * in.height / out_res));
    for (int x = 0; x < out_res; x++) {
      int sx = std::min(in.width - 1, int((x + 0.5) * in.width / out_res));
      for (int c = 0; c < in.channels; c++) out.at(x, y, c) = in.at(sx, sy, c);
    }
  }
  return out;
}
}  // namespace

Image route_image(const Image& img, int tier_resolution) {
  if (tier_resolution == img.width && tier_resolution == img.height) return img;
  Image down = resample_nearest(img, tier_resolution);
  return resample_nearest(down, img.width);
}

CCMSet route_reference(const CCMSet& ccms, const RoutingSchedule& schedule, double signal_level) {
  int res = resolution_for(schedule, signal_level);
  CCMSet out;
  out.resolution = ccms.resolution;
  for (int i = 0; i < 6; i++) {
    out.views[i] = route_image(ccms.views[i], res);
    out.masks[i] = route_image(ccms.masks[i], res);
  }
  return out;
}

}  // namespace refmv
