// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "refmv/raster.hpp"

namespace refmv {

// Reference resolution as a function of the diffusion signal level
// (alpha_bar: 0 = pure noise, 1 = clean). Coarse references early in the
// reverse process, full detail late.
struct RoutingTier {
  double lo = 0, hi = 1;  // [lo, hi), last tier closed at 1
  int resolution = 0;
};

struct RoutingSchedule {
  std::vector<RoutingTier> tiers;  // partition of [0,1], resolutions increasing
  int native_resolution = 0;
};

// Native 320 uses the 16/32/64 tiers at [0,0.05)/[0.05,0.4)/[0.4,1]; other
// native sizes scale to R/4, R/2, R over the same intervals.
RoutingSchedule default_routing_schedule(int native_resolution);

// Validates the partition/monotonicity invariants; throws ValidationError.
void validate_routing_schedule(const RoutingSchedule& schedule);

int resolution_for(const RoutingSchedule& schedule, double signal_level);

// Nearest-neighbor downsample to the tier resolution and back up to native;
// masks routed identically.
CCMSet route_reference(const CCMSet& ccms, const RoutingSchedule& schedule, double signal_level);
Image route_image(const Image& img, int tier_resolution);

}  // namespace refmv
