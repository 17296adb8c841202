// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "refmv/control.hpp"
#include "refmv/grid.hpp"
#include "refmv/routing.hpp"
#include "refmv/schedule.hpp"
#include "refmv/unet.hpp"

namespace refmv {

// Reference conditioning inputs at native resolution: the six protocol-view
// CCMs plus the reference rendered from the concept pose (the "front" CCM fed
// to the pair encoder).
struct ReferenceCondition {
  CCMSet ccms;
  Image front_ccm;
};

// Intermediate state of the reverse process.
struct DiffusionState {
  Tensor x_t;
  int t = 0;
  double signal_level = 1.0;
};

// Base denoiser plus (after attach_conditioner) the meta-ControlNet, sharing
// one parameter store. "base/..." parameters belong to the frozen denoiser,
// "ctrl/..." to the conditioner.
struct DiffusionModel {
  UNetConfig cfg;
  ParamStore params;
  UNet unet;
  std::unique_ptr<MetaControlNet> ctrl;

  DiffusionModel(const UNetConfig& cfg, uint64_t seed);

  // Builds the conditioner: block copies of the frozen down/mid chain, fresh
  // encoders, zero-initialized heads.
  void attach_conditioner(uint64_t seed);
  bool has_conditioner() const { return ctrl != nullptr; }
};

// Routed reference for a single forward call (pointers into caller storage).
struct RoutedReference {
  const CCMSet* ccms = nullptr;
  const Image* front_ccm = nullptr;
};

// One denoiser evaluation. `state.x_t` is the (3, 3R, 2R) grid, `concept_image` the
// (3, R, R) image; `ref`, when present, must already be routed. Conditioning
// signals are added at the skip/mid junctions of the frozen net.
Tensor denoiser_forward(DiffusionModel& model, const DiffusionState& state, const Tensor& concept_image,
                        const RoutedReference* ref);

// Batch item for the training objective.
struct TrainSample {
  Tensor x0;       // clean grid
  Tensor concept_image;  // (3, R, R)
  const ReferenceCondition* ref = nullptr;  // native resolution, optional
};

// Pluggable denoiser so the objective can be exercised with mock models.
using DenoiserFn = std::function<Tensor(const TrainSample&, const Tensor& x_t, int t)>;

// E[ |eps - eps_theta(x_t, t, ...)|^2 ] with t uniform in [1, T].
double training_loss(const std::vector<TrainSample>& batch, const DenoiserFn& model,
                     const NoiseSchedule& schedule, Rng& rng);

// Loss with gradients accumulated into model.params (seeded by grad_scale).
// `ref`, when set, is routed at the signal level of `t` using `routing`.
double loss_and_gradients(DiffusionModel& model, const TrainSample& sample, int t,
                          const Tensor& eps, const NoiseSchedule& schedule,
                          const RoutingSchedule* routing, double grad_scale,
                          bool compute_grads = true);

struct SampleRequest {
  Tensor concept_image;  // (3, R, R)
  const ReferenceCondition* ref = nullptr;
  const RoutingSchedule* routing = nullptr;  // required when ref is set
  int steps = 50;
  uint64_t seed = 0;
};

// Deterministic DDIM-style reverse process; routing picks the reference
// resolution from the signal level at every step.
MultiViewGrid sample(DiffusionModel& model, const NoiseSchedule& schedule,
                     const SampleRequest& request);

}  // namespace refmv
