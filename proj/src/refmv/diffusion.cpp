// SPDX-License-Identifier: Apache-2.0
#include "refmv/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "refmv/errors.hpp"

namespace refmv {

DiffusionModel::DiffusionModel(const UNetConfig& cfg_, uint64_t seed) : cfg(cfg_) {
  Rng rng(seed);
  unet = UNet(params, rng, cfg, "base");
}

void DiffusionModel::attach_conditioner(uint64_t seed) {
  if (ctrl) throw ValidationError("conditioner already attached");
  Rng rng(Rng::mix(seed, 0x636f6e64));
  ctrl = std::make_unique<MetaControlNet>(params, rng, cfg, "ctrl");
  // Trainable copy of the frozen down/mid chain; heads stay at zero.
  copy_params_by_prefix(params, "base/enc/", "ctrl/enc/");
}

namespace {

// 6-channel denoiser input: noisy grid ++ tiled concept image.
Tensor make_input(const Tensor& x_t, const Tensor& concept_image) {
  Tensor tiled = tile_to_grid(concept_image);
  if (tiled.h != x_t.h || tiled.w != x_t.w)
    throw ValidationError("denoiser input: concept/grid resolution mismatch");
  Tensor in(6, x_t.h, x_t.w);
  std::copy(x_t.v.begin(), x_t.v.end(), in.v.begin());
  std::copy(tiled.v.begin(), tiled.v.end(), in.v.begin() + x_t.size());
  return in;
}

int forward_graph(DiffusionModel& model, Graph& g, const Tensor& x_t, int t,
                  const Tensor& concept_image, const RoutedReference* ref) {
  if (x_t.c != 3 || x_t.h != model.cfg.grid_h() || x_t.w != model.cfg.grid_w())
    throw ValidationError("denoiser_forward: bad x_t shape");
  int emb = model.unet.build_embedding(g, t, concept_image);
  std::array<int, 4> adaptive{};
  bool conditioned = false;
  if (ref && ref->ccms) {
    if (!model.ctrl) throw ValidationError("denoiser_forward: reference without conditioner");
    ControlSignalNodes sig = model.ctrl->forward(g, *ref->ccms, concept_image,
                                                 image_to_tensor(*ref->front_ccm), emb);
    adaptive = sig.y_adaptive;
    conditioned = true;
  }
  int x_in = g.input(make_input(x_t, concept_image));
  return model.unet.forward(g, x_in, emb, conditioned ? &adaptive : nullptr);
}

}  // namespace

Tensor denoiser_forward(DiffusionModel& model, const DiffusionState& state, const Tensor& concept_image,
                        const RoutedReference* ref) {
  Graph g(model.params);
  int out = forward_graph(model, g, state.x_t, state.t, concept_image, ref);
  return g.value(out);
}

double training_loss(const std::vector<TrainSample>& batch, const DenoiserFn& model,
                     const NoiseSchedule& schedule, Rng& rng) {
  if (batch.empty()) return 0.0;
  double total = 0;
  for (const auto& sample : batch) {
    int t = int(rng.uniform_int(1, schedule.T));
    Tensor eps(sample.x0.c, sample.x0.h, sample.x0.w);
    for (auto& v : eps.v) v = rng.normal();
    Tensor x_t = add_noise(sample.x0, t, eps, schedule);
    Tensor pred = model(sample, x_t, t);
    if (!pred.same_shape(eps)) throw ValidationError("training_loss: prediction shape mismatch");
    double mse = 0;
    for (size_t i = 0; i < eps.size(); i++) {
      double d = pred.v[i] - eps.v[i];
      mse += d * d;
    }
    total += mse / double(eps.size());
  }
  return total / double(batch.size());
}

double loss_and_gradients(DiffusionModel& model, const TrainSample& sample, int t,
                          const Tensor& eps, const NoiseSchedule& schedule,
                          const RoutingSchedule* routing, double grad_scale, bool compute_grads) {
  Tensor x_t = add_noise(sample.x0, t, eps, schedule);
  DiffusionState state{std::move(x_t), t, schedule.alpha_bar[t]};

  CCMSet routed;
  Image routed_front;
  RoutedReference ref;
  bool has_ref = sample.ref != nullptr;
  if (has_ref) {
    if (!routing) throw ValidationError("loss_and_gradients: reference without routing schedule");
    routed = route_reference(sample.ref->ccms, *routing, state.signal_level);
    routed_front = route_image(sample.ref->front_ccm, resolution_for(*routing, state.signal_level));
    ref.ccms = &routed;
    ref.front_ccm = &routed_front;
  }

  Graph g(model.params);
  int out = forward_graph(model, g, state.x_t, t, sample.concept_image, has_ref ? &ref : nullptr);
  int loss = g.mse(out, eps);
  double value = g.value(loss).v[0];
  if (compute_grads) g.backward(loss, grad_scale);
  return value;
}

MultiViewGrid sample(DiffusionModel& model, const NoiseSchedule& schedule,
                     const SampleRequest& request) {
  if (request.steps < 1 || request.steps > schedule.T)
    throw ValidationError("sample: steps must be in [1, T]");
  if (request.ref && !request.routing)
    throw ValidationError("sample: reference requires a routing schedule");

  const int R = model.cfg.view_res;
  Rng rng(request.seed);
  Tensor x(3, 3 * R, 2 * R);
  for (auto& v : x.v) v = rng.normal();

  // Uniformly spaced timestep subsequence tau_0 = 0 < ... < tau_steps = T.
  std::vector<int> tau(request.steps + 1);
  for (int i = 0; i <= request.steps; i++)
    tau[i] = int(std::llround(double(i) * schedule.T / request.steps));

  CCMSet routed;
  Image routed_front;
  for (int i = request.steps; i >= 1; i--) {
    int t = tau[i];
    double a = schedule.alpha_bar[t];
    RoutedReference ref;
    if (request.ref) {
      int res = resolution_for(*request.routing, a);
      routed = route_reference(request.ref->ccms, *request.routing, a);
      routed_front = route_image(request.ref->front_ccm, res);
      ref.ccms = &routed;
      ref.front_ccm = &routed_front;
    }
    DiffusionState state{x, t, a};
    Tensor eps_hat = denoiser_forward(model, state, request.concept_image,
                                      request.ref ? &ref : nullptr);

    double sa = std::sqrt(a), sn = std::sqrt(1.0 - a);
    Tensor x0_pred(x.c, x.h, x.w);
    for (size_t j = 0; j < x.size(); j++)
      x0_pred.v[j] = std::clamp((x.v[j] - sn * eps_hat.v[j]) / sa, 0.0, 1.0);

    double a_prev = schedule.alpha_bar[tau[i - 1]];
    double sap = std::sqrt(a_prev), snp = std::sqrt(1.0 - a_prev);
    for (size_t j = 0; j < x.size(); j++) x.v[j] = sap * x0_pred.v[j] + snp * eps_hat.v[j];
  }

  MultiViewGrid grid;
  grid.view_res = R;
  grid.image = tensor_to_image(x, /*clamp01=*/true);
  return grid;
}

}  // namespace refmv
