/**
 * Copyright 2026 The attrfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ATTRFL_ATTACKS_HPP_
#define ATTRFL_ATTACKS_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attrfl/data.hpp"
#include "attrfl/flcore.hpp"
#include "attrfl/models.hpp"
#include "attrfl/param_vector.hpp"
#include "attrfl/rng.hpp"

namespace attrfl {

enum class AttackMethod { kAttackFree, kLabelFlip, kRandomNoise, kFreeRider, kDirectRef, kLatentOpt };

std::string to_string(AttackMethod m);
AttackMethod parse_attack_method(const std::string &name);

// ---------------------------------------------------------------------------
// Baseline behaviors.

// Trains benignly on a copy of the shard with every label y -> (y + 1) mod C.
ParamVector behavior_label_flip(const ClientContext &ctx);

// Benign update plus N(0, (sigma_rel * |u| / sqrt(dim))^2) per coordinate.
ParamVector behavior_random_noise(const ClientContext &ctx, double sigma_rel);

// Replays the previous global step w_t - w_{t-1}; zero at t = 1.
ParamVector behavior_free_rider(const ClientContext &ctx);

// |u| * r / |r| with r = w_t - w_{t-1} and u the benign update; falls back
// to u when no reference exists.
ParamVector behavior_direct_ref(const ClientContext &ctx);

// ---------------------------------------------------------------------------
// Latent optimization attack.

// Frozen class-prototype decoder: x = P_y + W z.
struct Decoder {
  std::size_t latent_dim = 0;
  Matrix weights;  // input_dim x latent_dim
  std::vector<std::vector<double>> prototypes;
  double scale = 0.0;

  std::size_t input_dim() const { return weights.rows; }
  std::size_t num_classes() const { return prototypes.size(); }
};

// Prototypes are per-class means of `pool`; W is Gaussian, scaled so that
// E|W z| is half the mean pairwise prototype distance for z ~ N(0, I).
Decoder calibrate_decoder(const LabeledBatch &pool, std::size_t num_classes, std::size_t latent_dim, Seed seed);

// Row j of the output is P_{labels[j]} + W z_j.
LabeledBatch decode(const Decoder &dec, const Matrix &z, std::span<const int> labels);

struct AttackBudgets {
  double delta = 0.02;
  double eps = 0.5;
  double kappa = std::numeric_limits<double>::infinity();
  std::size_t c_max = std::numeric_limits<std::size_t>::max();
};

struct LatentHyper {
  std::size_t latent_dim = 8;
  int latent_steps = 5;
  std::size_t synthetic_batch = 16;
  double eta_z = 0.05;
  double intensity = 1.0;
  // Relative finite-difference step for the latent gradient.
  double fd_step = 1e-4;

  // round(intensity * synthetic_batch).
  std::size_t effective_batch() const;
};

struct AttackState {
  Matrix z;  // one latent row per synthetic sample
  int cached_round = 0;
  ParamVector cached_w;
  AttackBudgets budgets;
  LatentHyper hyper;
};

struct JointLossBreakdown {
  double l1 = 0.0;  // 1 - cosine(g, g_ref)
  double l2 = 0.0;  // | |g| - |g_ref| |
  double l3 = 0.0;  // cross-entropy on the decoded batch
  double total = 0.0;
};

JointLossBreakdown joint_loss(const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec, const Matrix &z,
                              std::span<const int> labels, const ParamVector &g_ref);

// Central differences of the joint-loss total over every z entry with step
// rel_step * (1 + |z_j|).
Matrix latent_gradient(const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec, const Matrix &z,
                       std::span<const int> labels, const ParamVector &g_ref, double rel_step);

// Labels drawn uniformly from missing and underrepresented classes of the
// shard, or from all classes when the shard covers everything evenly.
std::vector<int> select_targets(const ClientShard &shard, std::size_t num_classes, std::size_t count, Rng &rng);

struct RefineTrace {
  double loss_before = 0.0;
  double loss_after = 0.0;
  // Number of leading steps that lowered the loss.
  int improving_steps = 0;
  std::vector<int> labels;
};

// B_z descent steps on the joint loss w.r.t. z. `labels_for_step(s)` gives
// the targets used at step s. Returns a new state.
AttackState refine_latent(const AttackState &state, const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec,
                          const std::function<std::vector<int>(int)> &labels_for_step, const ParamVector &g_ref,
                          RefineTrace *trace = nullptr);

AttackState refine_latent(const AttackState &state, const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec,
                          std::span<const int> labels, const ParamVector &g_ref, RefineTrace *trace = nullptr);

// B_s / (shard_size + B_s).
double effective_alpha(std::size_t shard_size, std::size_t synthetic_count);

struct AttackRoundDiagnostics {
  int t = 0;
  JointLossBreakdown loss;
  double loss_before_refine = 0.0;
  int refine_steps = 0;
  int improving_steps = 0;
  std::size_t synthetic_count = 0;
  double effective_alpha = 0.0;
  double norm_before_clip = 0.0;
  bool clipped = false;
};

struct LatentOptResult {
  ParamVector update;
  AttackState state;
  AttackRoundDiagnostics diagnostics;
};

LatentOptResult behavior_latent_opt(const AttackState &state, const Decoder &dec, const ClientContext &ctx);

// Scales u to norm kappa when it exceeds it.
ParamVector clip_norm(ParamVector u, double kappa, bool *clipped = nullptr);

// ---------------------------------------------------------------------------
// ClientBehavior plug-ins.

struct AttackParams {
  AttackMethod method = AttackMethod::kAttackFree;
  double noise_sigma_rel = 1.0;
  LatentHyper latent;
  AttackBudgets budgets;
};

class LatentOptBehavior : public ClientBehavior {
 public:
  LatentOptBehavior(Decoder decoder, LatentHyper hyper, AttackBudgets budgets);
  std::string name() const override { return "latent_opt"; }
  ParamVector update(const ClientContext &ctx) override;

  const AttackState &state() const { return state_; }
  const std::vector<AttackRoundDiagnostics> &diagnostics() const { return diagnostics_; }

 private:
  Decoder decoder_;
  AttackState state_;
  std::vector<AttackRoundDiagnostics> diagnostics_;
};

// `decoder` is only consulted for kLatentOpt.
std::unique_ptr<ClientBehavior> make_behavior(const AttackParams &params, const Decoder *decoder = nullptr);

}  // namespace attrfl

#endif  // ATTRFL_ATTACKS_HPP_
