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

#include "attrfl/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace attrfl {

std::string to_string(AttackMethod m) {
  switch (m) {
    case AttackMethod::kAttackFree:
      return "attack_free";
    case AttackMethod::kLabelFlip:
      return "label_flip";
    case AttackMethod::kRandomNoise:
      return "random_noise";
    case AttackMethod::kFreeRider:
      return "free_rider";
    case AttackMethod::kDirectRef:
      return "direct_ref";
    case AttackMethod::kLatentOpt:
      return "latent_opt";
  }
  return "attack_free";
}

AttackMethod parse_attack_method(const std::string &name) {
  if (name == "attack_free" || name == "none") return AttackMethod::kAttackFree;
  if (name == "label_flip") return AttackMethod::kLabelFlip;
  if (name == "random_noise") return AttackMethod::kRandomNoise;
  if (name == "free_rider") return AttackMethod::kFreeRider;
  if (name == "direct_ref") return AttackMethod::kDirectRef;
  if (name == "latent_opt") return AttackMethod::kLatentOpt;
  throw std::invalid_argument("unknown attack method: " + name);
}

namespace {

ParamVector benign(const ClientContext &ctx) {
  return benign_local_update(*ctx.spec, ctx.w_t(), *ctx.shard, ctx.sgd, ctx.train_seed);
}

// w_t - w_{t-1}, or zero in the first round.
ParamVector global_delta(const ClientContext &ctx) {
  if (ctx.history.size() < 2) return ParamVector(ctx.w_t().size());
  return ctx.history[ctx.history.size() - 1] - ctx.history[ctx.history.size() - 2];
}

}  // namespace

ParamVector behavior_label_flip(const ClientContext &ctx) {
  const auto C = static_cast<int>(ctx.spec->num_classes());
  ClientShard flipped = *ctx.shard;
  for (int &y : flipped.data.labels) y = (y + 1) % C;
  std::rotate(flipped.class_counts.rbegin(), flipped.class_counts.rbegin() + 1, flipped.class_counts.rend());
  return benign_local_update(*ctx.spec, ctx.w_t(), flipped, ctx.sgd, ctx.train_seed);
}

ParamVector behavior_random_noise(const ClientContext &ctx, double sigma_rel) {
  if (sigma_rel < 0.0) throw std::invalid_argument("random_noise: sigma_rel must be >= 0");
  ParamVector u = benign(ctx);
  if (sigma_rel == 0.0) return u;
  const double sd = sigma_rel * u.norm() / std::sqrt(static_cast<double>(u.size()));
  Rng rng(ctx.behavior_seed);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += sd * standard_normal(rng);
  return u;
}

ParamVector behavior_free_rider(const ClientContext &ctx) { return global_delta(ctx); }

ParamVector behavior_direct_ref(const ClientContext &ctx) {
  ParamVector u = benign(ctx);
  const ParamVector r = global_delta(ctx);
  const double rn = r.norm();
  if (rn == 0.0) return u;
  return (u.norm() / rn) * r;
}

Decoder calibrate_decoder(const LabeledBatch &pool, std::size_t num_classes, std::size_t latent_dim, Seed seed) {
  if (latent_dim == 0) throw std::invalid_argument("calibrate_decoder: latent_dim must be positive");
  const std::size_t D = pool.dim();
  Decoder dec;
  dec.latent_dim = latent_dim;
  dec.prototypes.assign(num_classes, std::vector<double>(D, 0.0));
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t r = 0; r < pool.size(); ++r) {
    const int y = pool.labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) throw std::invalid_argument("calibrate_decoder: bad label");
    const auto x = pool.inputs.row(r);
    auto &proto = dec.prototypes[static_cast<std::size_t>(y)];
    for (std::size_t d = 0; d < D; ++d) proto[d] += x[d];
    ++counts[static_cast<std::size_t>(y)];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("calibrate_decoder: pool is missing class " + std::to_string(c));
    for (double &v : dec.prototypes[c]) v /= static_cast<double>(counts[c]);
  }

  double dist_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < num_classes; ++a) {
    for (std::size_t b = a + 1; b < num_classes; ++b) {
      double sq = 0.0;
      for (std::size_t d = 0; d < D; ++d) sq += std::pow(dec.prototypes[a][d] - dec.prototypes[b][d], 2);
      dist_sum += std::sqrt(sq);
      ++pairs;
    }
  }
  const double target = 0.5 * (pairs ? dist_sum / static_cast<double>(pairs) : 1.0);
  // E|Wz|^2 = D * d * s^2 for W_ij ~ N(0, s^2), z ~ N(0, I_d).
  dec.scale = target / std::sqrt(static_cast<double>(D * latent_dim));
  dec.weights = Matrix(D, latent_dim);
  Rng rng(seed);
  for (double &w : dec.weights.data) w = dec.scale * standard_normal(rng);
  return dec;
}

LabeledBatch decode(const Decoder &dec, const Matrix &z, std::span<const int> labels) {
  if (z.rows != labels.size()) throw std::invalid_argument("decode: latent rows != label count");
  if (z.rows > 0 && z.cols != dec.latent_dim) throw std::invalid_argument("decode: latent dimension mismatch");
  const std::size_t D = dec.input_dim();
  Matrix x(z.rows, D);
  for (std::size_t j = 0; j < z.rows; ++j) {
    const int y = labels[j];
    if (y < 0 || static_cast<std::size_t>(y) >= dec.num_classes()) {
      throw std::invalid_argument("decode: label out of range: " + std::to_string(y));
    }
    const auto zj = z.row(j);
    const auto &proto = dec.prototypes[static_cast<std::size_t>(y)];
    auto xj = x.row(j);
    for (std::size_t d = 0; d < D; ++d) {
      double acc = proto[d];
      for (std::size_t k = 0; k < dec.latent_dim; ++k) acc += dec.weights.at(d, k) * zj[k];
      xj[d] = acc;
    }
  }
  return {std::move(x), std::vector<int>(labels.begin(), labels.end())};
}

JointLossBreakdown joint_loss(const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec, const Matrix &z,
                              std::span<const int> labels, const ParamVector &g_ref) {
  const auto lg = loss_and_grad(spec, w_t, decode(dec, z, labels));
  const double gn = lg.grad.norm();
  const double rn = g_ref.norm();
  JointLossBreakdown out;
  out.l1 = (gn == 0.0 || rn == 0.0) ? 1.0 : 1.0 - cosine(lg.grad, g_ref);
  out.l2 = std::abs(gn - rn);
  out.l3 = lg.loss;
  out.total = out.l1 + out.l2 + out.l3;
  return out;
}

Matrix latent_gradient(const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec, const Matrix &z,
                       std::span<const int> labels, const ParamVector &g_ref, double rel_step) {
  if (!(rel_step > 0.0)) throw std::invalid_argument("latent_gradient: step must be positive");
  Matrix grad(z.rows, z.cols);
  Matrix probe = z;
  for (std::size_t j = 0; j < z.data.size(); ++j) {
    const double orig = z.data[j];
    const double h = rel_step * (1.0 + std::abs(orig));
    probe.data[j] = orig + h;
    const double up = joint_loss(spec, w_t, dec, probe, labels, g_ref).total;
    probe.data[j] = orig - h;
    const double down = joint_loss(spec, w_t, dec, probe, labels, g_ref).total;
    probe.data[j] = orig;
    grad.data[j] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<int> select_targets(const ClientShard &shard, std::size_t num_classes, std::size_t count, Rng &rng) {
  const auto stats = coverage_stats(shard, num_classes);
  std::vector<int> candidates(stats.missing.begin(), stats.missing.end());
  candidates.insert(candidates.end(), stats.underrepresented.begin(), stats.underrepresented.end());
  std::sort(candidates.begin(), candidates.end());
  if (candidates.empty()) {
    for (std::size_t c = 0; c < num_classes; ++c) candidates.push_back(static_cast<int>(c));
  }
  std::vector<int> labels(count);
  for (int &y : labels) y = candidates[uniform_index(rng, candidates.size())];
  return labels;
}

AttackState refine_latent(const AttackState &state, const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec,
                          const std::function<std::vector<int>(int)> &labels_for_step, const ParamVector &g_ref,
                          RefineTrace *trace) {
  AttackState next = state;
  const int steps = std::max(0, state.hyper.latent_steps);
  RefineTrace local;
  bool still_improving = true;
  for (int s = 0; s < steps; ++s) {
    local.labels = labels_for_step(s);
    const double before = joint_loss(spec, w_t, dec, next.z, local.labels, g_ref).total;
    if (s == 0) local.loss_before = before;
    if (state.hyper.eta_z == 0.0) {
      local.loss_after = before;
      continue;
    }
    const Matrix grad = latent_gradient(spec, w_t, dec, next.z, local.labels, g_ref, state.hyper.fd_step);
    for (std::size_t j = 0; j < next.z.data.size(); ++j) next.z.data[j] -= state.hyper.eta_z * grad.data[j];
    const double after = joint_loss(spec, w_t, dec, next.z, local.labels, g_ref).total;
    local.loss_after = after;
    if (still_improving && after < before) {
      ++local.improving_steps;
    } else {
      still_improving = false;
    }
  }
  if (trace) *trace = std::move(local);
  return next;
}

AttackState refine_latent(const AttackState &state, const ModelSpec &spec, const ParamVector &w_t, const Decoder &dec,
                          std::span<const int> labels, const ParamVector &g_ref, RefineTrace *trace) {
  const std::vector<int> fixed(labels.begin(), labels.end());
  return refine_latent(state, spec, w_t, dec, [&](int) { return fixed; }, g_ref, trace);
}

double effective_alpha(std::size_t shard_size, std::size_t synthetic_count) {
  if (shard_size < 1) throw std::invalid_argument("effective_alpha: shard_size must be >= 1");
  return static_cast<double>(synthetic_count) / static_cast<double>(shard_size + synthetic_count);
}

std::size_t LatentHyper::effective_batch() const {
  if (intensity < 0.0) throw std::invalid_argument("LatentHyper: intensity must be >= 0");
  return static_cast<std::size_t>(std::llround(intensity * static_cast<double>(synthetic_batch)));
}

ParamVector clip_norm(ParamVector u, double kappa, bool *clipped) {
  const double n = u.norm();
  const bool clip = n > kappa;
  if (clip) u *= kappa / n;
  if (clipped) *clipped = clip;
  return u;
}

LatentOptResult behavior_latent_opt(const AttackState &state, const Decoder &dec, const ClientContext &ctx) {
  const ModelSpec &spec = *ctx.spec;
  const ParamVector &w_t = ctx.w_t();
  if (spec.param_count() > state.budgets.c_max) {
    throw std::runtime_error("latent_opt: update size exceeds communication budget");
  }
  LatentOptResult out;
  out.state = state;
  out.diagnostics.t = ctx.t;

  const std::size_t batch = state.hyper.effective_batch();
  if (batch == 0) {
    out.update = benign(ctx);
    out.diagnostics.norm_before_clip = out.update.norm();
    return out;
  }

  Rng rng(ctx.behavior_seed);
  AttackState &st = out.state;
  // Warm start from the cached latent; resample when there is no usable cache.
  if (st.cached_round == 0 || st.z.rows != batch || st.z.cols != dec.latent_dim) {
    st.z = Matrix(batch, dec.latent_dim);
    for (double &v : st.z.data) v = standard_normal(rng);
  }

  const ParamVector g_ref = global_delta(ctx);
  const std::size_t C = spec.num_classes();
  std::vector<int> labels;
  RefineTrace trace;
  if (g_ref.norm() > 0.0 && st.hyper.latent_steps > 0) {
    st = refine_latent(
        st, spec, w_t, dec, [&](int) { return select_targets(*ctx.shard, C, batch, rng); }, g_ref, &trace);
    labels = trace.labels;
    out.diagnostics.refine_steps = st.hyper.latent_steps;
    out.diagnostics.improving_steps = trace.improving_steps;
  } else {
    labels = select_targets(*ctx.shard, C, batch, rng);
  }
  out.diagnostics.loss = joint_loss(spec, w_t, dec, st.z, labels, g_ref);
  out.diagnostics.loss_before_refine = out.diagnostics.refine_steps > 0 ? trace.loss_before : out.diagnostics.loss.total;

  const LabeledBatch synthetic = decode(dec, st.z, labels);
  const LabeledBatch hybrid = concat(ctx.shard->data, synthetic);
  ParamVector u = sgd_train(spec, w_t, hybrid, ctx.sgd, ctx.train_seed) - w_t;
  out.diagnostics.norm_before_clip = u.norm();
  out.update = clip_norm(std::move(u), st.budgets.kappa, &out.diagnostics.clipped);
  out.diagnostics.synthetic_count = batch;
  out.diagnostics.effective_alpha = effective_alpha(ctx.shard->n(), batch);

  st.cached_round = ctx.t;
  st.cached_w = w_t;
  return out;
}

LatentOptBehavior::LatentOptBehavior(Decoder decoder, LatentHyper hyper, AttackBudgets budgets)
    : decoder_(std::move(decoder)) {
  state_.hyper = hyper;
  state_.budgets = budgets;
}

ParamVector LatentOptBehavior::update(const ClientContext &ctx) {
  auto result = behavior_latent_opt(state_, decoder_, ctx);
  state_ = std::move(result.state);
  diagnostics_.push_back(result.diagnostics);
  return std::move(result.update);
}

namespace {

class FnBehavior : public ClientBehavior {
 public:
  FnBehavior(std::string name, std::function<ParamVector(const ClientContext &)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  ParamVector update(const ClientContext &ctx) override { return fn_(ctx); }

 private:
  std::string name_;
  std::function<ParamVector(const ClientContext &)> fn_;
};

}  // namespace

std::unique_ptr<ClientBehavior> make_behavior(const AttackParams &params, const Decoder *decoder) {
  switch (params.method) {
    case AttackMethod::kAttackFree:
      return std::make_unique<BenignBehavior>();
    case AttackMethod::kLabelFlip:
      return std::make_unique<FnBehavior>("label_flip", behavior_label_flip);
    case AttackMethod::kRandomNoise: {
      const double sigma = params.noise_sigma_rel;
      return std::make_unique<FnBehavior>("random_noise",
                                          [sigma](const ClientContext &ctx) { return behavior_random_noise(ctx, sigma); });
    }
    case AttackMethod::kFreeRider:
      return std::make_unique<FnBehavior>("free_rider", behavior_free_rider);
    case AttackMethod::kDirectRef:
      return std::make_unique<FnBehavior>("direct_ref", behavior_direct_ref);
    case AttackMethod::kLatentOpt:
      if (!decoder) throw std::invalid_argument("latent_opt requires a calibrated decoder");
      return std::make_unique<LatentOptBehavior>(*decoder, params.latent, params.budgets);
  }
  throw std::invalid_argument("unknown attack method");
}

}  // namespace attrfl
