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

#include <cmath>
#include <set>

#include "attrfl/attacks.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace attrfl;

namespace {

// A client context over a small blob shard with a two-model history.
struct Scene {
  ModelSpec spec = ModelSpec::logistic(4, 3);
  ClientShard shard;
  std::vector<ParamVector> history;
  SgdConfig sgd{2, 16, 0.1};

  explicit Scene(Seed seed, std::size_t classes = 3) : spec(ModelSpec::logistic(4, classes)) {
    const auto setup = testing::small_setup(3, classes, 2, 1, seed);
    shard = setup.shards[0];
    Rng rng(seed);
    const auto w0 = init_params(spec, seed);
    history = {w0, w0 + testing::random_params(spec.param_count(), rng, 0.05)};
  }

  ClientContext ctx(int t = 2, Seed behavior = 5) const {
    ClientContext c;
    c.t = t;
    c.history = std::span<const ParamVector>(history.data(), static_cast<std::size_t>(t));
    c.shard = &shard;
    c.spec = &spec;
    c.sgd = sgd;
    c.train_seed = 77;
    c.behavior_seed = behavior;
    return c;
  }

  ParamVector benign(const ClientContext &c) const {
    return benign_local_update(spec, c.w_t(), shard, sgd, c.train_seed);
  }
};

Decoder test_decoder(std::size_t classes, std::size_t dim, std::size_t latent, Seed seed) {
  const auto pool = synthesize(testing::blobs(classes, dim, 3.0, seed, 20)).train;
  return calibrate_decoder(pool, classes, latent, seed + 1);
}

Matrix random_latent(std::size_t rows, std::size_t cols, Rng &rng) {
  Matrix z(rows, cols);
  for (double &v : z.data) v = standard_normal(rng);
  return z;
}

}  // namespace

TEST_SUITE("attacks") {
  TEST_CASE("method names round-trip") {
    for (auto m : {AttackMethod::kAttackFree, AttackMethod::kLabelFlip, AttackMethod::kRandomNoise,
                   AttackMethod::kFreeRider, AttackMethod::kDirectRef, AttackMethod::kLatentOpt}) {
      CHECK(parse_attack_method(to_string(m)) == m);
    }
    CHECK_THROWS(parse_attack_method("backdoor"));
  }

  TEST_CASE("label flip trains on cyclically shifted labels") {
    for (std::size_t C : {2u, 3u}) {
      Scene s(1, C);
      const auto c = s.ctx();
      ClientShard shifted = s.shard;
      for (int &y : shifted.data.labels) y = (y + 1) % static_cast<int>(C);
      const auto expected = benign_local_update(s.spec, c.w_t(), shifted, s.sgd, c.train_seed);
      CHECK(behavior_label_flip(c) == expected);
      const auto before = class_counts(s.shard.data, C), after = class_counts(shifted.data, C);
      for (std::size_t k = 0; k < C; ++k) CHECK(after[(k + 1) % C] == before[k]);
    }
  }

  TEST_CASE("random noise") {
    Scene s(2);
    const auto c = s.ctx();
    const auto u = s.benign(c);
    CHECK(behavior_random_noise(c, 0.0) == u);
    CHECK_THROWS(behavior_random_noise(c, -1.0));
    CHECK(behavior_random_noise(c, 1.0) == behavior_random_noise(c, 1.0));

    const double sigma = 1.5;
    double ratio = 0.0;
    const int draws = 1000;
    for (int k = 0; k < draws; ++k) {
      const auto noisy = behavior_random_noise(s.ctx(2, static_cast<Seed>(1000 + k)), sigma);
      ratio += (noisy - u).squared_norm() / u.squared_norm();
    }
    CHECK(ratio / draws == doctest::Approx(sigma * sigma).epsilon(0.05));
  }

  TEST_CASE("free rider replays the last global step") {
    Scene s(3);
    CHECK(behavior_free_rider(s.ctx(1)) == ParamVector(s.spec.param_count()));
    CHECK(behavior_free_rider(s.ctx(2)) == s.history[1] - s.history[0]);
    s.history[1] = s.history[0];
    CHECK(behavior_free_rider(s.ctx(2)) == ParamVector(s.spec.param_count()));
  }

  TEST_CASE("direct reference keeps the benign norm along the global step") {
    Scene s(4);
    const auto c = s.ctx();
    const auto u = s.benign(c);
    const auto g = behavior_direct_ref(c);
    CHECK(g.norm() == doctest::Approx(u.norm()).epsilon(1e-12));
    CHECK(cosine(g, s.history[1] - s.history[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(behavior_direct_ref(s.ctx(1)) == s.benign(s.ctx(1)));
  }

  TEST_CASE("decoder calibration and decoding") {
    Matrix x(2, 3);
    x.data = {1, 2, 3, -4, 5, -6};
    const LabeledBatch pool(x, {1, 0});
    const auto dec = calibrate_decoder(pool, 2, 4, 9);
    CHECK(dec.prototypes[0] == std::vector<double>{-4, 5, -6});
    CHECK(dec.prototypes[1] == std::vector<double>{1, 2, 3});
    CHECK(dec.input_dim() == 3);
    CHECK(dec.latent_dim == 4);

    const std::vector<int> labels{0, 1, 1};
    const auto at_zero = decode(dec, Matrix(3, 4), labels);
    CHECK(at_zero.labels == labels);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto row = at_zero.inputs.row(j);
      CHECK(std::vector<double>(row.begin(), row.end()) == dec.prototypes[static_cast<std::size_t>(labels[j])]);
    }

    Rng rng(3);
    const Matrix z = random_latent(3, 4, rng);
    Matrix z2 = z;
    for (double &v : z2.data) v *= 2.0;
    const auto a = decode(dec, z, labels), b = decode(dec, z2, labels);
    for (std::size_t i = 0; i < a.inputs.data.size(); ++i) {
      CHECK(b.inputs.data[i] - at_zero.inputs.data[i] ==
            doctest::Approx(2.0 * (a.inputs.data[i] - at_zero.inputs.data[i])).epsilon(1e-12));
    }

    CHECK_THROWS(calibrate_decoder(pool, 3, 4, 9));
    CHECK_THROWS(calibrate_decoder(pool, 2, 0, 9));
    CHECK_THROWS(decode(dec, Matrix(2, 4), labels));
    CHECK_THROWS(decode(dec, Matrix(1, 4), std::vector<int>{2}));
  }

  TEST_CASE("decoder scale targets half the mean prototype distance") {
    const auto dec = test_decoder(4, 6, 8, 5);
    double dist = 0.0;
    int pairs = 0;
    for (std::size_t a = 0; a < 4; ++a) {
      for (std::size_t b = a + 1; b < 4; ++b) {
        double sq = 0.0;
        for (std::size_t d = 0; d < 6; ++d) sq += std::pow(dec.prototypes[a][d] - dec.prototypes[b][d], 2);
        dist += std::sqrt(sq);
        ++pairs;
      }
    }
    CHECK(dec.scale * std::sqrt(6.0 * 8.0) == doctest::Approx(0.5 * dist / pairs));
  }

  TEST_CASE("select_targets favors missing and underrepresented classes") {
    Rng rng(1);
    ClientShard shard;
    shard.class_counts = {0, 50, 50};
    for (int y : select_targets(shard, 3, 32, rng)) CHECK(y == 0);

    shard.class_counts = {0, 10, 50, 50};
    for (int y : select_targets(shard, 4, 64, rng)) CHECK((y == 0 || y == 1));

    shard.class_counts = {40, 40, 40, 40};
    const auto labels = select_targets(shard, 4, 400, rng);
    CHECK(labels.size() == 400);
    CHECK(std::set<int>(labels.begin(), labels.end()) == std::set<int>{0, 1, 2, 3});
  }

  TEST_CASE("joint loss terms") {
    const auto spec = ModelSpec::logistic(6, 4);
    const auto dec = test_decoder(4, 6, 8, 7);
    Rng rng(2);
    const auto w = testing::random_params(spec.param_count(), rng, 0.3);
    const Matrix z = random_latent(8, 8, rng);
    const std::vector<int> labels{0, 1, 2, 3, 0, 1, 2, 3};
    const auto g = loss_and_grad(spec, w, decode(dec, z, labels));

    const auto same = joint_loss(spec, w, dec, z, labels, g.grad);
    CHECK(same.l1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(same.l2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(same.l3 == doctest::Approx(g.loss));
    CHECK(same.total == doctest::Approx(same.l1 + same.l2 + same.l3));

    const auto anti = joint_loss(spec, w, dec, z, labels, -1.0 * g.grad);
    CHECK(anti.l1 == doctest::Approx(2.0));
    CHECK(anti.l2 == doctest::Approx(0.0).epsilon(1e-12));

    const auto zero_ref = joint_loss(spec, w, dec, z, labels, ParamVector(spec.param_count()));
    CHECK(zero_ref.l1 == 1.0);
    CHECK(zero_ref.l2 == doctest::Approx(g.grad.norm()));

    for (int k = 0; k < 20; ++k) {
      const auto r = joint_loss(spec, w, dec, z, labels, testing::random_params(spec.param_count(), rng));
      CHECK(r.l1 >= 0.0);
      CHECK(r.l1 <= 2.0);
    }
  }

  TEST_CASE("latent gradient agrees across finite-difference steps") {
    const auto spec = ModelSpec::mlp1(6, 5, 4);
    const auto dec = test_decoder(4, 6, 8, 8);
    Rng rng(3);
    const auto w = testing::random_params(spec.param_count(), rng, 0.3);
    const Matrix z = random_latent(4, 8, rng);
    const std::vector<int> labels{3, 2, 1, 0};
    const auto g_ref = testing::random_params(spec.param_count(), rng, 0.1);
    const auto fine = latent_gradient(spec, w, dec, z, labels, g_ref, 1e-4);
    const auto coarse = latent_gradient(spec, w, dec, z, labels, g_ref, 1e-3);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < fine.data.size(); ++i) {
      diff = std::max(diff, std::abs(fine.data[i] - coarse.data[i]));
      scale = std::max(scale, std::abs(fine.data[i]));
    }
    CHECK(diff <= 1e-3 * scale);
    CHECK_THROWS(latent_gradient(spec, w, dec, z, labels, g_ref, 0.0));
  }

  TEST_CASE("refine_latent") {
    const auto spec = ModelSpec::logistic(6, 4);
    const auto dec = test_decoder(4, 6, 8, 9);
    Rng rng(4);
    const auto w = testing::random_params(spec.param_count(), rng, 0.3);
    const auto g_ref = testing::random_params(spec.param_count(), rng, 0.1);
    const std::vector<int> labels{0, 1, 2, 3, 3, 2, 1, 0};
    AttackState st;
    st.z = random_latent(8, 8, rng);

    st.hyper.latent_steps = 0;
    const auto none = refine_latent(st, spec, w, dec, labels, g_ref);
    CHECK(none.z.data == st.z.data);

    st.hyper.latent_steps = 3;
    st.hyper.eta_z = 0.0;
    CHECK(refine_latent(st, spec, w, dec, labels, g_ref).z.data == st.z.data);

    st.hyper.latent_steps = 1;
    st.hyper.eta_z = 1e-2;
    RefineTrace trace;
    const auto moved = refine_latent(st, spec, w, dec, labels, g_ref, &trace);
    CHECK_FALSE(moved.z.data == st.z.data);
    CHECK(trace.loss_after < trace.loss_before);
    CHECK(trace.improving_steps == 1);
    CHECK(trace.labels == labels);
    CHECK(trace.loss_before == joint_loss(spec, w, dec, st.z, labels, g_ref).total);
  }

  TEST_CASE("effective alpha and batch") {
    CHECK(effective_alpha(300, 16) == doctest::Approx(16.0 / 316.0));
    CHECK(effective_alpha(40, 40) == 0.5);
    CHECK(effective_alpha(300, 0) == 0.0);
    CHECK_THROWS(effective_alpha(0, 4));
    LatentHyper h;
    h.synthetic_batch = 16;
    h.intensity = 0.25;
    CHECK(h.effective_batch() == 4);
    h.intensity = 0.0;
    CHECK(h.effective_batch() == 0);
    h.intensity = -1.0;
    CHECK_THROWS(h.effective_batch());
  }

  TEST_CASE("clip_norm") {
    bool clipped = false;
    const ParamVector u(std::vector<double>{3, 4});
    const auto c = clip_norm(u, 2.5, &clipped);
    CHECK(clipped);
    CHECK(c.norm() == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(clip_norm(u, 10.0, &clipped) == u);
    CHECK_FALSE(clipped);
  }

  TEST_CASE("latent_opt at zero intensity is the benign update") {
    Scene s(5);
    const auto dec = test_decoder(3, 4, 8, 10);
    AttackState st;
    st.hyper.intensity = 0.0;
    for (int t : {1, 2}) {
      const auto c = s.ctx(t);
      const auto r = behavior_latent_opt(st, dec, c);
      CHECK(r.update == s.benign(c));
      CHECK(r.diagnostics.synthetic_count == 0);
    }
  }

  TEST_CASE("latent_opt clips to kappa, caches state and respects c_max") {
    Scene s(6);
    const auto dec = test_decoder(3, 4, 8, 11);
    AttackState st;
    st.hyper.latent_steps = 2;
    const auto free = behavior_latent_opt(st, dec, s.ctx());
    CHECK_FALSE(free.diagnostics.clipped);
    CHECK(free.state.cached_round == 2);
    CHECK(free.state.cached_w == s.history[1]);
    CHECK(free.state.z.rows == st.hyper.effective_batch());
    CHECK(free.diagnostics.effective_alpha == doctest::Approx(effective_alpha(s.shard.n(), 16)));
    CHECK(free.diagnostics.refine_steps == 2);

    st.budgets.kappa = 0.5 * free.update.norm();
    const auto clipped = behavior_latent_opt(st, dec, s.ctx());
    CHECK(clipped.diagnostics.clipped);
    CHECK(clipped.update.norm() == doctest::Approx(st.budgets.kappa).epsilon(1e-12));

    // First round: no reference, so no refinement.
    CHECK(behavior_latent_opt(st, dec, s.ctx(1)).diagnostics.refine_steps == 0);

    st.budgets.c_max = s.spec.param_count() - 1;
    CHECK_THROWS(behavior_latent_opt(st, dec, s.ctx()));
  }

  TEST_CASE("latent_opt is deterministic and warm-starts from its cache") {
    Scene s(7);
    const auto dec = test_decoder(3, 4, 8, 12);
    AttackState st;
    const auto a = behavior_latent_opt(st, dec, s.ctx());
    const auto b = behavior_latent_opt(st, dec, s.ctx());
    CHECK(a.update == b.update);
    CHECK(a.state.z.data == b.state.z.data);

    // A cached latent with the right shape is reused rather than resampled.
    AttackState warm = a.state;
    warm.hyper.latent_steps = 0;
    CHECK(behavior_latent_opt(warm, dec, s.ctx(2, 999)).state.z.data == a.state.z.data);
  }

  TEST_CASE("make_behavior wires every method") {
    AttackParams p;
    const auto dec = test_decoder(3, 4, 8, 13);
    for (auto m : {AttackMethod::kAttackFree, AttackMethod::kLabelFlip, AttackMethod::kRandomNoise,
                   AttackMethod::kFreeRider, AttackMethod::kDirectRef, AttackMethod::kLatentOpt}) {
      p.method = m;
      CHECK(make_behavior(p, &dec)->name() == to_string(m));
    }
    p.method = AttackMethod::kLatentOpt;
    CHECK_THROWS(make_behavior(p));
  }
}
