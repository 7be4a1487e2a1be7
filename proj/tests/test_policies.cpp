#include <doctest.h>

#include <cmath>
#include <random>

#include "idbandit/environments.hpp"
#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/particle_filter.hpp"
#include "idbandit/planner.hpp"
#include "idbandit/policies.hpp"
#include "test_support.hpp"

using namespace idbandit;
using namespace testing;

TEST_CASE("action enumeration") {
  SUBCASE("ordered distinct pairs") {
    const auto inst = make_environment("cascade1");
    const auto actions = enumerate_actions(*inst.diagram);
    CHECK(actions.size() == 380);
    CHECK(actions == oracle_actions(inst.diagram->definition()));
    CHECK(count_actions(*inst.diagram) == 380);
  }
  SUBCASE("unordered sets") {
    const auto inst = make_semi_bandit(6, 3, std::vector<double>(6, 0.5));
    const auto actions = enumerate_actions(*inst.diagram);
    CHECK(actions.size() == 20);
    CHECK(actions == oracle_actions(inst.diagram->definition()));
  }
  SUBCASE("separate domains") {
    const auto inst = make_environment("rank1_1");
    CHECK(enumerate_actions(*inst.diagram).size() == 80);
    CHECK(enumerate_actions(*inst.diagram) == oracle_actions(inst.diagram->definition()));
  }
  SUBCASE("cap") {
    DiagramDefinition def = make_environment("rank1_1").diagram->definition();
    def.domains[0].size = 2000;
    def.domains[1].offset = 2000;
    def.domains[1].size = 1000;
    const auto d = InfluenceDiagram::build(def);
    CHECK(count_actions(d) == kPlannerCap + 1);
    CHECK_THROWS_AS(enumerate_actions(d), PlannerCapError);
    CHECK_THROWS_AS(plan_action(d, ParamVector{std::vector<double>(3000, 0.5)}), PlannerCapError);
  }
}

TEST_CASE("planner examples") {
  SUBCASE("cascade model 1 ties every list holding the sure item") {
    const auto inst = make_environment("cascade1");
    const auto plan = plan_action(*inst.diagram, inst.theta_star);
    // theta_19 = 1, so the lexicographically first list containing it wins
    CHECK(plan.action == Action{0, 19});
    CHECK(plan.value == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("cascade model 2 picks the two least attractive items") {
    const auto inst = make_environment("cascade2");
    const auto plan = plan_action(*inst.diagram, inst.theta_star);
    CHECK(plan.action == Action{0, 1});
    CHECK(std::abs(plan.value - 1.805) < 1e-12);
  }
  SUBCASE("rank-1 bandit 1") {
    const auto inst = make_environment("rank1_1");
    const auto plan = plan_action(*inst.diagram, inst.theta_star);
    CHECK(plan.action == Action{7, 9});
    CHECK(std::abs(plan.value - 0.25) < 1e-12);
  }
  SUBCASE("ties go to the lexicographically smallest action") {
    const auto inst = make_semi_bandit(4, 2, std::vector<double>(4, 0.5));
    CHECK(plan_action(*inst.diagram, inst.theta_star).action == Action{0, 1});
  }
}

TEST_CASE("planner agrees with exhaustive search") {
  std::mt19937_64 gen(19);
  for (const auto& name : environment_names()) {
    CAPTURE(name);
    const auto inst = make_environment(name);
    const Planner planner(*inst.diagram);
    for (int trial = 0; trial < 25; ++trial) {
      const auto theta = random_theta(inst.diagram->param_count(), gen);
      const auto best = oracle_best(inst.diagram->definition(), theta);
      const auto plan = planner.plan(theta);
      CHECK(plan.action == best.action);
      CHECK(std::abs(plan.value - best.value) <= 1e-12);
    }
  }
}

TEST_CASE("planner is invariant under increasing affine maps of the reward table") {
  DiagramDefinition def = two_slot_example(4);
  def.reward.form = RewardForm::Table;
  def.reward.nodes.clear();
  def.reward.weights.clear();
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t mask = 0; mask < 8; ++mask) def.reward.table[mask] = u(gen);
  const auto base = InfluenceDiagram::build(def);
  for (auto [slope, shift] : std::vector<std::pair<double, double>>{{2.0, 0.5}, {0.1, 3.0}, {7.0, 0.0}}) {
    DiagramDefinition mapped = def;
    for (auto& [mask, r] : mapped.reward.table) r = slope * r + shift;
    const auto other = InfluenceDiagram::build(mapped);
    for (int trial = 0; trial < 30; ++trial) {
      const auto theta = random_theta(base.param_count(), gen);
      CHECK(plan_action(base, theta).action == plan_action(other, theta).action);
    }
  }
}

TEST_CASE("policy construction") {
  CHECK(parse_policy_kind("idTS_fullobs") == PolicyKind::FullyObservable);
  CHECK(parse_policy_kind("idTSfull") == PolicyKind::FeedbackRelaxed);
  CHECK(parse_policy_kind("idTSvi") == PolicyKind::Variational);
  CHECK(parse_policy_kind("idTSinc") == PolicyKind::Incremental);
  CHECK(parse_policy_kind("PF") == PolicyKind::ParticleFilter);
  CHECK_THROWS_AS(parse_policy_kind("UCB"), ConfigError);
  for (auto k : {PolicyKind::FullyObservable, PolicyKind::FeedbackRelaxed, PolicyKind::Variational,
                 PolicyKind::Incremental, PolicyKind::ParticleFilter})
    CHECK(parse_policy_kind(to_string(k)) == k);

  const auto latent = make_environment("rank1_1");
  PolicyConfig cfg;
  cfg.kind = PolicyKind::FullyObservable;
  CHECK_THROWS_AS(make_policy(cfg, latent.diagram), ConfigError);
  cfg.kind = PolicyKind::FeedbackRelaxed;
  CHECK(make_policy(cfg, latent.diagram)->feedback_relaxed());
  cfg.kind = PolicyKind::ParticleFilter;
  CHECK(make_policy(cfg, latent.diagram)->feedback_relaxed());
  cfg.kind = PolicyKind::Variational;
  CHECK_FALSE(make_policy(cfg, latent.diagram)->feedback_relaxed());
  cfg.kind = PolicyKind::Incremental;
  CHECK_FALSE(make_policy(cfg, latent.diagram)->feedback_relaxed());
}

namespace {

std::vector<Action> drive(Policy& policy, const BanditInstance& inst, std::size_t steps, std::uint64_t seed,
                          bool give_latent) {
  Rng env(seed), prng(seed + 100);
  std::vector<Action> actions;
  for (std::size_t t = 0; t < steps; ++t) {
    const auto a = policy.act(t, prng);
    actions.push_back(a);
    const auto full = sample_episode(*inst.diagram, inst.theta_star, a, env);
    const auto observed = mask_latents(*inst.diagram, full);
    policy.update(a, observed, give_latent ? &full : nullptr, prng);
  }
  return actions;
}

}  // namespace

TEST_CASE("idTSvi matches the conjugate policy without latents") {
  const auto inst = make_semi_bandit(8, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  PolicyConfig a, b;
  a.kind = PolicyKind::FullyObservable;
  b.kind = PolicyKind::Variational;
  b.max_sweeps = 1;
  auto pa = make_policy(a, inst.diagram);
  auto pb = make_policy(b, inst.diagram);
  CHECK(drive(*pa, inst, 150, 3, false) == drive(*pb, inst, 150, 3, false));
}

TEST_CASE("latent-free policies ignore latent values") {
  const auto inst = make_environment("cascade1");
  for (auto kind : {PolicyKind::Variational, PolicyKind::Incremental}) {
    PolicyConfig cfg;
    cfg.kind = kind;
    cfg.max_sweeps = 2;
    auto p1 = make_policy(cfg, inst.diagram);
    auto p2 = make_policy(cfg, inst.diagram);
    CHECK(drive(*p1, inst, 80, 5, true) == drive(*p2, inst, 80, 5, false));
    CHECK(p1->snapshot() == p2->snapshot());
  }
}

TEST_CASE("relaxed feedback changes the posterior") {
  const auto inst = make_environment("rank1_1");
  PolicyConfig full, vi;
  full.kind = PolicyKind::FeedbackRelaxed;
  vi.kind = PolicyKind::Variational;
  auto pf = make_policy(full, inst.diagram);
  auto pv = make_policy(vi, inst.diagram);
  Rng env(1), r1(2), r2(2);
  const Action a{3, 4};
  std::size_t zeros = 0;
  for (int t = 0; t < 40; ++t) {
    const auto x = sample_episode(*inst.diagram, inst.theta_star, a, env);
    zeros += x[*inst.diagram->find_node("X")] == 0;
    pf->update(a, mask_latents(*inst.diagram, x), &x, r1);
    pv->update(a, mask_latents(*inst.diagram, x), nullptr, r2);
  }
  REQUIRE(zeros > 0);
  CHECK(pf->snapshot() != pv->snapshot());
  // the conjugate posterior gains one whole count per factor per step
  const auto snap = pf->snapshot();
  const auto& row = snap["params"][3];
  CHECK(row["alpha"].get<double>() + row["beta"].get<double>() == 40.0);
  CHECK_THROWS_AS(pf->update(a, mask_latents(*inst.diagram, sample_episode(*inst.diagram, inst.theta_star, a, env)),
                             nullptr, r1),
                  ConfigError);
}

TEST_CASE("idTSvi replays deterministically") {
  const auto inst = make_environment("pbm1");
  PolicyConfig cfg;
  cfg.kind = PolicyKind::Variational;
  cfg.max_sweeps = 1;
  auto p1 = make_policy(cfg, inst.diagram);
  auto p2 = make_policy(cfg, inst.diagram);
  CHECK(drive(*p1, inst, 60, 11, false) == drive(*p2, inst, 60, 11, false));
}

TEST_CASE("particle filter step") {
  SUBCASE("one particle is always the best") {
    const auto inst = make_environment("cascade1");
    Rng rng(1);
    auto set = initial_particles(*inst.diagram, 1, 0.05, rng);
    for (int t = 0; t < 20; ++t) {
      const auto full = sample_episode(*inst.diagram, inst.theta_star, {0, 1}, rng);
      const auto step = pf_step(set, *inst.diagram, {0, 1}, full, rng);
      CHECK(step.best_index == 0);
      CHECK(step.next.size() == 1);
      CHECK(step.best == step.next.particles[0]);
      set = step.next;
    }
  }
  SUBCASE("likelihood ratio of two particles") {
    const auto inst = make_semi_bandit(1, 1, {0.5});
    ParticleSet set;
    set.sigma = 0.0;
    set.particles = {ParamVector{{0.1}}, ParamVector{{0.9}}};
    set.weights = {0.5, 0.5};
    Assignment full = inst.diagram->decisions_only({0});
    full[*inst.diagram->find_node("X1")] = 1;
    Rng rng(2);
    const auto step = pf_step(set, *inst.diagram, {0}, full, rng);
    CHECK(step.importance[1] / step.importance[0] == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(step.best_index == 1);
    CHECK(step.best[0] == 0.9);
  }
  SUBCASE("no noise and equal particles leave the set unchanged") {
    const auto inst = make_environment("rank1_1");
    ParticleSet set;
    set.sigma = 0.0;
    set.particles.assign(6, inst.theta_star);
    set.weights.assign(6, 1.0 / 6);
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
      const auto full = sample_episode(*inst.diagram, inst.theta_star, {2, 2}, rng);
      const auto step = pf_step(set, *inst.diagram, {2, 2}, full, rng);
      CHECK(step.next.particles == set.particles);
      CHECK(step.next.weights == set.weights);
    }
  }
  SUBCASE("weights normalized and particles in range") {
    const auto inst = make_environment("cascade1");
    Rng rng(4);
    auto set = initial_particles(*inst.diagram, 20, 0.2, rng);
    for (int t = 0; t < 50; ++t) {
      const Action a{t % 20, (t + 7) % 20};
      const auto full = sample_episode(*inst.diagram, inst.theta_star, a, rng);
      const auto step = pf_step(set, *inst.diagram, a, full, rng);
      double s = 0.0, si = 0.0;
      for (double w : step.next.weights) s += w;
      for (double w : step.importance) si += w;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(si == doctest::Approx(1.0).epsilon(1e-10));
      for (const auto& p : step.next.particles)
        for (double v : p.values) CHECK((v >= 0.0 && v <= 1.0));
      set = step.next;
    }
  }
  SUBCASE("all-zero weights resample uniformly") {
    const auto inst = make_semi_bandit(1, 1, {0.5});
    ParticleSet set;
    set.sigma = 0.0;
    set.particles = {ParamVector{{0.0}}, ParamVector{{0.0}}};
    set.weights = {0.5, 0.5};
    Assignment full = inst.diagram->decisions_only({0});
    full[*inst.diagram->find_node("X1")] = 1;
    Rng rng(5);
    const auto step = pf_step(set, *inst.diagram, {0}, full, rng);
    CHECK(step.degenerate);
    CHECK(step.importance[0] == doctest::Approx(0.5));
  }
}
