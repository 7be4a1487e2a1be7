#include <doctest.h>

#include <cmath>
#include <random>

#include "idbandit/diagram_io.hpp"
#include "idbandit/environments.hpp"
#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "test_support.hpp"

using namespace idbandit;
using namespace testing;

namespace {

// Expected reward of each family written out by hand.
double closed_form(const std::string& name, const ParamVector& theta, const Action& a, const BanditInstance& inst) {
  const auto& d = *inst.diagram;
  auto item = [&](std::size_t k) { return theta[d.decision_param_offset(d.decision_nodes()[k]) + a[k]]; };
  if (name == "cascade1") {
    double miss = 1.0;
    for (std::size_t k = 0; k < a.size(); ++k) miss *= 1.0 - item(k);
    return 1.0 - miss;
  }
  if (name == "cascade2") {
    // C_k = (1 - W_k) E_k and E_{k+1} = C_k E_k
    double reach = 1.0, total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      reach *= 1.0 - item(k);
      total += reach;
    }
    return total;
  }
  if (name == "pbm1" || name == "pbm2") {
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) total += theta[k] * item(k);
    return total;
  }
  if (name == "semibandit") {
    double total = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) total += item(k);
    return total;
  }
  return item(0) * item(1);  // rank-1
}

}  // namespace

TEST_CASE("every named environment validates and its optimum checks out") {
  for (const auto& name : environment_names()) {
    CAPTURE(name);
    const auto inst = make_environment(name);
    CHECK(inst.name == name);
    CHECK(validate_diagram(*inst.diagram).ok());
    const auto best = oracle_best(inst.diagram->definition(), inst.theta_star);
    CHECK(std::abs(best.value - inst.optimal_value) <= 1e-12);
    CHECK(std::abs(expected_reward(*inst.diagram, inst.theta_star, inst.optimal_action) - inst.optimal_value) <= 1e-12);
    CHECK(std::abs(oracle_expected_reward(inst.diagram->definition(), inst.theta_star, inst.optimal_action) -
                   best.value) <= 1e-12);
  }
}

TEST_CASE("closed forms of every family") {
  std::mt19937_64 gen(29);
  for (const auto& name : environment_names()) {
    CAPTURE(name);
    const auto inst = make_environment(name);
    const auto actions = oracle_actions(inst.diagram->definition());
    CHECK(std::abs(expected_reward(*inst.diagram, inst.theta_star, inst.optimal_action) -
                   closed_form(name, inst.theta_star, inst.optimal_action, inst)) <= 1e-12);
    for (int trial = 0; trial < 30; ++trial) {
      const auto theta = random_theta(inst.diagram->param_count(), gen);
      const auto& a = actions[gen() % actions.size()];
      CHECK(std::abs(expected_reward(*inst.diagram, theta, a) - closed_form(name, theta, a, inst)) <= 1e-12);
    }
  }
}

TEST_CASE("cascade examples") {
  SUBCASE("model 1 optimum") {
    const auto inst = make_environment("cascade1");
    CHECK(inst.optimal_value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inst.optimal_action == Action{0, 19});
  }
  SUBCASE("model 2 optimum") {
    const auto inst = make_environment("cascade2");
    CHECK(inst.optimal_action == Action{0, 1});
    CHECK(std::abs(inst.optimal_value - 1.805) < 1e-12);
  }
  SUBCASE("single item, single position") {
    const auto inst = make_cascade(1, 1, {0.5}, CascadeVariant::Standard, false);
    CHECK(inst.optimal_value == doctest::Approx(0.5));
  }
  SUBCASE("learnable conditionals carry their true values") {
    const auto known = make_environment("cascade2");
    const auto learn = make_environment("cascade2", {{"learn_conditionals", true}});
    CHECK(learn.optimal_action == known.optimal_action);
    CHECK(std::abs(learn.optimal_value - known.optimal_value) < 1e-12);
    CHECK(learn.theta_star.size() == learn.diagram->d() + 20);
  }
  SUBCASE("bad sizes") {
    CHECK_THROWS_AS(make_cascade(2, 3, {0.1, 0.2}, CascadeVariant::Standard, false), ConfigError);
    CHECK_THROWS_AS(make_cascade(3, 2, {0.1, 0.2}, CascadeVariant::Standard, false), ConfigError);
    CHECK_THROWS_AS(make_cascade(2, 1, {0.1, 1.2}, CascadeVariant::Standard, false), ConfigError);
  }
}

TEST_CASE("position-based examples") {
  SUBCASE("model 1") {
    const auto inst = make_environment("pbm1");
    CHECK(std::abs(inst.optimal_value - 1.365) < 1e-12);
    CHECK(inst.diagram->d() == 2);
  }
  SUBCASE("model 2 puts the best item first") {
    const auto inst = make_environment("pbm2");
    CHECK(std::abs(inst.optimal_value - 0.99) < 1e-12);
    CHECK(inst.optimal_action == Action{19, 18});
  }
  SUBCASE("always examined degenerates to the semi-bandit sum") {
    const auto inst = make_pbm(5, 2, {0.1, 0.3, 0.5, 0.7, 0.9}, {1.0, 1.0});
    CHECK(std::abs(expected_reward(*inst.diagram, inst.theta_star, {0, 3}) - 0.8) < 1e-12);
  }
  SUBCASE("known examination leaves d empty") {
    const auto inst = make_pbm(5, 2, {0.1, 0.3, 0.5, 0.7, 0.9}, {0.7, 0.7}, true);
    CHECK(inst.diagram->d() == 0);
  }
  SUBCASE("bad sizes") { CHECK_THROWS_AS(make_pbm(3, 2, {0.1, 0.2, 0.3}, {0.5}), ConfigError); }
}

TEST_CASE("semi-bandit examples") {
  SUBCASE("linear optimum") {
    const auto inst = make_semi_bandit(3, 2, {0.1, 0.2, 0.3});
    CHECK(inst.optimal_action == Action{1, 2});
    CHECK(std::abs(inst.optimal_value - 0.5) < 1e-12);
  }
  SUBCASE("K = L has one action") {
    const auto inst = make_semi_bandit(3, 3, {0.1, 0.2, 0.3});
    CHECK(oracle_actions(inst.diagram->definition()).size() == 1);
  }
  SUBCASE("equal means make every action optimal") {
    const auto inst = make_semi_bandit(5, 2, std::vector<double>(5, 0.4));
    for (const auto& a : oracle_actions(inst.diagram->definition()))
      CHECK(std::abs(expected_reward(*inst.diagram, inst.theta_star, a) - 0.8) < 1e-12);
  }
  SUBCASE("bad sizes") { CHECK_THROWS_AS(make_semi_bandit(2, 3, {0.1, 0.2}), ConfigError); }
}

TEST_CASE("rank-1 examples") {
  const auto one = make_environment("rank1_1");
  CHECK(one.optimal_action == Action{7, 9});
  CHECK(std::abs(one.optimal_value - 0.25) < 1e-12);
  const auto two = make_environment("rank1_2");
  CHECK(std::abs(two.optimal_value - 1.0) < 1e-12);
  const auto unit = make_rank1({1.0}, {1.0});
  Rng rng(1);
  for (int i = 0; i < 20; ++i) CHECK(unit.diagram->reward(sample_episode(*unit.diagram, unit.theta_star, {0, 0}, rng)) == 1.0);
  CHECK_THROWS_AS(make_rank1({}, {0.5}), ConfigError);
  CHECK_THROWS_AS(make_rank1({1.5}, {0.5}), ConfigError);
}

TEST_CASE("overrides") {
  const auto small = make_environment("cascade1", {{"L", 6}, {"K", 3}});
  CHECK(small.diagram->decision_param_count() == 6);
  CHECK(small.diagram->decision_nodes().size() == 3);
  const auto custom = make_environment("semibandit", {{"L", 3}, {"K", 1}, {"means", {0.9, 0.1, 0.2}}});
  CHECK(custom.optimal_action == Action{0});
  const auto r = make_environment("rank1_1", {{"U", {0.2, 0.4}}, {"V", {0.5}}});
  CHECK(r.optimal_action == Action{1, 0});
  CHECK_THROWS_AS(make_environment("cascade1", {{"colour", 3}}), ConfigError);
  CHECK_THROWS_AS(make_environment("cascade3"), ConfigError);
  CHECK_THROWS_AS(make_environment("pbm1", {{"exam_probs", "high"}}), ConfigError);
}

TEST_CASE("environments export to diagram files") {
  const auto dir = scratch_dir("envs");
  for (const auto& name : environment_names()) {
    const auto inst = make_environment(name);
    const auto path = dir / (name + ".json");
    save_diagram(path.string(), inst.diagram->definition());
    const auto back = InfluenceDiagram::build(load_diagram(path.string()));
    CHECK(back.node_count() == inst.diagram->node_count());
    CHECK(std::abs(expected_reward(back, inst.theta_star, inst.optimal_action) - inst.optimal_value) < 1e-12);
  }
  std::filesystem::remove_all(dir);
}
