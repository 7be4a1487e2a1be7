// Times one E-step plus count accumulation per kernel set on a compiled
// cascade step, and one planning call.
#include <chrono>
#include <cstdio>

#include "idbandit/compiled_step.hpp"
#include "idbandit/environments.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/planner.hpp"
#include "idbandit/variational.hpp"

using namespace idbandit;

int main() {
  const auto inst = make_environment("cascade1");
  const auto& d = *inst.diagram;
  Rng rng(7);
  const Action a{3, 11};
  const auto full = sample_episode(d, inst.theta_star, a, rng);
  const CompiledStep step(d, a, mask_latents(d, full));
  BetaState q = uniform_prior(d.param_count());
  q.pairs[3] = {4.0, 2.5};
  q.pairs[11] = {1.0, 7.0};
  const auto elog = expected_log_table(q);
  std::vector<double> buf(step.padded_configs());
  ExpectedCounts counts(d.param_count());

  const KernelTable* sets[] = {&scalar_kernels(), avx2_kernels()};
  for (const KernelTable* k : sets) {
    if (k == nullptr) continue;
    const int reps = 2'000'000;
    double sink = 0.0;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) sink += k->estep(elog.data(), step.view(), buf.data()).log_normalizer;
    auto t1 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) k->accumulate(step.view(), step.configs(), buf.data(), counts.stats.data());
    auto t2 = std::chrono::steady_clock::now();
    std::printf("%-6s e-step %.1f ns, accumulate %.1f ns (%zu configs, %zu slots) [%g]\n", k->name,
                std::chrono::duration<double, std::nano>(t1 - t0).count() / reps,
                std::chrono::duration<double, std::nano>(t2 - t1).count() / reps, step.configs(), step.slots(), sink);
  }

  const Planner planner(d);
  const int plans = 2000;
  double sink = 0.0;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < plans; ++r) sink += planner.plan(inst.theta_star).value;
  auto t1 = std::chrono::steady_clock::now();
  std::printf("plan over %zu actions: %.1f us [%g]\n", planner.actions().size(),
              std::chrono::duration<double, std::micro>(t1 - t0).count() / plans, sink);
  return 0;
}
