#include "idbandit/particle_filter.hpp"

#include <algorithm>
#include <numeric>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"
#include "idbandit/log.hpp"

namespace idbandit {

ParticleSet initial_particles(const InfluenceDiagram& diagram, std::size_t m, double sigma, Rng& rng) {
  if (m == 0) throw ConfigError("particle count must be at least 1");
  if (!(sigma >= 0.0)) throw ConfigError("particle transition sigma must be nonnegative");
  ParticleSet set;
  set.sigma = sigma;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  set.particles.resize(m);
  for (auto& p : set.particles) {
    p.values.resize(diagram.param_count());
    for (auto& v : p.values) v = unit(rng);
  }
  set.weights.assign(m, 1.0 / static_cast<double>(m));
  return set;
}

ParticleStep pf_step(const ParticleSet& pset, const InfluenceDiagram& diagram, const Action& a,
                     const Assignment& full, Rng& rng) {
  const std::size_t m = pset.size();
  if (m == 0) throw ConfigError("particle set is empty");
  std::vector<ParamVector> moved = pset.particles;
  if (pset.sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, pset.sigma);
    for (auto& p : moved)
      for (auto& v : p.values) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }

  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = joint_prob(diagram, moved[k], a, full);
    total += w[k];
  }

  ParticleStep out;
  out.best_index = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  out.best = moved[out.best_index];
  if (total > 0.0) {
    for (auto& x : w) x /= total;
  } else {
    out.degenerate = true;
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m));
    log_warning("all particle weights are zero; resampling uniformly");
  }

  std::vector<double> cumulative(m);
  std::partial_sum(w.begin(), w.end(), cumulative.begin());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.next.sigma = pset.sigma;
  out.next.particles.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = unit(rng) * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t pick = std::min(static_cast<std::size_t>(it - cumulative.begin()), m - 1);
    out.next.particles.push_back(moved[pick]);
  }
  out.next.weights.assign(m, 1.0 / static_cast<double>(m));
  out.importance = std::move(w);
  return out;
}

}  // namespace idbandit
