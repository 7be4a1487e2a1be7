#pragma once

#include <cstddef>
#include <vector>

#include "idbandit/diagram.hpp"
#include "idbandit/rng.hpp"

namespace idbandit {

struct ParticleSet {
  std::vector<ParamVector> particles;
  std::vector<double> weights;  // normalized
  double sigma = 0.05;

  std::size_t size() const { return particles.size(); }
};

/// m particles drawn uniformly from [0, 1]^{d+L} with equal weights.
ParticleSet initial_particles(const InfluenceDiagram& diagram, std::size_t m, double sigma, Rng& rng);

struct ParticleStep {
  ParamVector best;
  std::size_t best_index = 0;
  std::vector<double> importance;  // normalized weights before resampling
  ParticleSet next;
  bool degenerate = false;  // every weight was zero; resampled uniformly
};

/// Perturb by N(0, sigma^2) clipped to [0, 1], weight by P(x, z | particle, a),
/// keep the highest-weight particle (first on ties), then resample m particles
/// multinomially with replacement. Resampled particles carry equal weights.
ParticleStep pf_step(const ParticleSet& pset, const InfluenceDiagram& diagram, const Action& a,
                     const Assignment& full, Rng& rng);

}  // namespace idbandit
