#include "idbandit/compiled_step.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "idbandit/errors.hpp"
#include "idbandit/inference.hpp"

namespace idbandit {

CompiledStep::CompiledStep(const InfluenceDiagram& diagram, const Action& a, const Assignment& observed) {
  check_enumeration_cap(diagram);
  diagram.check_action(a);
  const auto& latents = diagram.latent_nodes();
  Assignment work = diagram.decisions_only(a);
  for (auto v : diagram.observed_nodes()) {
    const int bit = observed[v];
    if (bit != 0 && bit != 1) throw IncompleteAssignmentError("observed node '" + diagram.node(v).name + "' is unset");
    work[v] = bit;
  }

  configs_ = std::size_t{1} << latents.size();
  padded_ = (configs_ + kKernelLanes - 1) / kKernelLanes * kKernelLanes;
  zero_code_ = static_cast<std::int32_t>(2 * diagram.param_count());

  std::vector<std::vector<std::int32_t>> per_config(configs_);
  known_.assign(padded_, kPaddingLogWeight);
  for (std::size_t z = 0; z < configs_; ++z) {
    for (std::size_t j = 0; j < latents.size(); ++j) work[latents[j]] = static_cast<int>((z >> j) & 1u);
    double known = 0.0;
    for (auto v : diagram.stochastic_topo()) {
      const TableEntry e = diagram.governing_entry(v, work);
      const int bit = work[v];
      if (e.learnable) {
        per_config[z].push_back(static_cast<std::int32_t>(2 * e.index + static_cast<std::size_t>(bit)));
      } else {
        const double p = clamp_probability(e.value);
        known += std::log(bit == 1 ? p : 1.0 - p);
      }
    }
    known_[z] = known;
    slots_ = std::max(slots_, per_config[z].size());
  }

  codes_.assign(slots_ * padded_, zero_code_);
  std::map<std::int32_t, double> uniform;
  const double share = 1.0 / static_cast<double>(configs_);
  for (std::size_t z = 0; z < configs_; ++z) {
    for (std::size_t j = 0; j < per_config[z].size(); ++j) {
      codes_[j * padded_ + z] = per_config[z][j];
      uniform[per_config[z][j]] += share;
    }
    uniform_known_ += share * known_[z];
  }
  uniform_counts_.assign(uniform.begin(), uniform.end());

  if (uniform.size() * padded_ <= kDenseLimit) {
    std::map<std::int32_t, std::size_t> group_of;
    for (const auto& [code, _] : uniform) {
      group_of[code] = group_codes_.size();
      group_codes_.push_back(code);
    }
    weights_.assign(group_codes_.size() * padded_, 0.0);
    for (std::size_t z = 0; z < configs_; ++z)
      for (auto code : per_config[z]) weights_[group_of[code] * padded_ + z] += 1.0;
  }
}

StepKernelView CompiledStep::view() const {
  StepKernelView v = gather_view();
  if (dense()) {
    v.group_codes = group_codes_.data();
    v.weights = weights_.data();
    v.groups = group_codes_.size();
  }
  return v;
}

ObservationHistory::ObservationHistory(std::shared_ptr<const InfluenceDiagram> diagram) : diagram_(std::move(diagram)) {}

void ObservationHistory::push(const Action& a, const Assignment& observed) {
  std::vector<int> key;
  key.reserve(diagram_->observed_nodes().size());
  for (auto v : diagram_->observed_nodes()) key.push_back(observed[v]);
  auto& slot = cache_[{a, key}];
  if (!slot) slot = std::make_shared<const CompiledStep>(*diagram_, a, observed);
  steps_.push_back(slot);
  views_.push_back(slot->view());
  actions_.push_back(a);
  Assignment stored = observed;
  for (auto v : diagram_->latent_nodes()) stored[v] = kUnset;
  observed_.push_back(std::move(stored));
}

}  // namespace idbandit
