#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "idbandit/diagram.hpp"
#include "idbandit/simd/kernels.hpp"

namespace idbandit {

/// Log-likelihood structure of one observed step (a, x) over every latent
/// configuration.
///
/// For configuration z the clamped log-probability of known factors is
/// `known[z]` and the learnable factors are the codes `codes[j * padded + z]`
/// for j < slots, where code 2i + bit selects E[log(1 - theta_i)] (bit 0) or
/// E[log theta_i] (bit 1). Configurations are padded to a multiple of
/// kKernelLanes; padding lanes carry kPaddingLogWeight and the zero code.
inline constexpr std::size_t kDenseLimit = std::size_t{1} << 16;

class CompiledStep {
 public:
  CompiledStep(const InfluenceDiagram& diagram, const Action& a, const Assignment& observed);

  std::size_t configs() const { return configs_; }
  std::size_t padded_configs() const { return padded_; }
  std::size_t slots() const { return slots_; }
  std::int32_t zero_code() const { return zero_code_; }

  const std::vector<double>& known() const { return known_; }
  const std::vector<std::int32_t>& codes() const { return codes_; }

  /// Distinct codes and their per-configuration multiplicities; empty when the
  /// dense layout would exceed kDenseLimit entries.
  const std::vector<std::int32_t>& group_codes() const { return group_codes_; }
  const std::vector<double>& weights() const { return weights_; }
  bool dense() const { return !weights_.empty(); }

  StepKernelView view() const;
  StepKernelView gather_view() const { return {known_.data(), codes_.data(), padded_, slots_}; }

  /// Expected counts contributed by a uniform table, as (code, weight) pairs.
  const std::vector<std::pair<std::int32_t, double>>& uniform_counts() const { return uniform_counts_; }
  double uniform_known() const { return uniform_known_; }

 private:
  std::size_t configs_ = 0;
  std::size_t padded_ = 0;
  std::size_t slots_ = 0;
  std::int32_t zero_code_ = 0;
  std::vector<double> known_;
  std::vector<std::int32_t> codes_;
  std::vector<std::int32_t> group_codes_;
  std::vector<double> weights_;
  std::vector<std::pair<std::int32_t, double>> uniform_counts_;
  double uniform_known_ = 0.0;
};

/// Observed steps (a_l, x_l) with their compiled likelihood structure. Steps
/// with identical (a, x) share one CompiledStep.
class ObservationHistory {
 public:
  explicit ObservationHistory(std::shared_ptr<const InfluenceDiagram> diagram);

  /// Latent values in `observed` are ignored.
  void push(const Action& a, const Assignment& observed);

  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const CompiledStep& step(std::size_t l) const { return *steps_[l]; }
  const StepKernelView& view(std::size_t l) const { return views_[l]; }
  const Action& action(std::size_t l) const { return actions_[l]; }
  const Assignment& observed(std::size_t l) const { return observed_[l]; }
  const InfluenceDiagram& diagram() const { return *diagram_; }
  std::size_t latent_configs() const { return std::size_t{1} << diagram_->latent_nodes().size(); }

 private:
  std::shared_ptr<const InfluenceDiagram> diagram_;
  std::vector<std::shared_ptr<const CompiledStep>> steps_;
  std::vector<StepKernelView> views_;
  std::vector<Action> actions_;
  std::vector<Assignment> observed_;
  std::map<std::pair<Action, std::vector<int>>, std::shared_ptr<const CompiledStep>> cache_;
};

}  // namespace idbandit
