#pragma once

#include <string>
#include <vector>

#include "porogen/tensor.hpp"

namespace porogen::ad {

// A trainable tensor with a stable identifier for checkpointing.
struct Parameter {
  std::string id;
  Tensor tensor;  // requires_grad = true
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias-corrected first and second moments. Moment buffers are
// keyed by parameter order and start at zero.
class AdamState {
 public:
  AdamState() = default;
  AdamState(const std::vector<Parameter>& params, AdamConfig config);

  // One update: t += 1, then for each parameter
  //   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2,
  //   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
  void step(std::vector<Parameter>& params);

  std::int64_t t() const { return t_; }
  const AdamConfig& config() const { return config_; }

  const std::vector<std::vector<double>>& moments1() const { return m_; }
  const std::vector<std::vector<double>>& moments2() const { return v_; }
  // Checkpoint restore; shapes must match the construction-time layout.
  void restore(std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v, std::int64_t t);

 private:
  AdamConfig config_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
};

inline void adam_step(std::vector<Parameter>& params, AdamState& state) {
  state.step(params);
}

}  // namespace porogen::ad
