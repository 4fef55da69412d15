#include "porogen/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace porogen::ad {

AdamState::AdamState(const std::vector<Parameter>& params, AdamConfig config)
    : config_(config) {
  if (!(config.lr >= 0.0) || config.beta1 < 0.0 || config.beta1 >= 1.0 ||
      config.beta2 < 0.0 || config.beta2 >= 1.0 || config.eps <= 0.0)
    throw std::invalid_argument("adam: bad hyperparameters");
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (const auto& p : params) {
    if (!p.tensor.requires_grad())
      throw std::invalid_argument("adam: parameter '" + p.id +
                                  "' has no gradient buffer");
    m_.emplace_back(p.tensor.size(), 0.0);
    v_.emplace_back(p.tensor.size(), 0.0);
  }
}

void AdamState::step(std::vector<Parameter>& params) {
  if (params.size() != m_.size())
    throw std::invalid_argument("adam: parameter list does not match state");
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (!p.tensor.requires_grad())
      throw std::invalid_argument("adam: parameter '" + p.id +
                                  "' has no gradient buffer");
    if (p.tensor.size() != static_cast<std::int64_t>(m_[i].size()))
      throw std::invalid_argument("adam: shape drift on parameter '" + p.id +
                                  "'");
    auto g = p.tensor.grad();
    auto w = p.tensor.values_mut();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < m.size(); ++j) {
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      w[j] -= config_.lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

void AdamState::restore(std::vector<std::vector<double>> m,
                        std::vector<std::vector<double>> v, std::int64_t t) {
  if (m.size() != m_.size() || v.size() != v_.size() || t < 0)
    throw std::invalid_argument("adam: restore layout mismatch");
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i].size() != m_[i].size() || v[i].size() != v_[i].size())
      throw std::invalid_argument("adam: restore shape mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

}  // namespace porogen::ad
