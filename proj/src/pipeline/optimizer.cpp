#include "promptpainter/pipeline/optimizer.hpp"

#include "promptpainter/core/errors.hpp"

#include <cmath>

namespace promptpainter {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;
} // namespace

std::string to_string(OptimizerKind kind) {
    return kind == OptimizerKind::plain_gradient_descent ? "plain_gradient_descent"
                                                         : "adaptive_moments";
}

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "plain_gradient_descent") {
        return OptimizerKind::plain_gradient_descent;
    }
    if (name == "adaptive_moments") {
        return OptimizerKind::adaptive_moments;
    }
    throw ConfigError("optimizer: unknown kind '" + name +
                      "' (expected plain_gradient_descent or adaptive_moments)");
}

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params)
    : kind_(kind), lr_(learning_rate) {
    if (learning_rate < 0.0) {
        throw DomainError("learning rate must be >= 0");
    }
    if (kind_ == OptimizerKind::adaptive_moments) {
        m_.assign(n_params, 0.0);
        v_.assign(n_params, 0.0);
    }
}

void Optimizer::update(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != grad.size() || (kind_ == OptimizerKind::adaptive_moments && params.size() != m_.size())) {
        throw DomainError("optimizer parameter/gradient size mismatch");
    }
    if (kind_ == OptimizerKind::plain_gradient_descent) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            params[i] -= lr_ * grad[i];
        }
        return;
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEpsilon);
    }
}

} // namespace promptpainter
