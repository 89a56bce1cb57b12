#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace promptpainter {

enum class OptimizerKind {
    plain_gradient_descent,
    adaptive_moments,
};

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

/// Per-level optimizer state over a flat parameter vector. Latent shapes
/// change between hierarchy levels, so each level starts fresh.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double learning_rate, std::size_t n_params);

    void update(std::vector<double>& params, const std::vector<double>& grad);

private:
    OptimizerKind kind_;
    double lr_;
    long step_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

} // namespace promptpainter
