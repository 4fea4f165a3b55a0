#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "rng.hpp"
#include "trace.hpp"

namespace tracesynth {

/// Three-layer value network: input N -> hidden H -> hidden H -> output N,
/// rectified-linear on the hidden layers, identity on the output. Weights are
/// double precision throughout; the layout is column-major (Eigen default).
struct QNetwork {
    Eigen::MatrixXd w1; // H x N
    Eigen::VectorXd b1; // H
    Eigen::MatrixXd w2; // H x H
    Eigen::VectorXd b2; // H
    Eigen::MatrixXd w3; // N x H
    Eigen::VectorXd b3; // N

    std::uint32_t input_size() const { return static_cast<std::uint32_t>(w1.cols()); }
    std::uint32_t hidden_size() const { return static_cast<std::uint32_t>(w1.rows()); }

    /// Weights uniform in [-sqrt(6/fan_in), +sqrt(6/fan_in)], biases zero.
    /// Coefficients are drawn in storage order, w1 then w2 then w3, so the
    /// result is reproducible for a given rng state.
    static QNetwork init(std::uint32_t n, std::uint32_t hidden, Rng& rng);

    /// Intermediate values kept from a forward pass for backpropagation.
    /// Columns index batch elements.
    struct Activations {
        Eigen::MatrixXd x;  // N x B input
        Eigen::MatrixXd z1; // H x B pre-activation
        Eigen::MatrixXd a1; // H x B post-relu
        Eigen::MatrixXd z2; // H x B
        Eigen::MatrixXd a2; // H x B
        Eigen::MatrixXd q;  // N x B output
    };

    Eigen::VectorXd forward(const Eigen::VectorXd& state) const;
    Eigen::VectorXd forward(const StateEncoding& state) const;

    /// `x` holds one state per column; returns Q-values, one column per
    /// state. Pass `acts` to keep the intermediates for a backward pass.
    Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& x, Activations* acts = nullptr) const;

    bool finite() const;
};

Eigen::VectorXd to_vector(const StateEncoding& state);

} // namespace tracesynth
