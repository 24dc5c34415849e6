#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cfrl/rng.hpp"

namespace cfrl {

enum class OutputActivation { linear, tanh_scaled };

// One-hidden-layer dense network (ReLU hidden units). Parameters live in a
// single flat vector with a fixed layout:
//   [ W1 (hidden x input, row-major) | b1 | W2 (output x hidden, row-major) | b2 ]
// which makes the optimizer, soft updates and checkpoints plain loops over
// one array.
struct MlpParams {
    int input_dim = 0;
    int hidden_dim = 0;
    int output_dim = 0;
    OutputActivation activation = OutputActivation::linear;
    double output_bound = 3.0;  // scale applied after tanh
    std::vector<double> theta;

    std::size_t w1_offset() const { return 0; }
    std::size_t b1_offset() const {
        return static_cast<std::size_t>(hidden_dim) * static_cast<std::size_t>(input_dim);
    }
    std::size_t w2_offset() const { return b1_offset() + static_cast<std::size_t>(hidden_dim); }
    std::size_t b2_offset() const {
        return w2_offset() +
               static_cast<std::size_t>(output_dim) * static_cast<std::size_t>(hidden_dim);
    }
    std::size_t parameter_count() const {
        return b2_offset() + static_cast<std::size_t>(output_dim);
    }
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
MlpParams init_mlp(int input_dim, int hidden_dim, int output_dim,
                   OutputActivation activation, Rng& rng, double output_bound = 3.0);

struct ForwardCache {
    std::vector<double> input;
    std::vector<double> hidden_pre;
    std::vector<double> hidden;
    std::vector<double> output_pre;
    std::vector<double> output;
};

// Fills the cache; cache.output holds the network output.
void forward(const MlpParams& params, std::span<const double> input, ForwardCache& cache);

// Convenience for single-output networks.
double forward_scalar(const MlpParams& params, std::span<const double> input);

using Gradients = std::vector<double>;  // same layout and length as MlpParams::theta

Gradients make_gradients(const MlpParams& params);

// Reverse-mode pass for the forward call that produced `cache`. Parameter
// gradients are accumulated (+=) into `grads`; when `input_grad` is non-null
// the gradient with respect to the input is accumulated into it as well (it
// must already have input_dim entries).
void backward(const MlpParams& params, const ForwardCache& cache,
              std::span<const double> output_grad, Gradients& grads,
              std::vector<double>* input_grad = nullptr);

struct AdamState {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long long timestep = 0;
    std::vector<double> m;
    std::vector<double> v;
};

AdamState make_adam(const MlpParams& params, double learning_rate = 0.001);

// Standard Adam with bias correction. Throws NumericError on non-finite
// gradients.
void adam_step(MlpParams& params, const Gradients& grads, AdamState& adam);

// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(MlpParams& target, const MlpParams& source, double tau = 0.001);

}  // namespace cfrl
