#include "cfrl/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "cfrl/errors.hpp"

namespace cfrl {

MlpParams init_mlp(int input_dim, int hidden_dim, int output_dim,
                   OutputActivation activation, Rng& rng, double output_bound) {
    if (input_dim < 1 || hidden_dim < 1 || output_dim < 1) {
        throw ConfigError("init_mlp: dimensions must be at least 1");
    }
    MlpParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.output_dim = output_dim;
    p.activation = activation;
    p.output_bound = output_bound;
    p.theta.assign(p.parameter_count(), 0.0);

    const double bound1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    double* w1 = p.theta.data() + p.w1_offset();
    for (int i = 0; i < hidden_dim * input_dim; ++i) w1[i] = rng.uniform(-bound1, bound1);

    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    double* w2 = p.theta.data() + p.w2_offset();
    for (int i = 0; i < output_dim * hidden_dim; ++i) w2[i] = rng.uniform(-bound2, bound2);

    return p;
}

void forward(const MlpParams& params, std::span<const double> input, ForwardCache& cache) {
    const int in = params.input_dim;
    const int hid = params.hidden_dim;
    const int out = params.output_dim;
    if (static_cast<int>(input.size()) != in) {
        throw ConfigError("forward: input dimension mismatch");
    }

    cache.input.assign(input.begin(), input.end());
    cache.hidden_pre.resize(static_cast<std::size_t>(hid));
    cache.hidden.resize(static_cast<std::size_t>(hid));
    cache.output_pre.resize(static_cast<std::size_t>(out));
    cache.output.resize(static_cast<std::size_t>(out));

    const double* w1 = params.theta.data() + params.w1_offset();
    const double* b1 = params.theta.data() + params.b1_offset();
    const double* w2 = params.theta.data() + params.w2_offset();
    const double* b2 = params.theta.data() + params.b2_offset();

    for (int h = 0; h < hid; ++h) {
        double acc = b1[h];
        const double* row = w1 + static_cast<std::size_t>(h) * in;
        for (int j = 0; j < in; ++j) acc += row[j] * input[static_cast<std::size_t>(j)];
        cache.hidden_pre[static_cast<std::size_t>(h)] = acc;
        cache.hidden[static_cast<std::size_t>(h)] = acc > 0.0 ? acc : 0.0;
    }
    for (int o = 0; o < out; ++o) {
        double acc = b2[o];
        const double* row = w2 + static_cast<std::size_t>(o) * hid;
        for (int h = 0; h < hid; ++h) acc += row[h] * cache.hidden[static_cast<std::size_t>(h)];
        cache.output_pre[static_cast<std::size_t>(o)] = acc;
        cache.output[static_cast<std::size_t>(o)] =
            params.activation == OutputActivation::tanh_scaled
                ? params.output_bound * std::tanh(acc)
                : acc;
    }
}

double forward_scalar(const MlpParams& params, std::span<const double> input) {
    ForwardCache cache;
    forward(params, input, cache);
    return cache.output[0];
}

Gradients make_gradients(const MlpParams& params) {
    return Gradients(params.parameter_count(), 0.0);
}

void backward(const MlpParams& params, const ForwardCache& cache,
              std::span<const double> output_grad, Gradients& grads,
              std::vector<double>* input_grad) {
    const int in = params.input_dim;
    const int hid = params.hidden_dim;
    const int out = params.output_dim;

    double* g_w1 = grads.data() + params.w1_offset();
    double* g_b1 = grads.data() + params.b1_offset();
    double* g_w2 = grads.data() + params.w2_offset();
    double* g_b2 = grads.data() + params.b2_offset();
    const double* w1 = params.theta.data() + params.w1_offset();
    const double* w2 = params.theta.data() + params.w2_offset();

    // d(loss)/d(output_pre)
    thread_local std::vector<double> d_out_pre;
    thread_local std::vector<double> d_hidden_pre;
    d_out_pre.resize(static_cast<std::size_t>(out));
    d_hidden_pre.assign(static_cast<std::size_t>(hid), 0.0);

    for (int o = 0; o < out; ++o) {
        double g = output_grad[static_cast<std::size_t>(o)];
        if (params.activation == OutputActivation::tanh_scaled) {
            const double t = std::tanh(cache.output_pre[static_cast<std::size_t>(o)]);
            g *= params.output_bound * (1.0 - t * t);
        }
        d_out_pre[static_cast<std::size_t>(o)] = g;
    }

    for (int o = 0; o < out; ++o) {
        const double g = d_out_pre[static_cast<std::size_t>(o)];
        double* g_row = g_w2 + static_cast<std::size_t>(o) * hid;
        const double* w_row = w2 + static_cast<std::size_t>(o) * hid;
        for (int h = 0; h < hid; ++h) {
            g_row[h] += g * cache.hidden[static_cast<std::size_t>(h)];
            d_hidden_pre[static_cast<std::size_t>(h)] += g * w_row[h];
        }
        g_b2[o] += g;
    }

    for (int h = 0; h < hid; ++h) {
        if (cache.hidden_pre[static_cast<std::size_t>(h)] <= 0.0) {
            d_hidden_pre[static_cast<std::size_t>(h)] = 0.0;
        }
    }

    for (int h = 0; h < hid; ++h) {
        const double g = d_hidden_pre[static_cast<std::size_t>(h)];
        if (g == 0.0) continue;
        double* g_row = g_w1 + static_cast<std::size_t>(h) * in;
        for (int j = 0; j < in; ++j) g_row[j] += g * cache.input[static_cast<std::size_t>(j)];
        g_b1[h] += g;
    }

    if (input_grad != nullptr) {
        for (int j = 0; j < in; ++j) {
            double acc = 0.0;
            for (int h = 0; h < hid; ++h) {
                acc += d_hidden_pre[static_cast<std::size_t>(h)] *
                       w1[static_cast<std::size_t>(h) * in + j];
            }
            (*input_grad)[static_cast<std::size_t>(j)] += acc;
        }
    }
}

AdamState make_adam(const MlpParams& params, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.m.assign(params.parameter_count(), 0.0);
    s.v.assign(params.parameter_count(), 0.0);
    return s;
}

void adam_step(MlpParams& params, const Gradients& grads, AdamState& adam) {
    const std::size_t n = params.theta.size();
    if (grads.size() != n || adam.m.size() != n) {
        throw ConfigError("adam_step: shape mismatch");
    }
    adam.timestep += 1;
    const double b1 = adam.beta1;
    const double b2 = adam.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(adam.timestep));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(adam.timestep));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grads[i];
        if (!std::isfinite(g)) {
            throw NumericError("adam_step: non-finite gradient");
        }
        adam.m[i] = b1 * adam.m[i] + (1.0 - b1) * g;
        adam.v[i] = b2 * adam.v[i] + (1.0 - b2) * g * g;
        const double m_hat = adam.m[i] / corr1;
        const double v_hat = adam.v[i] / corr2;
        params.theta[i] -= adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
}

void soft_update(MlpParams& target, const MlpParams& source, double tau) {
    if (target.theta.size() != source.theta.size()) {
        throw ConfigError("soft_update: shape mismatch");
    }
    for (std::size_t i = 0; i < target.theta.size(); ++i) {
        target.theta[i] = tau * source.theta[i] + (1.0 - tau) * target.theta[i];
    }
}

}  // namespace cfrl
