#ifndef DANKU_NETWORK_HPP
#define DANKU_NETWORK_HPP

#include <danku/commitments.hpp>
#include <danku/errors.hpp>
#include <danku/fixed_point.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace danku {

using Address = std::string;

/// Layer widths `[input_dim, hidden..., output_dim]`.
struct ModelDefinition {
    std::vector<std::size_t> layer_sizes;

    void validate() const {
        if (layer_sizes.size() < 2) {
            throw ShapeMismatchError("model needs at least an input and an output layer");
        }
        for (std::size_t s : layer_sizes) {
            if (s == 0) {
                throw ShapeMismatchError("layer sizes must be positive");
            }
        }
    }

    std::size_t input_dim() const { return layer_sizes.front(); }
    std::size_t output_dim() const { return layer_sizes.back(); }
    std::size_t transitions() const { return layer_sizes.size() - 1; }

    friend bool operator==(const ModelDefinition&, const ModelDefinition&) = default;
};

/// Dense transition; `weights` is row-major `fan_out x fan_in`.
struct DenseLayer {
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    std::vector<FixedPoint> weights;
    std::vector<FixedPoint> biases;

    FixedPoint weight(std::size_t out, std::size_t in) const { return weights[out * fan_in + in]; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct WeightsBiases {
    std::vector<DenseLayer> layers;

    friend bool operator==(const WeightsBiases&, const WeightsBiases&) = default;
};

inline void check_shapes(const ModelDefinition& model, const WeightsBiases& params) {
    model.validate();
    if (params.layers.size() != model.transitions()) {
        throw ShapeMismatchError("expected " + std::to_string(model.transitions()) + " layers, got " +
                                 std::to_string(params.layers.size()));
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const DenseLayer& layer = params.layers[l];
        const std::size_t in = model.layer_sizes[l];
        const std::size_t out = model.layer_sizes[l + 1];
        if (layer.fan_in != in || layer.fan_out != out || layer.weights.size() != in * out ||
            layer.biases.size() != out) {
            throw ShapeMismatchError("layer " + std::to_string(l) + " does not match " + std::to_string(out) +
                                     "x" + std::to_string(in));
        }
    }
}

/// All-zero parameters shaped for `model`.
inline WeightsBiases zero_params(const ModelDefinition& model) {
    model.validate();
    WeightsBiases params;
    for (std::size_t l = 0; l < model.transitions(); ++l) {
        const std::size_t in = model.layer_sizes[l];
        const std::size_t out = model.layer_sizes[l + 1];
        params.layers.push_back(DenseLayer{in, out, std::vector<FixedPoint>(in * out), std::vector<FixedPoint>(out)});
    }
    return params;
}

/// Fixed-point operations (multiplies plus adds) one forward pass performs.
inline std::uint64_t forward_pass_ops(const ModelDefinition& model) {
    std::uint64_t ops = 0;
    for (std::size_t l = 0; l < model.transitions(); ++l) {
        ops += 2 * static_cast<std::uint64_t>(model.layer_sizes[l]) * model.layer_sizes[l + 1];
    }
    return ops;
}

/// Dense feed-forward: ReLU on hidden layers, raw scores from the last.
inline std::vector<FixedPoint> forward_pass(const ModelDefinition& model,
                                            const WeightsBiases& params,
                                            std::span<const FixedPoint> input,
                                            Scale scale) {
    check_shapes(model, params);
    if (input.size() != model.input_dim()) {
        throw ShapeMismatchError("input has " + std::to_string(input.size()) + " values, model expects " +
                                 std::to_string(model.input_dim()));
    }
    std::vector<FixedPoint> activations(input.begin(), input.end());
    std::vector<FixedPoint> next;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const DenseLayer& layer = params.layers[l];
        const bool hidden = l + 1 < params.layers.size();
        next.assign(layer.fan_out, FixedPoint{});
        for (std::size_t o = 0; o < layer.fan_out; ++o) {
            FixedPoint acc = layer.biases[o];
            for (std::size_t i = 0; i < layer.fan_in; ++i) {
                acc = fp_add(acc, fp_mul(layer.weight(o, i), activations[i], scale));
            }
            next[o] = hidden ? relu(acc) : acc;
        }
        activations.swap(next);
    }
    return activations;
}

/// Index of the highest score; ties go to the lowest index.
inline std::size_t argmax(std::span<const FixedPoint> scores) {
    if (scores.empty()) {
        throw ShapeMismatchError("argmax of empty score vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    return best;
}

inline std::vector<FixedPoint> lift_inputs(std::span<const std::int64_t> raw, Scale scale) {
    std::vector<FixedPoint> out;
    out.reserve(raw.size());
    for (std::int64_t x : raw) {
        out.push_back(FixedPoint::from_int(x, scale));
    }
    return out;
}

inline std::size_t predict(const ModelDefinition& model,
                           const WeightsBiases& params,
                           std::span<const FixedPoint> input,
                           Scale scale) {
    const std::vector<FixedPoint> scores = forward_pass(model, params, input, scale);
    return argmax(scores);
}

/// Fraction of points whose predicted label matches, as `correct * 2^bits / n`.
/// Data point inputs are integer feature values.
inline FixedPoint accuracy(const ModelDefinition& model,
                           const WeightsBiases& params,
                           std::span<const DataPoint> dataset,
                           Scale scale) {
    if (dataset.empty()) {
        throw ShapeMismatchError("accuracy over an empty dataset");
    }
    std::int64_t correct = 0;
    for (const DataPoint& p : dataset) {
        const std::vector<FixedPoint> input = lift_inputs(p.inputs, scale);
        if (p.label >= 0 && predict(model, params, input, scale) == static_cast<std::size_t>(p.label)) {
            ++correct;
        }
    }
    return FixedPoint{correct * scale.denominator() / static_cast<std::int64_t>(dataset.size())};
}

struct Submission {
    std::uint64_t id = 0;
    ModelDefinition model;
    WeightsBiases params;
    Address payment_address;
    Address submitter;
    std::uint64_t submitted_at = 0;
};

}  // namespace danku

#endif  // DANKU_NETWORK_HPP
