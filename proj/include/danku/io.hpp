#ifndef DANKU_IO_HPP
#define DANKU_IO_HPP

// JSON interchange for models and data groups.
//
// Model file ("danku-model/1"), fields in this order:
//   format      "danku-model/1"
//   scale_bits  integer, the fixed-point exponent f
//   layer_sizes [input_dim, hidden..., output_dim]
//   layers      one object per transition:
//                 weights  fan_out rows of fan_in integer mantissas
//                 biases   fan_out integer mantissas
//
// Data group file:
//   points  [{"inputs": [int, ...], "label": int}, ...]

#include <danku/commitments.hpp>
#include <danku/errors.hpp>
#include <danku/fixed_point.hpp>
#include <danku/network.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace danku {

using Json = nlohmann::json;

inline constexpr const char* kModelFormat = "danku-model/1";

struct ModelFile {
    Scale scale;
    ModelDefinition model;
    WeightsBiases params;
};

namespace detail {

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ConfigError(path + key, "missing field");
    }
    return obj.at(key);
}

inline std::int64_t as_int(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return v.get<std::int64_t>();
}

inline std::uint64_t as_uint(const Json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline const Json& as_array(const Json& v, const std::string& path) {
    if (!v.is_array()) {
        throw ConfigError(path, "expected an array");
    }
    return v;
}

}  // namespace detail

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

inline Json params_to_json(const ModelDefinition& model, const WeightsBiases& params, Scale scale) {
    check_shapes(model, params);
    Json layers = Json::array();
    for (const DenseLayer& layer : params.layers) {
        Json rows = Json::array();
        for (std::size_t o = 0; o < layer.fan_out; ++o) {
            Json row = Json::array();
            for (std::size_t i = 0; i < layer.fan_in; ++i) {
                row.push_back(layer.weight(o, i).mantissa);
            }
            rows.push_back(std::move(row));
        }
        Json biases = Json::array();
        for (FixedPoint b : layer.biases) {
            biases.push_back(b.mantissa);
        }
        layers.push_back(Json{{"weights", std::move(rows)}, {"biases", std::move(biases)}});
    }
    return Json{{"format", kModelFormat},
                {"scale_bits", scale.bits},
                {"layer_sizes", model.layer_sizes},
                {"layers", std::move(layers)}};
}

/// Reads a model object; `path` prefixes field names in error messages.
inline ModelFile model_from_json(const Json& j, const std::string& path = "") {
    ModelFile out;
    if (j.contains("format") && j.at("format") != kModelFormat) {
        throw ConfigError(path + "format", "unsupported model format " + j.at("format").dump());
    }
    out.scale.bits = static_cast<int>(detail::as_int(detail::require(j, "scale_bits", path), path + "scale_bits"));
    out.scale.validate();
    for (const Json& s : detail::as_array(detail::require(j, "layer_sizes", path), path + "layer_sizes")) {
        out.model.layer_sizes.push_back(detail::as_uint(s, path + "layer_sizes"));
    }
    try {
        out.model.validate();
    } catch (const ShapeMismatchError& e) {
        throw ConfigError(path + "layer_sizes", e.what());
    }

    const Json& layers = detail::as_array(detail::require(j, "layers", path), path + "layers");
    if (layers.size() != out.model.transitions()) {
        throw ConfigError(path + "layers", "expected " + std::to_string(out.model.transitions()) + " layers");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string lp = path + "layers[" + std::to_string(l) + "].";
        DenseLayer layer;
        layer.fan_in = out.model.layer_sizes[l];
        layer.fan_out = out.model.layer_sizes[l + 1];
        const Json& rows = detail::as_array(detail::require(layers[l], "weights", lp), lp + "weights");
        if (rows.size() != layer.fan_out) {
            throw ConfigError(lp + "weights", "expected " + std::to_string(layer.fan_out) + " rows");
        }
        for (const Json& row : rows) {
            if (!row.is_array() || row.size() != layer.fan_in) {
                throw ConfigError(lp + "weights", "expected rows of " + std::to_string(layer.fan_in) + " values");
            }
            for (const Json& w : row) {
                layer.weights.push_back(FixedPoint{detail::as_int(w, lp + "weights")});
            }
        }
        const Json& biases = detail::as_array(detail::require(layers[l], "biases", lp), lp + "biases");
        if (biases.size() != layer.fan_out) {
            throw ConfigError(lp + "biases", "expected " + std::to_string(layer.fan_out) + " values");
        }
        for (const Json& b : biases) {
            layer.biases.push_back(FixedPoint{detail::as_int(b, lp + "biases")});
        }
        out.params.layers.push_back(std::move(layer));
    }
    return out;
}

inline Json point_to_json(const DataPoint& p) {
    return Json{{"inputs", p.inputs}, {"label", p.label}};
}

/// Accepts `{"inputs": [...], "label": n}` or the compact `[x1, ..., xn, label]`.
inline DataPoint point_from_json(const Json& j, const std::string& path) {
    DataPoint p;
    if (j.is_array()) {
        if (j.size() < 2) {
            throw ConfigError(path, "compact point needs at least one input and a label");
        }
        for (std::size_t i = 0; i + 1 < j.size(); ++i) {
            p.inputs.push_back(detail::as_int(j[i], path));
        }
        p.label = detail::as_int(j.back(), path);
        return p;
    }
    for (const Json& x : detail::as_array(detail::require(j, "inputs", path + "."), path + ".inputs")) {
        p.inputs.push_back(detail::as_int(x, path + ".inputs"));
    }
    p.label = detail::as_int(detail::require(j, "label", path + "."), path + ".label");
    return p;
}

inline std::vector<DataPoint> points_from_json(const Json& j, const std::string& path) {
    std::vector<DataPoint> points;
    const Json& arr = detail::as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        points.push_back(point_from_json(arr[i], path + "[" + std::to_string(i) + "]"));
    }
    return points;
}

inline Json group_to_json(const DataGroup& group) {
    Json points = Json::array();
    for (const DataPoint& p : group.points) {
        points.push_back(point_to_json(p));
    }
    return Json{{"points", std::move(points)}};
}

inline DataGroup group_from_json(const Json& j) {
    DataGroup g;
    g.points = points_from_json(detail::require(j, "points", ""), "points");
    return g;
}

}  // namespace danku

#endif  // DANKU_IO_HPP
