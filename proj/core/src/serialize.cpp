#include <json.hpp>

#include "sinet/net.hpp"

namespace sinet {

using nlohmann::json;

namespace {

json coefficient(const Rational& q, bool exact) {
    double d = q.get_d();
    if (!exact || Rational(d) == q) return d;
    return q.get_str();
}

Rational read_coefficient(const json& v, std::size_t layer) {
    if (v.is_number_integer()) return Rational(std::to_string(v.get<long long>()));
    if (v.is_number()) return from_double(v.get<double>());
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(e.what(), layer);
        }
    }
    throw ParseError("coefficient is not a number", layer);
}

}  // namespace

std::string serialize(const ReluNet& net, bool exact) {
    json doc;
    doc["version"] = 1;
    doc["input_dim"] = net.input_dim();
    json layers = json::array();
    for (const auto& layer : net.layers()) {
        json weights = json::array();
        for (const auto& row : layer.dense_weights()) {
            json jr = json::array();
            for (const auto& v : row) jr.push_back(coefficient(v, exact));
            weights.push_back(std::move(jr));
        }
        json bias = json::array();
        for (const auto& b : layer.bias()) bias.push_back(coefficient(b, exact));
        layers.push_back({{"weights", std::move(weights)}, {"bias", std::move(bias)}});
    }
    doc["layers"] = std::move(layers);
    return doc.dump();
}

ReluNet deserialize(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed network document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("network document must be a JSON object");
    if (!doc.contains("version") || doc["version"] != 1) throw ParseError("unsupported or missing version");
    if (!doc.contains("input_dim") || !doc["input_dim"].is_number_unsigned() || doc["input_dim"].get<std::size_t>() == 0)
        throw ParseError("input_dim must be a positive integer");
    if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty())
        throw ParseError("layers must be a non-empty array");

    std::size_t prev = doc["input_dim"].get<std::size_t>();
    std::vector<AffineLayer> layers;
    const json& jl = doc["layers"];
    for (std::size_t l = 0; l < jl.size(); ++l) {
        const json& rec = jl[l];
        if (!rec.is_object() || !rec.contains("weights") || !rec.contains("bias"))
            throw ParseError("layer record needs weights and bias", l);
        const json& w = rec["weights"];
        const json& b = rec["bias"];
        if (!w.is_array() || !b.is_array() || w.empty()) throw ParseError("weights and bias must be arrays", l);
        if (b.size() != w.size()) throw ParseError("bias length differs from weight rows", l);
        std::vector<Entry> entries;
        RVec bias;
        for (std::size_t r = 0; r < w.size(); ++r) {
            if (!w[r].is_array() || w[r].size() != prev)
                throw ParseError("weight row " + std::to_string(r) + " must have " + std::to_string(prev) + " columns",
                                 l);
            for (std::size_t c = 0; c < prev; ++c) {
                Rational v = read_coefficient(w[r][c], l);
                if (sgn(v) != 0) entries.push_back({r, c, std::move(v)});
            }
            bias.push_back(read_coefficient(b[r], l));
        }
        layers.emplace_back(w.size(), prev, std::move(entries), std::move(bias));
        prev = w.size();
    }
    return ReluNet(doc["input_dim"].get<std::size_t>(), std::move(layers));
}

}  // namespace sinet
