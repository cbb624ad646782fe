#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rescost/matrix.hpp"
#include "rescost/nonlinear.hpp"
#include "rescost/oracle.hpp"
#include "rescost/spectral_cost.hpp"
#include "rescost/witness.hpp"

// JSON schema family:
//   matrix   {"rows": int, "cols": int, "entries": [row-major floats]}
//   linear   {"block_depth": 1|2, "w_u": M, "w_e": M, "blocks": [...]}
//   nonlinear adds "b_u", "b_e" and per-block bias arrays
//   blocks   depth-1 {"w": M [, "b": [...]]}, depth-2 {"w1": M, "w2": M [, "b1", "b2"]}
//   fplf     {"layers": [{"w": M, "b": [...]}, ...]}

namespace rescost {

inline nlohmann::json to_json(const Matrix& m) {
    return nlohmann::json{{"rows", m.rows()},
                          {"cols", m.cols()},
                          {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("entries").get<std::vector<double>>());
}

inline nlohmann::json to_json(const LinearResNetParams& p) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const ResidualBlock& b : p.blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, Depth1Block>) {
                    blocks.push_back({{"w", to_json(blk.w)}});
                } else {
                    blocks.push_back({{"w1", to_json(blk.w1)}, {"w2", to_json(blk.w2)}});
                }
            },
            b);
    }
    return nlohmann::json{{"block_depth", p.block_depth},
                          {"w_u", to_json(p.w_u)},
                          {"w_e", to_json(p.w_e)},
                          {"blocks", std::move(blocks)}};
}

inline LinearResNetParams linear_params_from_json(const nlohmann::json& j) {
    LinearResNetParams p;
    p.block_depth = j.at("block_depth").get<int>();
    p.w_u = matrix_from_json(j.at("w_u"));
    p.w_e = matrix_from_json(j.at("w_e"));
    for (const auto& b : j.at("blocks")) {
        if (p.block_depth == 1) {
            p.blocks.push_back(Depth1Block{matrix_from_json(b.at("w"))});
        } else {
            p.blocks.push_back(Depth2Block{matrix_from_json(b.at("w1")), matrix_from_json(b.at("w2"))});
        }
    }
    validate_shapes(p);
    return p;
}

inline nlohmann::json to_json(const NonlinResNetParams& p) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const NonlinBlock& b : p.blocks) {
        std::visit(
            [&](const auto& blk) {
                using T = std::decay_t<decltype(blk)>;
                if constexpr (std::is_same_v<T, NonlinDepth1Block>) {
                    blocks.push_back({{"w", to_json(blk.w)}, {"b", blk.b}});
                } else {
                    blocks.push_back({{"w1", to_json(blk.w1)},
                                      {"b1", blk.b1},
                                      {"w2", to_json(blk.w2)},
                                      {"b2", blk.b2}});
                }
            },
            b);
    }
    return nlohmann::json{{"block_depth", p.block_depth},
                          {"w_u", to_json(p.w_u)},
                          {"b_u", p.b_u},
                          {"w_e", to_json(p.w_e)},
                          {"b_e", p.b_e},
                          {"blocks", std::move(blocks)}};
}

inline NonlinResNetParams nonlin_params_from_json(const nlohmann::json& j) {
    NonlinResNetParams p;
    p.block_depth = j.at("block_depth").get<int>();
    p.w_u = matrix_from_json(j.at("w_u"));
    p.b_u = j.at("b_u").get<std::vector<double>>();
    p.w_e = matrix_from_json(j.at("w_e"));
    p.b_e = j.at("b_e").get<std::vector<double>>();
    for (const auto& b : j.at("blocks")) {
        if (p.block_depth == 1) {
            p.blocks.push_back(
                NonlinDepth1Block{matrix_from_json(b.at("w")), b.at("b").get<std::vector<double>>()});
        } else {
            p.blocks.push_back(NonlinDepth2Block{matrix_from_json(b.at("w1")),
                                                 b.at("b1").get<std::vector<double>>(),
                                                 matrix_from_json(b.at("w2")),
                                                 b.at("b2").get<std::vector<double>>()});
        }
    }
    validate_shapes(p);
    return p;
}

inline nlohmann::json to_json(const FplfSpec& f) {
    nlohmann::json layers = nlohmann::json::array();
    for (const FplfLayer& l : f.layers) {
        layers.push_back({{"w", to_json(l.w)}, {"b", l.b}});
    }
    return nlohmann::json{{"layers", std::move(layers)}};
}

inline FplfSpec fplf_from_json(const nlohmann::json& j) {
    FplfSpec f;
    for (const auto& l : j.at("layers")) {
        f.layers.push_back(FplfLayer{matrix_from_json(l.at("w")), l.at("b").get<std::vector<double>>()});
    }
    validate_shapes(f);
    return f;
}

inline nlohmann::json to_json(const CostReport& r) {
    nlohmann::json per = nlohmann::json::array();
    for (const ScalarCostResult& s : r.per_sigma) {
        per.push_back({{"cost", s.cost}, {"alpha_star", s.alpha_star}});
    }
    nlohmann::json params{{"lambda", r.params.lambda},
                          {"block_depth", r.params.block_depth},
                          {"width", r.params.width}};
    if (r.params.infinite_depth()) {
        params["depth"] = "inf";
    } else {
        params["depth"] = r.params.depth;
    }
    return nlohmann::json{{"total", r.total},
                          {"per_sigma", std::move(per)},
                          {"singular_values", r.spectrum.values},
                          {"rank", r.spectrum.numeric_rank()},
                          {"params", std::move(params)}};
}

inline nlohmann::json to_json(const WitnessReport& r, bool include_params = true) {
    nlohmann::json j{{"penalty", r.penalty_value},
                     {"formula_cost", r.formula_cost},
                     {"realized", to_json(r.realized)}};
    if (include_params) {
        j["params"] = to_json(r.params);
    }
    return j;
}

inline nlohmann::json to_json(const TrainResult& r, bool include_params = false) {
    nlohmann::json j{{"fit_residual", r.fit_residual},
                     {"penalty", r.penalty_value},
                     {"converged", r.converged},
                     {"restart_index", r.restart_index},
                     {"trace_points", r.trace.size()}};
    if (include_params) {
        j["params"] = to_json(r.params);
    }
    return j;
}

}  // namespace rescost
