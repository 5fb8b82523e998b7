#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqdyn/approx/network.hpp"
#include "seqdyn/approx/train.hpp"
#include "seqdyn/core/trajectory.hpp"
#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"
#include "seqdyn/nfield/neural_field.hpp"

namespace seqdyn::io {

using nlohmann::json;

// Doubles are written in shortest round-trip form, so every value read back is bit-identical.

inline json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Row-major nested arrays.
inline json to_json(const Mat& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Vec vec_from_json(const json& j)
{
    require(j.is_array(), "json: expected an array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k)
        v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
    return v;
}

inline Mat mat_from_json(const json& j)
{
    require(j.is_array(), "json: expected an array of rows");
    if (j.empty())
        return Mat(0, 0);
    const auto cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        require(j[r].is_array() && j[r].size() == cols, "json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
    return m;
}

inline Activation activation_from_json(const json& j)
{
    const auto kind = Activation::parse(j.get<std::string>());
    require(kind.has_value(), "json: unknown sigma_kind '" + j.get<std::string>() + "'");
    return Activation(*kind);
}

inline json to_json(const lv::LotkaVolterra& sys)
{
    return {{"kind", "lotka_volterra"},
            {"a", to_json(Vec(sys.a()))},
            {"lambda_u", to_json(Vec(sys.lambda_u()))},
            {"rho", to_json(Mat(sys.rho()))}};
}

/// Rebuilt from (a, lambda_u); a stored rho that disagrees with the rebuild is rejected.
inline lv::LotkaVolterra lv_from_json(const json& j)
{
    const Vec a = vec_from_json(j.at("a")), l = vec_from_json(j.at("lambda_u"));
    require(a.size() == 3 && l.size() == 3, "json: Lotka-Volterra needs three a_i and three lambda_u");
    lv::LotkaVolterra sys = lv::build_lv(a, l);
    if (j.contains("rho"))
        require((mat_from_json(j.at("rho")) - Mat(sys.rho())).cwiseAbs().maxCoeff() <= 1e-15,
                "json: rho does not match a and lambda_u");
    return sys;
}

inline json to_json(const nfield::NeuralFieldSystem& sys)
{
    return {{"n", sys.dim()},
            {"W", to_json(sys.W())},
            {"b", to_json(sys.b())},
            {"sigma_kind", sys.sigma().name()},
            {"X", to_json(sys.equilibria())},
            {"axial", sys.axial()}};
}

inline nfield::NeuralFieldSystem nfield_from_json(const json& j)
{
    Mat w = mat_from_json(j.at("W"));
    Vec b = vec_from_json(j.at("b"));
    Mat x = mat_from_json(j.at("X"));
    require(j.at("n").get<int>() == b.size(), "json: n disagrees with b");
    return nfield::NeuralFieldSystem::from_parts(std::move(w), std::move(b), activation_from_json(j.at("sigma_kind")),
                                                 std::move(x), j.value("axial", false));
}

inline json to_json(const Box& box) { return {{"lo", to_json(box.lo)}, {"hi", to_json(box.hi)}}; }

inline Box box_from_json(const json& j) { return {vec_from_json(j.at("lo")), vec_from_json(j.at("hi"))}; }

inline json to_json(const approx::TrainConfig& c)
{
    return {{"domain", to_json(c.domain)},
            {"dataset_size", c.dataset_size},
            {"seed", c.seed},
            {"learning_rate", c.learning_rate},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"adam_eps", c.adam_eps},
            {"lr_decay", c.lr_decay},
            {"cosine", c.cosine},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"patience", c.patience},
            {"validation_fraction", c.validation_fraction},
            {"divergence_factor", c.divergence_factor},
            {"center_inputs", c.center_inputs},
            {"jacobian_penalty_weight", c.jacobian_penalty_weight},
            {"inward_penalty_weight", c.inward_penalty_weight},
            {"inward_margin", c.inward_margin},
            {"inward_samples", c.inward_samples}};
}

/// Fields absent from j keep the values of `base`.
inline approx::TrainConfig train_config_from_json(const json& j, approx::TrainConfig base = {})
{
    if (j.contains("domain"))
        base.domain = box_from_json(j.at("domain"));
    base.dataset_size = j.value("dataset_size", base.dataset_size);
    base.seed = j.value("seed", base.seed);
    base.learning_rate = j.value("learning_rate", base.learning_rate);
    base.beta1 = j.value("beta1", base.beta1);
    base.beta2 = j.value("beta2", base.beta2);
    base.adam_eps = j.value("adam_eps", base.adam_eps);
    base.lr_decay = j.value("lr_decay", base.lr_decay);
    base.cosine = j.value("cosine", base.cosine);
    base.batch_size = j.value("batch_size", base.batch_size);
    base.epochs = j.value("epochs", base.epochs);
    base.patience = j.value("patience", base.patience);
    base.validation_fraction = j.value("validation_fraction", base.validation_fraction);
    base.divergence_factor = j.value("divergence_factor", base.divergence_factor);
    base.center_inputs = j.value("center_inputs", base.center_inputs);
    base.jacobian_penalty_weight = j.value("jacobian_penalty_weight", base.jacobian_penalty_weight);
    base.inward_penalty_weight = j.value("inward_penalty_weight", base.inward_penalty_weight);
    base.inward_margin = j.value("inward_margin", base.inward_margin);
    base.inward_samples = j.value("inward_samples", base.inward_samples);
    base.validate();
    return base;
}

inline json to_json(const IntegratorConfig& c)
{
    return {{"method", c.method == IntegratorMethod::rk4_fixed ? "rk4_fixed" : "rkf45_adaptive"},
            {"dt", c.dt},
            {"rtol", c.rtol},
            {"atol", c.atol},
            {"t_max", c.t_max},
            {"max_dt", c.max_dt},
            {"max_steps", c.max_steps}};
}

inline IntegratorConfig integrator_config_from_json(const json& j, IntegratorConfig base = {})
{
    if (j.contains("method")) {
        const auto m = j.at("method").get<std::string>();
        require(m == "rk4_fixed" || m == "rkf45_adaptive", "json: unknown integrator method '" + m + "'");
        base.method = m == "rk4_fixed" ? IntegratorMethod::rk4_fixed : IntegratorMethod::rkf45_adaptive;
    }
    base.dt = j.value("dt", base.dt);
    base.rtol = j.value("rtol", base.rtol);
    base.atol = j.value("atol", base.atol);
    base.t_max = j.value("t_max", base.t_max);
    base.max_dt = j.value("max_dt", base.max_dt);
    base.max_steps = j.value("max_steps", base.max_steps);
    base.validate();
    return base;
}

/// Checkpoint {n, N, block_layout, P, W, b, sigma_kind, seed, config}.
inline json checkpoint_to_json(const approx::ApproxNetwork& net, std::uint64_t seed, const json& config)
{
    json j{{"n", net.n()},
           {"N", net.hidden()},
           {"block_layout", net.blocks() ? json(*net.blocks()) : json(nullptr)},
           {"P", to_json(net.P())},
           {"W", to_json(net.W())},
           {"b", to_json(net.b())},
           {"sigma_kind", net.sigma().name()},
           {"seed", seed},
           {"config", config}};
    return j;
}

inline approx::ApproxNetwork network_from_json(const json& j)
{
    std::optional<std::vector<int>> blocks;
    if (j.contains("block_layout") && !j.at("block_layout").is_null())
        blocks = j.at("block_layout").get<std::vector<int>>();
    Mat p = mat_from_json(j.at("P"));
    Mat w = mat_from_json(j.at("W"));
    Vec b = vec_from_json(j.at("b"));
    require(p.rows() == j.at("n").get<int>() && p.cols() == j.at("N").get<int>(), "json: P shape disagrees with n, N");
    if (blocks)
        approx::ApproxNetwork::validate_layout(static_cast<int>(p.rows()), static_cast<int>(p.cols()), *blocks);
    const Mat mask = approx::ApproxNetwork::block_mask(static_cast<int>(p.rows()), static_cast<int>(p.cols()), blocks);
    require((p.array() * (1.0 - mask.array())).abs().maxCoeff() == 0.0,
            "json: P has nonzero entries outside its block layout");
    return {std::move(p), std::move(w), std::move(b), std::move(blocks), activation_from_json(j.at("sigma_kind"))};
}

inline json to_json(const std::vector<CrossingEvent>& events)
{
    json arr = json::array();
    for (const auto& e : events)
        arr.push_back({{"t", e.t}, {"x", to_json(e.x)}, {"section_id", e.section_id}, {"grazing", e.grazing}});
    return arr;
}

inline std::vector<CrossingEvent> events_from_json(const json& j)
{
    std::vector<CrossingEvent> out;
    for (const auto& e : j)
        out.push_back({e.at("t").get<double>(), vec_from_json(e.at("x")), e.value("section_id", 0),
                       e.value("grazing", false)});
    return out;
}

inline void write_json(const std::string& path, const json& j)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os)
        throw std::runtime_error("write to " + path + " failed");
}

inline json read_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw PreconditionError("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw PreconditionError(path + ": " + e.what());
    }
}

} // namespace seqdyn::io
