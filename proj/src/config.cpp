#include "meroasian/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meroasian/errors.hpp"

namespace meroasian {

namespace {

using json = nlohmann::ordered_json;

double number(const json& obj, const char* key) {
    if (!obj.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string("key \"") + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

ThetaModel ModelConfig::model() const {
    return mu_mode == MuMode::RiskNeutral ? ThetaModel::risk_neutral(params, r) : ThetaModel(params, mu);
}

ModelConfig parse_model_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
    if (!doc.contains("family") || doc["family"] != "theta")
        throw ConfigError("\"family\" must be \"theta\"");
    if (doc.contains("gamma")) throw ConfigError("\"gamma\" is calibrated and may not be set");

    ModelConfig cfg;
    const auto jv = doc.value("j", json());
    if (!jv.is_number_integer() || (jv.get<int>() != 1 && jv.get<int>() != 2))
        throw ConfigError("\"j\" must be 1 or 2");
    cfg.params.j = jv.get<int>();
    cfg.params.sigma = number(doc, "sigma");
    cfg.params.c1 = number(doc, "c1");
    cfg.params.c2 = number(doc, "c2");
    cfg.params.alpha1 = number(doc, "alpha1");
    cfg.params.alpha2 = number(doc, "alpha2");
    cfg.params.beta1 = number(doc, "beta1");
    cfg.params.beta2 = number(doc, "beta2");

    if (!doc.contains("mu") || !doc["mu"].is_object()) throw ConfigError("missing object \"mu\"");
    const auto& mu = doc["mu"];
    const auto mode = mu.value("mode", std::string());
    if (mode == "riskneutral") {
        cfg.mu_mode = MuMode::RiskNeutral;
        cfg.r = number(mu, "r");
    } else if (mode == "fixed") {
        cfg.mu_mode = MuMode::Fixed;
        cfg.mu = number(mu, "value");
    } else {
        throw ConfigError("\"mu.mode\" must be \"riskneutral\" or \"fixed\"");
    }
    try {
        static_cast<void>(ThetaModel(cfg.params, 0.0));  // parameter validation
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
    if (cfg.mu_mode == MuMode::RiskNeutral && !(cfg.r >= 0.0)) throw ConfigError("\"mu.r\" must be non-negative");
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_config(ss.str());
}

std::string to_json(const ModelConfig& cfg) {
    json doc;
    doc["family"] = "theta";
    doc["j"] = cfg.params.j;
    doc["sigma"] = cfg.params.sigma;
    doc["c1"] = cfg.params.c1;
    doc["c2"] = cfg.params.c2;
    doc["alpha1"] = cfg.params.alpha1;
    doc["alpha2"] = cfg.params.alpha2;
    doc["beta1"] = cfg.params.beta1;
    doc["beta2"] = cfg.params.beta2;
    if (cfg.mu_mode == MuMode::RiskNeutral)
        doc["mu"] = json{{"mode", "riskneutral"}, {"r", cfg.r}};
    else
        doc["mu"] = json{{"mode", "fixed"}, {"value", cfg.mu}};
    return doc.dump(2);
}

bool operator==(const ModelConfig& a, const ModelConfig& b) {
    const auto& p = a.params;
    const auto& q = b.params;
    if (p.j != q.j || p.sigma != q.sigma || p.c1 != q.c1 || p.c2 != q.c2 || p.alpha1 != q.alpha1 ||
        p.alpha2 != q.alpha2 || p.beta1 != q.beta1 || p.beta2 != q.beta2 || a.mu_mode != b.mu_mode)
        return false;
    return a.mu_mode == MuMode::RiskNeutral ? a.r == b.r : a.mu == b.mu;
}

}  // namespace meroasian
