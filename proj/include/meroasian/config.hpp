#pragma once

#include <stdexcept>
#include <string>

#include "meroasian/model.hpp"

namespace meroasian {

// Malformed or inconsistent model configuration. Not a NumericalError: the
// CLI treats it as a usage error.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class MuMode { RiskNeutral, Fixed };

struct ModelConfig {
    ThetaParams params;
    MuMode mu_mode = MuMode::RiskNeutral;
    double r = 0.03;      // RiskNeutral
    double mu = 0.1;      // Fixed

    // gamma is always calibrated, never read from the config.
    ThetaModel model() const;
};

ModelConfig parse_model_config(const std::string& json_text);
ModelConfig load_model_config(const std::string& path);
// Key order: family, j, sigma, c1, c2, alpha1, alpha2, beta1, beta2, mu.
std::string to_json(const ModelConfig& cfg);

bool operator==(const ModelConfig& a, const ModelConfig& b);

}  // namespace meroasian
