#pragma once

#include <string>

#include "meroasian/config.hpp"
#include "meroasian/model.hpp"

namespace fixtures {

inline meroasian::ThetaParams set_params(int set) {
    meroasian::ThetaParams p;
    p.j = set;
    p.sigma = set == 1 ? 0.1 : 0.0;
    p.c1 = 0.15;
    p.c2 = 0.3;
    p.alpha1 = p.alpha2 = 1.5;
    p.beta1 = p.beta2 = 2.0;
    return p;
}

// Drift fixed at 0.1, as in the density experiments.
inline meroasian::ThetaModel fixed_mu(int set) { return meroasian::ThetaModel(set_params(set), 0.1); }

inline meroasian::ThetaModel risk_neutral(int set, double r = 0.03) {
    return meroasian::ThetaModel::risk_neutral(set_params(set), r);
}

inline std::string config_path(const std::string& name) {
    return std::string(MEROASIAN_SOURCE_DIR) + "/configs/" + name;
}

}  // namespace fixtures
