#pragma once

// JSON snapshots of weights, kernel windows and Painleve XXXIV solutions.

#include "s6v/dope.hpp"
#include "s6v/painleve34.hpp"

#include <json.hpp>

namespace s6v {

inline nlohmann::ordered_json weight_snapshot(const DiscreteWeight& w) {
    nlohmann::ordered_json j;
    std::vector<int> sites;
    for (int x = 1; x <= w.x_max(); ++x) sites.push_back(x);
    j["sites"] = sites;
    j["log_w"] = w.log_w;
    j["tail_bound"] = w.tail_bound;
    return j;
}

inline DiscreteWeight weight_from_snapshot(const nlohmann::ordered_json& j) {
    DiscreteWeight w;
    const auto sites = j.at("sites").get<std::vector<int>>();
    w.log_w = j.at("log_w").get<std::vector<double>>();
    if (sites.size() != w.log_w.size()) throw ParameterOutOfRange("snapshot sites and log_w differ in length");
    for (std::size_t i = 0; i < sites.size(); ++i)
        if (sites[i] != static_cast<int>(i) + 1) throw ParameterOutOfRange("snapshot sites must be 1..x_max");
    w.tail_bound = j.value("tail_bound", 0.0);
    return w;
}

// The symmetrised kernel sqrt(w) K sqrt(w) row by row, with the window's log-weights.
inline nlohmann::ordered_json kernel_snapshot(const KernelMatrix& K) {
    nlohmann::ordered_json j;
    j["n"] = K.n;
    j["sites"] = K.window;
    j["log_w"] = K.log_w;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < K.kt.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(K.kt.cols()));
        for (Eigen::Index k = 0; k < K.kt.cols(); ++k) r[static_cast<std::size_t>(k)] = K.kt(i, k);
        rows.push_back(r);
    }
    j["kernel"] = rows;
    return j;
}

inline nlohmann::ordered_json p34_snapshot(const P34Solution& s) {
    nlohmann::ordered_json j;
    j["L_minus"] = s.L_minus;
    j["L_plus"] = s.L_plus;
    j["mesh"] = s.h;
    j["newton_residual"] = s.newton_residual;
    j["y"] = s.y;
    j["u"] = s.u;
    j["u_prime"] = s.u_prime;
    return j;
}

} // namespace s6v
