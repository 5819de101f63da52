#include "csma/scenario.hpp"

#include <fstream>

namespace csma {

using nlohmann::json;

Scenario scenario_from_json(const json& j) {
    SystemParams params;
    params.b = j.at("b").get<double>();
    params.noise_ratio = j.value("noise_ratio", 0.0);
    params.t0 = j.at("t0").get<int>();
    params.rts_len = j.at("rts_len").get<double>();

    std::vector<NodeProfile> profiles;
    for (const auto& node : j.at("nodes")) {
        NodeProfile np;
        np.period = node.at("period").get<int>();
        np.demand = node.value("demand", 0.0);
        if (node.contains("frame_success")) {
            const auto& fs = node.at("frame_success");
            std::string kind = fs.at("kind").get<std::string>();
            if (kind == "one") {
                np.frame_success.kind = FrameSuccess::Kind::One;
            } else if (kind == "saturating") {
                np.frame_success.kind = FrameSuccess::Kind::Saturating;
                np.frame_success.c = fs.value("c", 0.5);
                np.frame_success.tau = fs.value("tau", 1.0);
            } else {
                throw Error("unknown frame_success kind: " + kind);
            }
        }
        profiles.push_back(np);
    }
    params.n = static_cast<int>(profiles.size());
    return {params, profiles};
}

json scenario_to_json(const Scenario& s) {
    const auto& [params, profiles] = s;
    json nodes = json::array();
    for (const auto& np : profiles) {
        json fs;
        if (np.frame_success.kind == FrameSuccess::Kind::One) {
            fs = {{"kind", "one"}};
        } else {
            fs = {{"kind", "saturating"},
                  {"c", np.frame_success.c},
                  {"tau", np.frame_success.tau}};
        }
        nodes.push_back({{"period", np.period},
                         {"demand", np.demand},
                         {"frame_success", fs}});
    }
    return {{"b", params.b},
            {"noise_ratio", params.noise_ratio},
            {"t0", params.t0},
            {"rts_len", params.rts_len},
            {"nodes", nodes}};
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    json j;
    in >> j;
    return scenario_from_json(j);
}

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json sim_report_to_json(const SimReport& r) {
    return {{"grants", to_json(r.grants)},
            {"throughput", to_json(r.throughput)},
            {"power", to_json(r.power)},
            {"stderr",
             {{"grants", to_json(r.grants_stderr)},
              {"throughput", to_json(r.throughput_stderr)},
              {"power", to_json(r.power_stderr)}}},
            {"handshakes", r.handshakes}};
}

}  // namespace csma
