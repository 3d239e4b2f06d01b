#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtm/gates.hpp"
#include "rtm/influence.hpp"

namespace rtm::cli {

using nlohmann::json;

struct ExperimentConfig {
    std::string experiment;  // pk | bounds | spectrum | sweep | replica | rates
    std::string gate = "du-fixed";
    double p = 0.625;
    std::vector<double> p_list;  // rates: defaults to {p}
    int d = 2;
    int t_lo = 4, t_hi = 4;
    std::string t0 = "all";  // all | max-entropy | integer
    std::string dimer = "random";
    std::string bounds_mode = "auto";  // auto | dual-unitary | generic
    std::string rates_mode = "gate";   // gate | fit
    std::vector<int> chi;
    std::vector<double> eps;
    int samples = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;

    json to_json() const;
    static ExperimentConfig from_json(const json& j);
    void validate() const;
    // FNV-1a of the canonical JSON without the output path and the job count
    std::string hash() const;
};

std::pair<int, int> parse_t_range(const std::string& s);

Gate make_gate(const ExperimentConfig& c, int d);
Vec make_dimer(const ExperimentConfig& c, int d);

struct Artifact {
    std::string header;  // comment lines, the timestamp line last
    std::string body;    // deterministic for a given configuration
    bool is_json = false;
};

Artifact run(const ExperimentConfig& c);

}  // namespace rtm::cli
