#pragma once

#include "fdkit/energy.hpp"
#include "fdkit/featgen.hpp"
#include "fdkit/learners.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fdk::cli {

struct PlannerSettings {
    std::string classifier = "linsvm_sgd";
    bool neural = false;
    int budget = 8;
};

struct RunManifest {
    std::filesystem::path dir;
    std::vector<std::string> corpus;
    std::string labels;
    std::string language = "en";
    std::string stopwords;
    std::string spec_mode = "all";  // all | list | plan
    std::vector<PreprocSpec> specs;
    std::vector<ClassifierConfig> classifiers;
    Protocol protocol = Protocol::kfold(5);
    std::uint64_t seed = 42;
    EvalOptions eval;
    DeviceProfile device = kDesktopCpu;
    EnergyConstants constants;
    double multiplier = 1.0;
    PlannerSettings planner;
    std::string out = "out";
    nlohmann::json raw;

    std::string hash() const;
    std::string header(const std::string& version) const;
};

RunManifest load_manifest(const std::string& path);
ClassifierConfig parse_classifier(const nlohmann::json& j);
void apply_seed(RunManifest& m, std::uint64_t seed);

}  // namespace fdk::cli
