#pragma once

#include "fdkit/density.hpp"
#include "fdkit/featgen.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fdk {

struct ExcludedSpec {
    std::string spec;
    std::string reason;
};

struct PruningPlan {
    std::vector<ExcludedSpec> stage0;
    std::vector<std::string> stage1;
    std::vector<std::string> stage2_pool;  // name order; ranked once the pivot is known
    std::map<std::string, double> fd;
    int budget = 0;
    std::string classifier;
    bool neural = false;
};

PruningPlan build_plan(std::span<const FeatureDensityRecord> records, const std::string& classifier, bool neural,
                       int budget);

// pool ranked by |fd - fd(pivot)|, ties by name
std::vector<std::string> stage2_order(const PruningPlan& plan, const std::string& pivot);

struct OracleResult {
    double f1 = 0.0;
    double seconds = 0.0;
};

using Oracle = std::function<OracleResult(const PreprocSpec&)>;

struct PlanRun {
    std::string spec;
    int stage = 1;
    double fd = 0.0;
    double f1 = 0.0;
    double seconds = 0.0;
};

struct Trace {
    std::vector<PlanRun> runs;
    std::string pivot;
    std::vector<std::string> stage2_order;
    std::optional<PlanRun> best;
    bool aborted = false;
    std::string error;
};

// stage-1 cells may run in parallel; the pivot is chosen after all of them finish
Trace execute_plan(const PruningPlan& plan, const Oracle& oracle, unsigned jobs = 1);

struct CostModel {
    double uniform_wh = 0.0;
    std::map<std::string, double> per_spec_wh;

    static CostModel uniform_from_total(double total_wh, std::size_t specs = 68);
    double cost(const std::string& spec) const;
};

struct Savings {
    int runs_executed = 0;
    int runs_avoided = 0;
    double wh_avoided = 0.0;
};

Savings savings(const Trace& trace, const CostModel& cost);

}  // namespace fdk
