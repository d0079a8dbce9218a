#include "fdkit/planner.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fdk {

PruningPlan build_plan(std::span<const FeatureDensityRecord> records, const std::string& classifier, bool neural,
                       int budget) {
    if (budget < 0) throw ValidationError("budget must be non-negative");
    PruningPlan p;
    p.classifier = classifier;
    p.neural = neural;
    for (const auto& r : records) p.fd[spec_from_name(r.spec_name).name()] = r.fd;
    std::vector<std::string> missing;
    for (const auto& s : enumerate_specs())
        if (!p.fd.count(s.name())) missing.push_back(s.name());
    if (!missing.empty()) {
        std::string m;
        for (const auto& s : missing) m += (m.empty() ? "" : ", ") + s;
        throw ValidationError("density table lacks " + m);
    }

    for (const auto& s : enumerate_specs()) {
        std::string n = s.name();
        if (s.base == Base::PosOnly)
            p.stage0.push_back({n, "POS tags alone carry too little information"});
        else if (s.base == Base::Chnk)
            p.stage0.push_back({n, "chunk features are weak for every classifier"});
        else if (s.base == Base::Dep && !neural)
            p.stage0.push_back({n, "dependency features are weak for non-neural classifiers"});
        else if ((s.base == Base::Tok || s.base == Base::Lem) && s.pos != PosMode::None)
            p.stage1.push_back(n);
        else
            p.stage2_pool.push_back(n);
    }
    std::sort(p.stage2_pool.begin(), p.stage2_pool.end());
    p.budget = std::min<int>(budget, static_cast<int>(p.stage2_pool.size()));
    return p;
}

std::vector<std::string> stage2_order(const PruningPlan& plan, const std::string& pivot) {
    double f0 = plan.fd.at(pivot);
    std::vector<std::string> out = plan.stage2_pool;
    std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        double da = std::abs(plan.fd.at(a) - f0), db = std::abs(plan.fd.at(b) - f0);
        if (da != db) return da < db;
        return a < b;
    });
    return out;
}

namespace {

bool better(const PlanRun& a, const PlanRun& b) { return a.f1 > b.f1 || (a.f1 == b.f1 && a.spec < b.spec); }

// runs specs (possibly in parallel) and appends successes in list order; false on failure
bool run_stage(const PruningPlan& plan, const std::vector<std::string>& specs, int stage, const Oracle& oracle,
               unsigned jobs, Trace& t) {
    std::vector<std::optional<PlanRun>> done(specs.size());
    std::vector<std::string> errors(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t i) {
        try {
            auto r = oracle(spec_from_name(specs[i]));
            done[i] = PlanRun{specs[i], stage, plan.fd.at(specs[i]), r.f1, r.seconds};
        } catch (const std::exception& e) {
            errors[i] = specs[i] + ": " + e.what();
        }
    });
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!done[i]) {
            t.aborted = true;
            t.error = errors[i];
            return false;
        }
        t.runs.push_back(*done[i]);
        if (!t.best || better(*done[i], *t.best)) t.best = done[i];
    }
    return true;
}

}  // namespace

Trace execute_plan(const PruningPlan& plan, const Oracle& oracle, unsigned jobs) {
    Trace t;
    if (!run_stage(plan, plan.stage1, 1, oracle, jobs, t)) return t;
    if (!t.best) return t;
    t.pivot = t.best->spec;
    t.stage2_order = stage2_order(plan, t.pivot);
    std::vector<std::string> chosen(t.stage2_order.begin(), t.stage2_order.begin() + plan.budget);
    run_stage(plan, chosen, 2, oracle, jobs, t);
    return t;
}

CostModel CostModel::uniform_from_total(double total_wh, std::size_t specs) {
    CostModel c;
    c.uniform_wh = total_wh / static_cast<double>(specs);
    return c;
}

double CostModel::cost(const std::string& spec) const {
    auto it = per_spec_wh.find(spec);
    return it != per_spec_wh.end() ? it->second : uniform_wh;
}

Savings savings(const Trace& trace, const CostModel& cost) {
    std::set<std::string> ran;
    for (const auto& r : trace.runs) ran.insert(r.spec);
    Savings s;
    s.runs_executed = static_cast<int>(ran.size());
    for (const auto& spec : enumerate_specs()) {
        std::string n = spec.name();
        if (ran.count(n)) continue;
        ++s.runs_avoided;
        s.wh_avoided += cost.cost(n);
    }
    return s;
}

}  // namespace fdk
