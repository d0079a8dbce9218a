#pragma once

#include "fdkit/density.hpp"
#include "fdkit/learners.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fdk {

struct ScoreRow {
    std::string spec;
    std::string classifier;
    double f1 = 0.0;
    double dispersion = 0.0;
};

std::vector<ScoreRow> scores_from_results(std::span<const EvalResult> rs);

// long format: spec,classifier,f1 (or mean_f1)[,dispersion]; spec names are canonicalised
std::vector<ScoreRow> read_scores_csv(std::istream& in);
std::vector<ScoreRow> read_scores_csv_file(const std::string& path);

double pearson(std::span<const std::pair<double, double>> xy);

struct CorrelationReport {
    std::string classifier;
    std::size_t pairs_used = 0;
    double rho = 0.0;  // NaN when either series is constant
    std::vector<std::string> excluded_specs;
};

using SpecPredicate = std::function<bool(const std::string&)>;
bool is_pos_only(const std::string& spec_name);

// one report per classifier, sorted by classifier name
std::vector<CorrelationReport> correlate_fd_f1(std::span<const FeatureDensityRecord> records,
                                               std::span<const ScoreRow> scores,
                                               const SpecPredicate& exclude = is_pos_only);

struct StabilityEntry {
    std::string spec;
    std::string classifier;
    double f1 = 0.0;
    double dispersion = 0.0;
    double stability = 0.0;
};

std::vector<StabilityEntry> stability(std::span<const ScoreRow> rows);

std::vector<std::string> fd_range_filter(std::span<const FeatureDensityRecord> records, const std::string& base,
                                         double low_mult,
                                         double high_mult = std::numeric_limits<double>::infinity());

void write_correlation_csv(std::ostream& out, std::span<const CorrelationReport> rs);
void write_stability_csv(std::ostream& out, std::span<const StabilityEntry> rs);

struct ScatterPoint {
    std::string spec;
    double fd = 0.0;
    double f1 = 0.0;
};

void write_scatter_svg(std::ostream& out, const std::string& title, std::vector<ScatterPoint> pts);

}  // namespace fdk
