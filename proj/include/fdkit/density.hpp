#pragma once

#include "fdkit/corpus.hpp"
#include "fdkit/featgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fdk {

struct FeatureDensityRecord {
    std::string spec_name;
    std::uint64_t distinct = 0;
    std::uint64_t total = 0;
    double fd = 0.0;
};

FeatureDensityRecord feature_density(std::span<const FeatureSequence> seqs);

// TOK-spec density: vocabulary over word count
double lexical_density(const Dataset& ds);

// sorted ascending by fd, ties by name
std::vector<FeatureDensityRecord> density_table(const Dataset& ds, std::span<const PreprocSpec> specs,
                                                const Resources& res, unsigned jobs = 1);

void write_density_csv(std::ostream& out, std::span<const FeatureDensityRecord> rows);
std::vector<FeatureDensityRecord> read_density_csv(std::istream& in);
std::vector<FeatureDensityRecord> read_density_csv_file(const std::string& path);

}  // namespace fdk
