#include "fdkit/density.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <string_view>
#include <unordered_set>

namespace fdk {

FeatureDensityRecord feature_density(std::span<const FeatureSequence> seqs) {
    std::unordered_set<std::string_view> seen;
    std::uint64_t total = 0;
    for (const auto& s : seqs) {
        total += s.features.size();
        for (const auto& f : s.features) seen.insert(f);
    }
    if (total == 0) throw DegenerateCorpusError("every feature sequence is empty");
    FeatureDensityRecord r;
    if (!seqs.empty()) r.spec_name = seqs.front().spec.name();
    r.distinct = seen.size();
    r.total = total;
    r.fd = static_cast<double>(r.distinct) / static_cast<double>(r.total);
    return r;
}

double lexical_density(const Dataset& ds) {
    auto seqs = extract_all(ds, PreprocSpec{}, Resources{});
    return feature_density(seqs).fd;
}

std::vector<FeatureDensityRecord> density_table(const Dataset& ds, std::span<const PreprocSpec> specs,
                                                const Resources& res, unsigned jobs) {
    std::vector<FeatureDensityRecord> out(specs.size());
    parallel_for(specs.size(), jobs, [&](std::size_t i) {
        auto seqs = extract_all(ds, specs[i], res);
        out[i] = feature_density(seqs);
        out[i].spec_name = specs[i].name();
    });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.fd != b.fd) return a.fd < b.fd;
        return a.spec_name < b.spec_name;
    });
    return out;
}

void write_density_csv(std::ostream& out, std::span<const FeatureDensityRecord> rows) {
    out << "spec,distinct,total,fd\n";
    for (const auto& r : rows)
        out << csv_field(r.spec_name) << ',' << r.distinct << ',' << r.total << ',' << format_fixed(r.fd, 4) << '\n';
}

std::vector<FeatureDensityRecord> read_density_csv(std::istream& in) {
    auto t = read_csv(in);
    int cs = t.require("spec"), cd = t.column("distinct"), ct = t.column("total"), cf = t.column("fd");
    std::vector<FeatureDensityRecord> out;
    for (const auto& row : t.rows) {
        FeatureDensityRecord r;
        r.spec_name = spec_from_name(row[cs]).name();
        if (cd >= 0 && ct >= 0) {
            r.distinct = static_cast<std::uint64_t>(parse_int(row[cd]));
            r.total = static_cast<std::uint64_t>(parse_int(row[ct]));
            if (r.total == 0) throw ValidationError("density row " + r.spec_name + " has zero total");
            r.fd = static_cast<double>(r.distinct) / static_cast<double>(r.total);
        } else if (cf >= 0) {
            r.fd = parse_double(row[cf]);
        } else {
            throw ValidationError("density csv needs distinct,total or fd columns");
        }
        out.push_back(r);
    }
    return out;
}

std::vector<FeatureDensityRecord> read_density_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return read_density_csv(f);
}

}  // namespace fdk
