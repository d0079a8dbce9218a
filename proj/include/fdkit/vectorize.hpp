#pragma once

#include "fdkit/featgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fdk {

struct Vocabulary {
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::uint32_t> doc_freq;  // by column
    std::size_t doc_count = 0;

    std::size_t size() const { return doc_freq.size(); }
};

struct FeatureVector {
    std::string doc_id;
    std::vector<std::pair<std::uint32_t, double>> entries;  // strictly increasing index, no zeros
    std::string label;
};

// columns are assigned in byte order of the feature strings, so the result does not
// depend on document order
Vocabulary fit_vocabulary(std::span<const FeatureSequence> train);

FeatureVector tfidf(const FeatureSequence& seq, const Vocabulary& vocab, std::string label = {});

double squared_distance(const FeatureVector& a, const FeatureVector& b);

// two-class oversampling of the minority class up to the majority count
std::vector<FeatureVector> smote(std::vector<FeatureVector> vectors, int k, std::uint64_t seed);

void write_sparse_dump(std::ostream& out, std::span<const FeatureVector> vs);

}  // namespace fdk
