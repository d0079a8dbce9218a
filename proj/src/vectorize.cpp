#include "fdkit/vectorize.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace fdk {

Vocabulary fit_vocabulary(std::span<const FeatureSequence> train) {
    if (train.empty()) throw Error("fit_vocabulary: empty training set");
    std::map<std::string_view, std::uint32_t> df;
    std::unordered_map<std::string_view, std::size_t> last_doc;
    for (std::size_t d = 0; d < train.size(); ++d)
        for (const auto& f : train[d].features) {
            auto [it, fresh] = last_doc.try_emplace(f, d);
            if (fresh || it->second != d) {
                it->second = d;
                ++df[f];
            }
        }
    Vocabulary v;
    v.doc_count = train.size();
    v.index.reserve(df.size());
    v.doc_freq.reserve(df.size());
    for (const auto& [f, n] : df) {
        v.index.emplace(std::string(f), static_cast<std::uint32_t>(v.doc_freq.size()));
        v.doc_freq.push_back(n);
    }
    return v;
}

FeatureVector tfidf(const FeatureSequence& seq, const Vocabulary& vocab, std::string label) {
    std::map<std::uint32_t, std::uint32_t> tf;
    for (const auto& f : seq.features) {
        auto it = vocab.index.find(f);
        if (it != vocab.index.end()) ++tf[it->second];
    }
    FeatureVector v{seq.doc_id, {}, std::move(label)};
    double docs = static_cast<double>(vocab.doc_count);
    for (auto [col, n] : tf) {
        double w = n * std::log(docs / vocab.doc_freq[col]);
        if (w != 0.0) v.entries.emplace_back(col, w);
    }
    return v;
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    const auto &x = a.entries, &y = b.entries;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            s += x[i].second * x[i].second;
            ++i;
        } else if (i == x.size() || y[j].first < x[i].first) {
            s += y[j].second * y[j].second;
            ++j;
        } else {
            double d = x[i].second - y[j].second;
            s += d * d;
            ++i;
            ++j;
        }
    }
    return s;
}

namespace {

FeatureVector interpolate(const FeatureVector& x, const FeatureVector& nn, double lambda) {
    FeatureVector s;
    s.label = x.label;
    std::size_t i = 0, j = 0;
    const auto &a = x.entries, &b = nn.entries;
    auto put = [&](std::uint32_t col, double va, double vb) {
        double w = va + lambda * (vb - va);
        if (w != 0.0) s.entries.emplace_back(col, w);
    };
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            put(a[i].first, a[i].second, 0.0);
            ++i;
        } else if (i == a.size() || b[j].first < a[i].first) {
            put(b[j].first, 0.0, b[j].second);
            ++j;
        } else {
            put(a[i].first, a[i].second, b[j].second);
            ++i;
            ++j;
        }
    }
    return s;
}

}  // namespace

std::vector<FeatureVector> smote(std::vector<FeatureVector> vectors, int k, std::uint64_t seed) {
    if (k < 1) throw Error("smote: k must be at least 1");
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < vectors.size(); ++i) by_class[vectors[i].label].push_back(i);
    if (by_class.size() != 2) throw Error("smote: needs exactly two classes, got " + std::to_string(by_class.size()));
    auto a = by_class.begin(), b = std::next(a);
    auto& minority = a->second.size() <= b->second.size() ? a->second : b->second;
    std::size_t majority = std::max(a->second.size(), b->second.size());
    if (minority.size() == majority) return vectors;
    if (minority.size() < 2) throw Error("smote: minority class has a single member");

    std::size_t m = minority.size();
    std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), m - 1);
    // neighbour lists, nearest first, ties by position
    std::vector<std::vector<std::size_t>> nn(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t j = 0; j < m; ++j)
            if (j != i) d.emplace_back(squared_distance(vectors[minority[i]], vectors[minority[j]]), j);
        std::partial_sort(d.begin(), d.begin() + kk, d.end());
        for (std::size_t t = 0; t < kk; ++t) nn[i].push_back(d[t].second);
    }

    Rng rng(seed);
    std::size_t need = majority - m;
    std::vector<FeatureVector> synth;
    synth.reserve(need);
    for (std::size_t s = 0; s < need; ++s) {
        std::size_t i = s % m;
        std::size_t j = nn[i][rng.below(kk)];
        double lambda = rng.uniform();
        const auto& x = vectors[minority[i]];
        FeatureVector v = interpolate(x, vectors[minority[j]], lambda);
        v.doc_id = x.doc_id + "#smote" + std::to_string(s);
        synth.push_back(std::move(v));
    }
    for (auto& v : synth) vectors.push_back(std::move(v));
    return vectors;
}

void write_sparse_dump(std::ostream& out, std::span<const FeatureVector> vs) {
    for (const auto& v : vs) {
        out << v.doc_id << '\t' << v.label << '\t';
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            if (i) out << ' ';
            out << v.entries[i].first << ':' << format_sig(v.entries[i].second, 6);
        }
        out << '\n';
    }
}

}  // namespace fdk
