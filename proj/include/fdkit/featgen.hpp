#pragma once

#include "fdkit/corpus.hpp"

#include <compare>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fdk {

enum class Base { Tok, Lem, Chnk, Dep, PosOnly };
enum class PosMode { None, Merged, Separate };
enum class NerMode { None, Annotate, Replace };

struct PreprocSpec {
    Base base = Base::Tok;
    PosMode pos = PosMode::None;
    NerMode ner = NerMode::None;
    bool stop = false;
    bool alpha = false;

    std::string name() const;
    bool valid() const;
    auto operator<=>(const PreprocSpec&) const = default;
};

// 68 specs; order is fixed: TOK, LEM, CHNK, DEP, POS-only, modifiers then STOP then ALPHA
std::vector<PreprocSpec> enumerate_specs();

// accepts canonical names plus the spellings found in published tables
// (CHK, POSS for POS-only, POSTOP, LEMPASS); nullopt when unknown or ambiguous
std::optional<PreprocSpec> parse_spec(std::string_view name);
PreprocSpec spec_from_name(std::string_view name);

inline constexpr std::string_view kMergeSep = "⊕";
inline constexpr std::string_view kArrow = "→";
inline constexpr char kChunkJoin = '_';

class StopwordSet {
public:
    StopwordSet() = default;
    explicit StopwordSet(std::vector<std::string> words);
    bool contains(std::string_view lowered) const { return words_.count(std::string(lowered)) > 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

// one word per line, '#' comments; entries are lowercased
StopwordSet load_stopwords(std::istream& in);
StopwordSet load_stopwords_file(const std::string& path);

std::string utf8_lower(std::string_view s);

using AlphaPolicy = std::function<bool(std::string_view)>;
bool all_letters(std::string_view utf8);
bool all_letters_or_kana_han(std::string_view utf8);
AlphaPolicy alpha_policy_for(std::string_view language);

struct Resources {
    std::optional<StopwordSet> stopwords;
    AlphaPolicy alpha = all_letters;
};

struct FeatureSequence {
    std::string doc_id;
    std::vector<std::string> features;
    PreprocSpec spec;
};

enum class ChunkKind { Noun, Verb, Other };

struct Chunk {
    int first = 0;  // 1-based, inclusive
    int last = 0;
    int head_index = 0;
    ChunkKind kind = ChunkKind::Other;
    bool operator==(const Chunk&) const = default;
};

std::vector<Chunk> chunk(const Sentence& s);

// unit_of returning "" drops the token from its chunk's text
using UnitFn = std::function<std::string(const AnnotatedToken&)>;
std::vector<std::string> dep_features(const Sentence& s, const UnitFn& unit_of);

// throws CapabilityError when the document lacks a layer the spec reads
void check_capability(const AnnotatedDocument& doc, const PreprocSpec& spec, const Resources& res);

FeatureSequence extract(const AnnotatedDocument& doc, const PreprocSpec& spec, const Resources& res);

std::vector<FeatureSequence> extract_all(const Dataset& ds, const PreprocSpec& spec, const Resources& res);

void write_feature_dump(std::ostream& out, std::span<const FeatureSequence> seqs);

}  // namespace fdk
