#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdk {

struct AnnotatedToken {
    int index = 0;
    std::string form;
    std::string lemma;
    std::string upos;
    std::string ner = "O";
    int head = -1;  // -1: corpus carries no head for this token
    std::string deprel;

    bool operator==(const AnnotatedToken&) const = default;
};

using Sentence = std::vector<AnnotatedToken>;

struct AnnotatedDocument {
    std::string id;
    std::vector<Sentence> sentences;
    std::string label;
    std::string language;

    std::size_t token_count() const;
    bool operator==(const AnnotatedDocument&) const = default;
};

struct Split {
    std::vector<std::string> train;
    std::vector<std::string> test;
    bool operator==(const Split&) const = default;
};

struct Dataset {
    std::vector<AnnotatedDocument> documents;
    std::vector<std::string> label_set;
    std::optional<Split> split;

    std::size_t token_count() const;
    bool operator==(const Dataset&) const = default;
};

using LabelMap = std::map<std::string, std::string>;

// Documents start at `# newdoc id = X`; a sentence outside any newdoc becomes its own
// document named by its sent_id. `# label = v` and `# split = train|test` are read from
// document comments; the label map wins over the comment.
Dataset parse_conllu(std::istream& in, const LabelMap& labels, const std::string& language,
                     std::vector<std::string>* warnings = nullptr);

void write_conllu(std::ostream& out, const Dataset& ds);

LabelMap load_labels_jsonl(std::istream& in);

struct Violation {
    std::string doc_id;
    int sentence = -1;  // 0-based; -1 for document or dataset level
    std::string rule;
    std::string detail;
};

std::vector<Violation> validate(const Dataset& ds);

}  // namespace fdk
