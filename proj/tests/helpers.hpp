#pragma once

#include "fdkit/corpus.hpp"
#include "fdkit/featgen.hpp"
#include "fdkit/util.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace th {

inline std::string data(const std::string& rel) { return std::string(FDKIT_DATA_DIR) + "/" + rel; }

inline fdk::AnnotatedToken tok(int index, std::string form, std::string lemma, std::string upos, int head,
                               std::string deprel, std::string ner = "O") {
    fdk::AnnotatedToken t;
    t.index = index;
    t.form = std::move(form);
    t.lemma = std::move(lemma);
    t.upos = std::move(upos);
    t.head = head;
    t.deprel = std::move(deprel);
    t.ner = std::move(ner);
    return t;
}

inline fdk::AnnotatedDocument doc(std::string id, std::vector<fdk::Sentence> ss, std::string label = "x") {
    fdk::AnnotatedDocument d;
    d.id = std::move(id);
    d.sentences = std::move(ss);
    d.label = std::move(label);
    d.language = "en";
    return d;
}

// "Dogs bark ."
inline fdk::Sentence dogs_bark() {
    return {tok(1, "Dogs", "dog", "NOUN", 2, "nsubj"), tok(2, "bark", "bark", "VERB", 0, "root"),
            tok(3, ".", ".", "PUNCT", 2, "punct")};
}

// flat chain sentence of random words; used by several property tests
inline fdk::Sentence random_sentence(fdk::Rng& rng, const std::vector<std::string>& words, std::size_t len) {
    static const char* tags[] = {"NOUN", "VERB", "ADJ", "ADV", "DET", "PRON", "PUNCT", "PROPN", "AUX"};
    static const char* rels[] = {"nsubj", "obj", "amod", "advmod", "det", "punct", "conj", "obl"};
    fdk::Sentence s;
    int root = static_cast<int>(rng.below(len)) + 1;
    for (std::size_t i = 1; i <= len; ++i) {
        const std::string& w = words[rng.below(words.size())];
        int idx = static_cast<int>(i);
        int head = 0;
        if (idx != root) {
            // attach to an earlier token or the root, which keeps the graph a tree
            head = idx == 1 ? root : static_cast<int>(rng.below(static_cast<std::size_t>(idx - 1))) + 1;
            if (idx > 1 && rng.below(3) == 0) head = root;
            if (head == idx) head = root;
        }
        std::string ner = rng.below(6) == 0 ? (rng.below(2) ? "PER" : "LOC") : "O";
        s.push_back(tok(idx, w, fdk::utf8_lower(w), tags[rng.below(9)], head, idx == root ? "root" : rels[rng.below(8)],
                        ner));
    }
    return s;
}

}  // namespace th
