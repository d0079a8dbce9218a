#include "helpers.hpp"

#include "fdkit/error.hpp"
#include "fdkit/featgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace fdk;
using th::tok;

namespace {

PreprocSpec sp(const char* name) { return spec_from_name(name); }

std::vector<std::string> feats(const Sentence& s, const char* spec, const Resources& res = {}) {
    return extract(th::doc("d", {s}), sp(spec), res).features;
}

Resources with_stop(std::vector<std::string> words) {
    Resources r;
    r.stopwords = StopwordSet(std::move(words));
    return r;
}

bool is_subsequence(const std::vector<std::string>& sub, const std::vector<std::string>& full) {
    std::size_t j = 0;
    for (const auto& f : full)
        if (j < sub.size() && sub[j] == f) ++j;
    return j == sub.size();
}

Dataset synthetic() {
    std::ifstream lf(th::data("corpus/synthetic_en.labels.jsonl"));
    LabelMap labels = load_labels_jsonl(lf);
    std::ifstream in(th::data("corpus/synthetic_en.conllu"));
    return parse_conllu(in, labels, "en");
}

Resources english() {
    Resources r;
    r.stopwords = load_stopwords_file(th::data("stopwords/en.txt"));
    return r;
}

// "the big dog barked"
Sentence big_dog() {
    return {tok(1, "the", "the", "DET", 3, "det"), tok(2, "big", "big", "ADJ", 3, "amod"),
            tok(3, "dog", "dog", "NOUN", 4, "nsubj"), tok(4, "barked", "bark", "VERB", 0, "root")};
}

// "Dogs barked loudly then slept soundly": two clauses joined by conj
Sentence two_clauses() {
    return {tok(1, "Dogs", "dog", "NOUN", 2, "nsubj"), tok(2, "barked", "bark", "VERB", 0, "root"),
            tok(3, "loudly", "loudly", "ADV", 2, "advmod"), tok(4, "then", "then", "ADV", 5, "advmod"),
            tok(5, "slept", "sleep", "VERB", 2, "conj"), tok(6, "soundly", "soundly", "ADV", 5, "advmod")};
}

}  // namespace

TEST_SUITE("featgen") {

TEST_CASE("68 specs with the expected family sizes") {
    auto specs = enumerate_specs();
    CHECK(specs.size() == 68);
    std::map<Base, int> fam;
    std::set<std::string> names;
    for (const auto& s : specs) {
        ++fam[s.base];
        names.insert(s.name());
        CHECK(s.valid());
    }
    CHECK(names.size() == 68);
    CHECK(fam[Base::Tok] == 20);
    CHECK(fam[Base::Lem] == 20);
    CHECK(fam[Base::Chnk] == 12);
    CHECK(fam[Base::Dep] == 12);
    CHECK(fam[Base::PosOnly] == 4);
}

TEST_CASE("canonical naming") {
    PreprocSpec s{Base::Lem, PosMode::Separate, NerMode::None, true, true};
    CHECK(s.name() == "LEMPOSSSTOPALPHA");
    CHECK(PreprocSpec{Base::Tok}.name() == "TOK");
    CHECK(PreprocSpec{Base::Chnk, PosMode::None, NerMode::Replace, false, true}.name() == "CHNKNERRALPHA");
    CHECK(PreprocSpec{Base::PosOnly, PosMode::None, NerMode::None, true, false}.name() == "POSSTOP");
    CHECK_FALSE(PreprocSpec{Base::Tok, PosMode::Merged, NerMode::Annotate}.valid());
    CHECK_FALSE(PreprocSpec{Base::Chnk, PosMode::Merged}.valid());
    CHECK_FALSE(PreprocSpec{Base::PosOnly, PosMode::None, NerMode::Replace}.valid());
}

TEST_CASE("enumeration is stable and names round-trip") {
    auto a = enumerate_specs(), b = enumerate_specs();
    CHECK(a == b);
    for (const auto& s : a) {
        auto p = parse_spec(s.name());
        REQUIRE(p);
        CHECK(*p == s);
    }
}

TEST_CASE("published spellings parse to canonical specs") {
    CHECK(sp("CHK").name() == "CHNK");
    CHECK(sp("chnkner").name() == "CHNKNER");
    CHECK(sp("LEMPASS").name() == "LEMPOSS");
    CHECK(sp("POSS").name() == "POS");
    CHECK(sp("POSSTOP").name() == "POSSTOP");
    CHECK(sp("TOKPOSTOP").name() == "TOKPOSSTOP");
    CHECK_FALSE(parse_spec("BOGUS"));
    CHECK_FALSE(parse_spec("TOKNERPOS"));
    CHECK_THROWS_AS(spec_from_name("XYZ"), ValidationError);
}

TEST_CASE("extract: dogs bark") {
    Sentence s = th::dogs_bark();
    CHECK(feats(s, "TOK") == std::vector<std::string>{"Dogs", "bark", "."});
    CHECK(feats(s, "LEMPOS") == std::vector<std::string>{"dog⊕NOUN", "bark⊕VERB", ".⊕PUNCT"});
    CHECK(feats(s, "TOKALPHA") == std::vector<std::string>{"Dogs", "bark"});
    CHECK(feats(s, "LEMPOSS") == std::vector<std::string>{"dog", "NOUN", "bark", "VERB", ".", "PUNCT"});
    CHECK(feats(s, "POS") == std::vector<std::string>{"NOUN", "VERB", "PUNCT"});
}

TEST_CASE("extract: NER replace and annotate") {
    Sentence s = {tok(1, "John", "John", "PROPN", 2, "nsubj", "PER"), tok(2, "left", "leave", "VERB", 0, "root")};
    CHECK(feats(s, "TOKNERR") == std::vector<std::string>{"PER", "left"});
    CHECK(feats(s, "TOKNER") == std::vector<std::string>{"John⊕PER", "left"});
    CHECK(feats(s, "LEMNER") == std::vector<std::string>{"John⊕PER", "leave"});
}

TEST_CASE("extract: stop filter takes attached features with the token") {
    Sentence s = big_dog();
    Resources r = with_stop({"the"});
    CHECK(feats(s, "TOKSTOP", r) == std::vector<std::string>{"big", "dog", "barked"});
    CHECK(feats(s, "TOKPOSSSTOP", r) == std::vector<std::string>{"big", "ADJ", "dog", "NOUN", "barked", "VERB"});
    CHECK(feats(s, "POSSTOP", r) == std::vector<std::string>{"ADJ", "NOUN", "VERB"});
    CHECK(feats(s, "CHNKSTOP", r) == std::vector<std::string>{"big_dog", "barked"});
}

TEST_CASE("extract: stop matches the lowercased form or the lemma") {
    Sentence s = {tok(1, "The", "the", "DET", 2, "det"), tok(2, "Was", "be", "AUX", 0, "root")};
    CHECK(feats(s, "TOKSTOP", with_stop({"the", "be"})).empty());
}

TEST_CASE("extract: STOP without a list is a capability error") {
    CHECK_THROWS_AS(feats(th::dogs_bark(), "TOKSTOP"), CapabilityError);
}

TEST_CASE("extract: missing layers are capability errors") {
    Sentence s = th::dogs_bark();
    s[1].upos = "_";
    CHECK_THROWS_AS(feats(s, "TOKPOS"), CapabilityError);
    CHECK_NOTHROW(feats(s, "TOK"));
    s = th::dogs_bark();
    s[0].head = -1;
    CHECK_THROWS_AS(feats(s, "CHNK"), CapabilityError);
    s = th::dogs_bark();
    s[0].lemma = "_";
    CHECK_THROWS_AS(feats(s, "LEM"), CapabilityError);
}

TEST_CASE("alpha policies") {
    CHECK(all_letters("Dogs"));
    CHECK(all_letters("żółw"));
    CHECK_FALSE(all_letters("."));
    CHECK_FALSE(all_letters("a1"));
    CHECK_FALSE(all_letters(""));
    CHECK(all_letters_or_kana_han("猫"));
    CHECK(all_letters_or_kana_han("ねこ"));
    CHECK(all_letters_or_kana_han("カタカナー"));
    CHECK_FALSE(all_letters_or_kana_han("。"));
    CHECK(alpha_policy_for("ja")("ねこ"));
    CHECK(utf8_lower("ŻÓŁW Dog") == "żółw dog");
}

TEST_CASE("chunk: the big dog barked") {
    auto cs = chunk(big_dog());
    REQUIRE(cs.size() == 2);
    CHECK(cs[0] == Chunk{1, 3, 3, ChunkKind::Noun});
    CHECK(cs[1] == Chunk{4, 4, 4, ChunkKind::Verb});
    CHECK(feats(big_dog(), "CHNK") == std::vector<std::string>{"the_big_dog", "barked"});
}

TEST_CASE("chunk: single token and punctuation") {
    Sentence one = {tok(1, "Hi", "hi", "INTJ", 0, "root")};
    auto cs = chunk(one);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].first == 1);
    CHECK(cs[0].last == 1);

    Sentence s = {tok(1, "dog", "dog", "NOUN", 2, "nsubj"), tok(2, "barked", "bark", "VERB", 0, "root"),
                  tok(3, ".", ".", "PUNCT", 2, "punct")};
    auto c2 = chunk(s);
    REQUIRE(c2.size() == 3);
    CHECK(c2[2] == Chunk{3, 3, 3, ChunkKind::Other});
}

TEST_CASE("dep features") {
    UnitFn form = [](const AnnotatedToken& t) { return t.form; };
    auto f = dep_features(big_dog(), form);
    CHECK(f == std::vector<std::string>{"barked→nsubj→the_big_dog"});

    Sentence one = {tok(1, "Hi", "hi", "INTJ", 0, "root")};
    CHECK(dep_features(one, form).empty());

    auto g = dep_features(two_clauses(), form);
    CHECK(g == std::vector<std::string>{"barked_loudly→nsubj→Dogs", "barked_loudly→conj→then_slept_soundly"});
    CHECK(feats(two_clauses(), "DEP") == g);
}

TEST_CASE("chunk-root NER tags decorate chunk features") {
    Sentence s = {tok(1, "New", "new", "PROPN", 2, "compound", "LOC"), tok(2, "York", "York", "PROPN", 3, "nsubj", "LOC"),
                  tok(3, "sleeps", "sleep", "VERB", 0, "root")};
    CHECK(feats(s, "CHNKNER") == std::vector<std::string>{"New_York⊕LOC", "sleeps"});
    CHECK(feats(s, "CHNKNERR") == std::vector<std::string>{"LOC", "sleeps"});
    CHECK(feats(s, "DEPNERR") == std::vector<std::string>{"sleeps→nsubj→LOC"});
}

TEST_CASE("stopword loading") {
    std::istringstream in("# comment\nThe\n  and \n\n");
    StopwordSet s = load_stopwords(in);
    CHECK(s.size() == 2);
    CHECK(s.contains("the"));
    CHECK(s.contains("and"));
    for (const char* f : {"stopwords/en.txt", "stopwords/pl.txt", "stopwords/ja.txt"})
        CHECK(load_stopwords_file(th::data(f)).size() > 50);
}

TEST_CASE("chunks partition every sentence of the bundled corpus") {
    Dataset ds = synthetic();
    for (const auto& d : ds.documents)
        for (const auto& s : d.sentences) {
            std::vector<int> cover(s.size() + 1, 0);
            for (const auto& c : chunk(s)) {
                CHECK(c.first <= c.last);
                CHECK(c.head_index >= c.first);
                CHECK(c.head_index <= c.last);
                for (int k = c.first; k <= c.last; ++k) cover[k]++;
            }
            for (std::size_t k = 1; k <= s.size(); ++k) CHECK(cover[k] == 1);
        }
}

TEST_CASE("chunks partition random trees") {
    Rng rng(5);
    const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
    for (int i = 0; i < 500; ++i) {
        Sentence s = th::random_sentence(rng, words, 1 + rng.below(12));
        std::vector<int> cover(s.size() + 1, 0);
        for (const auto& c : chunk(s))
            for (int k = c.first; k <= c.last; ++k) cover[k]++;
        for (std::size_t k = 1; k <= s.size(); ++k) REQUIRE(cover[k] == 1);
    }
}

TEST_CASE("extraction is deterministic and filters only remove") {
    Dataset ds = synthetic();
    Resources res = english();
    for (const auto& spec : enumerate_specs()) {
        PreprocSpec plain = spec;
        plain.stop = plain.alpha = false;
        for (std::size_t i = 0; i < ds.documents.size(); i += 7) {
            const auto& d = ds.documents[i];
            auto a = extract(d, spec, res).features;
            CHECK(a == extract(d, spec, res).features);
            auto full = extract(d, plain, res).features;
            for (const auto& f : a) CHECK_FALSE(f.empty());
            if (spec.base == Base::Chnk || spec.base == Base::Dep)
                CHECK(a.size() <= full.size());  // chunk text shrinks, so only the count is comparable
            else
                CHECK(is_subsequence(a, full));
        }
    }
}

TEST_CASE("POSS doubles the token count") {
    Dataset ds = synthetic();
    Resources res = english();
    for (const char* name : {"TOKPOSS", "LEMPOSS"})
        for (const auto& d : ds.documents) CHECK(extract(d, sp(name), res).features.size() == 2 * d.token_count());
}

TEST_CASE("NERR never adds distinct units when the tags already occur") {
    Rng rng(9);
    const std::vector<std::string> words = {"PER", "LOC", "ann", "bob", "paris", "x", "y"};
    for (int i = 0; i < 300; ++i) {
        Sentence s = th::random_sentence(rng, words, 2 + rng.below(10));
        s.push_back(tok(static_cast<int>(s.size()) + 1, "PER", "per", "X", 1, "dep"));
        s.push_back(tok(static_cast<int>(s.size()) + 1, "LOC", "loc", "X", 1, "dep"));
        auto a = feats(s, "TOK"), b = feats(s, "TOKNERR");
        std::set<std::string> da(a.begin(), a.end()), db(b.begin(), b.end());
        CHECK(db.size() <= da.size());
    }
}

TEST_CASE("feature dump writes one line per document") {
    std::vector<FeatureSequence> seqs = {{"a", {"x", "y"}, {}}, {"b", {}, {}}};
    std::ostringstream out;
    write_feature_dump(out, seqs);
    CHECK(out.str() == "x y\n\n");
}

}
