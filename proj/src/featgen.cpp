#include "fdkit/featgen.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace fdk {

namespace {

constexpr std::string_view kBaseNames[] = {"TOK", "LEM", "CHNK", "DEP", "POS"};

}  // namespace

std::string PreprocSpec::name() const {
    std::string n(kBaseNames[static_cast<int>(base)]);
    if (ner == NerMode::Annotate) n += "NER";
    if (ner == NerMode::Replace) n += "NERR";
    if (pos == PosMode::Merged) n += "POS";
    if (pos == PosMode::Separate) n += "POSS";
    if (stop) n += "STOP";
    if (alpha) n += "ALPHA";
    return n;
}

bool PreprocSpec::valid() const {
    bool lexical = base == Base::Tok || base == Base::Lem;
    if (pos != PosMode::None && (!lexical || ner != NerMode::None)) return false;
    if (base == Base::PosOnly && ner != NerMode::None) return false;
    return true;
}

std::vector<PreprocSpec> enumerate_specs() {
    std::vector<PreprocSpec> out;
    auto flags = [&](PreprocSpec s) {
        for (bool st : {false, true})
            for (bool al : {false, true}) {
                s.stop = st;
                s.alpha = al;
                out.push_back(s);
            }
    };
    for (Base b : {Base::Tok, Base::Lem}) {
        for (NerMode n : {NerMode::None, NerMode::Annotate, NerMode::Replace}) flags({b, PosMode::None, n});
        for (PosMode p : {PosMode::Merged, PosMode::Separate}) flags({b, p, NerMode::None});
    }
    for (Base b : {Base::Chnk, Base::Dep})
        for (NerMode n : {NerMode::None, NerMode::Annotate, NerMode::Replace}) flags({b, PosMode::None, n});
    flags({Base::PosOnly});
    return out;
}

namespace {

bool starts(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

void parse_tail(PreprocSpec s, std::string_view rest, bool allow_top, std::set<PreprocSpec>& out) {
    std::vector<std::string_view> stops = {"STOP", ""};
    if (allow_top) stops.insert(stops.begin() + 1, "TOP");
    for (auto st : stops) {
        if (!starts(rest, st)) continue;
        auto r = rest.substr(st.size());
        if (r.empty() || r == "ALPHA") {
            s.stop = !st.empty();
            s.alpha = !r.empty();
            out.insert(s);
        }
    }
}

}  // namespace

std::optional<PreprocSpec> parse_spec(std::string_view raw) {
    std::string n;
    for (char c : raw) n += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (starts(n, "LEMPASS")) n = "LEMPOSS" + n.substr(7);

    std::set<PreprocSpec> found;
    struct Prefix {
        std::string_view text;
        Base base;
    };
    for (Prefix p : {Prefix{"TOK", Base::Tok}, Prefix{"LEM", Base::Lem}, Prefix{"CHNK", Base::Chnk},
                     Prefix{"CHK", Base::Chnk}, Prefix{"DEP", Base::Dep}}) {
        if (!starts(n, p.text)) continue;
        std::string_view rest = std::string_view(n).substr(p.text.size());
        bool lexical = p.base == Base::Tok || p.base == Base::Lem;
        struct Mod {
            std::string_view text;
            PosMode pos;
            NerMode ner;
        };
        for (Mod m : {Mod{"", PosMode::None, NerMode::None}, Mod{"NER", PosMode::None, NerMode::Annotate},
                      Mod{"NERR", PosMode::None, NerMode::Replace}, Mod{"POS", PosMode::Merged, NerMode::None},
                      Mod{"POSS", PosMode::Separate, NerMode::None}}) {
            if (m.pos != PosMode::None && !lexical) continue;
            if (!starts(rest, m.text)) continue;
            parse_tail({p.base, m.pos, m.ner}, rest.substr(m.text.size()), m.text == "POS", found);
        }
    }
    for (std::string_view p : {"POSS", "POS"})
        if (starts(n, p)) parse_tail({Base::PosOnly}, std::string_view(n).substr(p.size()), p == "POS", found);

    if (found.size() != 1) return std::nullopt;
    return *found.begin();
}

PreprocSpec spec_from_name(std::string_view name) {
    auto s = parse_spec(name);
    if (!s) throw ValidationError("unknown preprocessing spec '" + std::string(name) + "'");
    return *s;
}

StopwordSet::StopwordSet(std::vector<std::string> words) {
    for (auto& w : words) words_.insert(utf8_lower(w));
}

StopwordSet load_stopwords(std::istream& in) {
    std::vector<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        std::string w = trim(line);
        if (!w.empty()) words.push_back(w);
    }
    return StopwordSet(std::move(words));
}

StopwordSet load_stopwords_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open stopword file " + path);
    return load_stopwords(f);
}

std::string utf8_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    int32_t i = 0, n = static_cast<int32_t>(s.size());
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    while (i < n) {
        UChar32 c;
        int32_t start = i;
        U8_NEXT(p, i, n, c);
        if (c < 0) {
            out.append(s.substr(start, i - start));
            continue;
        }
        c = u_tolower(c);
        uint8_t buf[4];
        int32_t k = 0;
        U8_APPEND_UNSAFE(buf, k, c);
        out.append(reinterpret_cast<char*>(buf), k);
    }
    return out;
}

namespace {

template <class Pred>
bool all_code_points(std::string_view s, Pred pred) {
    if (s.empty()) return false;
    int32_t i = 0, n = static_cast<int32_t>(s.size());
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0 || !pred(c)) return false;
    }
    return true;
}

}  // namespace

bool all_letters(std::string_view s) {
    return all_code_points(s, [](UChar32 c) { return u_isalpha(c) != 0; });
}

bool all_letters_or_kana_han(std::string_view s) {
    return all_code_points(s, [](UChar32 c) {
        if (u_isalpha(c)) return true;
        UErrorCode ec = U_ZERO_ERROR;
        UScriptCode sc = uscript_getScript(c, &ec);
        return U_SUCCESS(ec) && (sc == USCRIPT_HAN || sc == USCRIPT_HIRAGANA || sc == USCRIPT_KATAKANA);
    });
}

AlphaPolicy alpha_policy_for(std::string_view language) {
    if (language == "ja" || starts(language, "ja-")) return all_letters_or_kana_han;
    return all_letters;
}

namespace {

bool in(std::string_view v, std::initializer_list<std::string_view> xs) {
    for (auto x : xs)
        if (v == x) return true;
    return false;
}

std::string_view deprel_base(std::string_view d) { return d.substr(0, d.find(':')); }

// noun, verb or none for tokens that may root a chunk
std::optional<ChunkKind> anchor_kind(const AnnotatedToken& t) {
    if (in(deprel_base(t.deprel), {"aux", "cop", "det", "compound", "flat", "fixed"})) return std::nullopt;
    if (in(t.upos, {"NOUN", "PROPN", "PRON"})) return ChunkKind::Noun;
    if (in(t.upos, {"VERB", "AUX"})) return ChunkKind::Verb;
    return std::nullopt;
}

}  // namespace

std::vector<Chunk> chunk(const Sentence& s) {
    int n = static_cast<int>(s.size());
    std::vector<std::optional<ChunkKind>> kind(n);
    for (int i = 0; i < n; ++i) kind[i] = anchor_kind(s[i]);

    // nearest anchor up the head chain, -1 when none
    std::vector<int> target(n, -1);
    for (int i = 0; i < n; ++i) {
        if (kind[i]) {
            target[i] = i;
            continue;
        }
        if (s[i].upos == "PUNCT") continue;
        int h = s[i].head, steps = 0;
        while (h > 0 && h <= n && steps++ <= n) {
            if (kind[h - 1]) {
                target[i] = h - 1;
                break;
            }
            h = s[h - 1].head;
        }
    }

    std::vector<int> owner(n, -1);
    std::vector<Chunk> out;
    for (int a = 0; a < n; ++a) {
        if (!kind[a]) continue;
        int lo = a, hi = a;
        while (lo > 0 && owner[lo - 1] < 0 && target[lo - 1] == a) --lo;
        while (hi + 1 < n && owner[hi + 1] < 0 && target[hi + 1] == a) ++hi;
        for (int k = lo; k <= hi; ++k) owner[k] = a;
        out.push_back({lo + 1, hi + 1, a + 1, *kind[a]});
    }
    for (int i = 0; i < n; ++i)
        if (owner[i] < 0) out.push_back({i + 1, i + 1, i + 1, ChunkKind::Other});
    std::sort(out.begin(), out.end(), [](const Chunk& x, const Chunk& y) { return x.first < y.first; });
    return out;
}

namespace {

std::string chunk_text(const Sentence& s, const Chunk& c, const UnitFn& unit_of, NerMode ner) {
    std::string text;
    for (int k = c.first; k <= c.last; ++k) {
        std::string u = unit_of(s[k - 1]);
        if (u.empty()) continue;
        if (!text.empty()) text += kChunkJoin;
        text += u;
    }
    if (text.empty()) return text;
    const std::string& tag = s[c.head_index - 1].ner;
    if (tag != "O") {
        if (ner == NerMode::Annotate) text += std::string(kMergeSep) + tag;
        if (ner == NerMode::Replace) text = tag;
    }
    return text;
}

std::vector<std::string> pair_features(const Sentence& s, const UnitFn& unit_of, NerMode ner) {
    auto chunks = chunk(s);
    std::vector<int> chunk_of(s.size() + 1, -1);
    for (std::size_t c = 0; c < chunks.size(); ++c)
        for (int k = chunks[c].first; k <= chunks[c].last; ++k) chunk_of[k] = static_cast<int>(c);
    std::vector<std::string> texts;
    for (const auto& c : chunks) texts.push_back(chunk_text(s, c, unit_of, ner));

    std::vector<std::string> out;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const auto& root = s[chunks[c].head_index - 1];
        if (root.head <= 0) continue;
        int g = chunk_of[root.head];
        if (g == static_cast<int>(c)) continue;
        if (texts[g].empty() || texts[c].empty()) continue;
        out.push_back(texts[g] + std::string(kArrow) + root.deprel + std::string(kArrow) + texts[c]);
    }
    return out;
}

bool is_stopword(const AnnotatedToken& t, const StopwordSet& sw) {
    return sw.contains(utf8_lower(t.form)) || sw.contains(utf8_lower(t.lemma));
}

}  // namespace

std::vector<std::string> dep_features(const Sentence& s, const UnitFn& unit_of) {
    return pair_features(s, unit_of, NerMode::None);
}

void check_capability(const AnnotatedDocument& doc, const PreprocSpec& spec, const Resources& res) {
    auto fail = [&](const std::string& what) {
        throw CapabilityError(spec.name() + " needs " + what + " (document '" + doc.id + "')");
    };
    if (spec.stop && !res.stopwords) fail("a stopword list");
    bool need_pos = spec.pos != PosMode::None || spec.base == Base::PosOnly;
    bool need_heads = spec.base == Base::Chnk || spec.base == Base::Dep;
    for (const auto& sent : doc.sentences)
        for (const auto& t : sent) {
            if (need_pos && (t.upos.empty() || t.upos == "_")) fail("UPOS tags");
            if (spec.base == Base::Lem && (t.lemma.empty() || (t.lemma == "_" && t.form != "_"))) fail("lemmas");
            if (need_heads && t.head < 0) fail("dependency heads");
            if (spec.base == Base::Dep && (t.deprel.empty() || t.deprel == "_")) fail("dependency relations");
        }
}

FeatureSequence extract(const AnnotatedDocument& doc, const PreprocSpec& spec, const Resources& res) {
    check_capability(doc, spec, res);
    FeatureSequence fs{doc.id, {}, spec};
    auto& out = fs.features;
    const StopwordSet* sw = spec.stop ? &*res.stopwords : nullptr;

    auto dropped = [&](const AnnotatedToken& t, const std::string& tested) {
        if (sw && is_stopword(t, *sw)) return true;
        if (spec.alpha && !res.alpha(tested)) return true;
        return false;
    };

    if (spec.base == Base::Chnk || spec.base == Base::Dep) {
        UnitFn unit = [&](const AnnotatedToken& t) { return dropped(t, t.form) ? std::string() : t.form; };
        for (const auto& sent : doc.sentences) {
            if (spec.base == Base::Dep) {
                for (auto& f : pair_features(sent, unit, spec.ner)) out.push_back(std::move(f));
                continue;
            }
            for (const auto& c : chunk(sent)) {
                std::string text = chunk_text(sent, c, unit, spec.ner);
                if (!text.empty()) out.push_back(std::move(text));
            }
        }
        return fs;
    }

    for (const auto& sent : doc.sentences)
        for (const auto& t : sent) {
            if (spec.base == Base::PosOnly) {
                if (!dropped(t, t.upos)) out.push_back(t.upos);
                continue;
            }
            std::string unit = spec.base == Base::Tok ? t.form : t.lemma;
            if (dropped(t, unit)) continue;
            if (t.ner != "O") {
                if (spec.ner == NerMode::Annotate) unit += std::string(kMergeSep) + t.ner;
                if (spec.ner == NerMode::Replace) unit = t.ner;
            }
            if (spec.pos == PosMode::Merged) unit += std::string(kMergeSep) + t.upos;
            out.push_back(std::move(unit));
            if (spec.pos == PosMode::Separate) out.push_back(t.upos);
        }
    return fs;
}

std::vector<FeatureSequence> extract_all(const Dataset& ds, const PreprocSpec& spec, const Resources& res) {
    std::vector<FeatureSequence> out;
    out.reserve(ds.documents.size());
    for (const auto& d : ds.documents) out.push_back(extract(d, spec, res));
    return out;
}

void write_feature_dump(std::ostream& out, std::span<const FeatureSequence> seqs) {
    for (const auto& s : seqs) {
        for (std::size_t i = 0; i < s.features.size(); ++i) {
            if (i) out << ' ';
            out << s.features[i];
        }
        out << '\n';
    }
}

}  // namespace fdk
