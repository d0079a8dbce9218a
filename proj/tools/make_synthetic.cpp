// Writes the bundled synthetic corpora. Output is a pure function of the seed.
#include "fdkit/util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using fdk::Rng;

struct Tok {
    std::string form, lemma, upos;
    int head;
    std::string deprel, ner;
};

struct Word {
    std::string form, lemma;
};

template <class T>
const T& pick(Rng& r, const std::vector<T>& v) {
    return v[r.below(v.size())];
}

std::string cap(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

void emit(std::ostream& out, const std::string& sent_id, const std::vector<Tok>& toks) {
    out << "# sent_id = " << sent_id << '\n';
    std::string text;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i && toks[i].upos != "PUNCT") text += ' ';
        text += toks[i].form;
    }
    out << "# text = " << text << '\n';
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        std::string misc;
        if (!t.ner.empty()) misc = "NER=B-" + t.ner;
        if (i + 1 < toks.size() && toks[i + 1].upos == "PUNCT") misc += std::string(misc.empty() ? "" : "|") + "SpaceAfter=No";
        if (misc.empty()) misc = "_";
        out << i + 1 << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t" << t.head << '\t'
            << t.deprel << "\t_\t" << misc << '\n';
    }
    out << '\n';
}

// english-like vocabulary; plural/past forms carry their lemma
const std::vector<Word> kNouns = {
    {"dog", "dog"},       {"dogs", "dog"},         {"cat", "cat"},       {"cats", "cat"},
    {"house", "house"},   {"houses", "house"},     {"car", "car"},       {"cars", "car"},
    {"friend", "friend"}, {"friends", "friend"},   {"teacher", "teacher"}, {"teachers", "teacher"},
    {"city", "city"},     {"cities", "city"},      {"book", "book"},     {"books", "book"},
    {"game", "game"},     {"games", "game"},       {"phone", "phone"},   {"phones", "phone"},
    {"song", "song"},     {"songs", "song"},       {"team", "team"},     {"teams", "team"},
    {"movie", "movie"},   {"movies", "movie"},     {"meal", "meal"},     {"meals", "meal"},
    {"class", "class"},   {"classes", "class"},    {"picture", "picture"}, {"pictures", "picture"},
    {"party", "party"},   {"parties", "party"},    {"story", "story"},   {"stories", "story"},
    {"neighbour", "neighbour"}, {"neighbours", "neighbour"}, {"garden", "garden"}, {"gardens", "garden"},
    {"school", "school"}, {"schools", "school"},   {"weekend", "weekend"}, {"trip", "trip"},
    {"coffee", "coffee"}, {"train", "train"},      {"trains", "train"},  {"idea", "idea"},
    {"ideas", "idea"},    {"message", "message"},  {"messages", "message"}, {"photo", "photo"},
};
const std::vector<Word> kVerbs = {
    {"saw", "see"},       {"sees", "see"},         {"called", "call"},   {"calls", "call"},
    {"met", "meet"},      {"meets", "meet"},       {"visited", "visit"}, {"visits", "visit"},
    {"read", "read"},     {"reads", "read"},       {"played", "play"},   {"plays", "play"},
    {"watched", "watch"}, {"watches", "watch"},    {"found", "find"},    {"finds", "find"},
    {"brought", "bring"}, {"brings", "bring"},     {"made", "make"},     {"makes", "make"},
    {"took", "take"},     {"takes", "take"},       {"showed", "show"},   {"shows", "show"},
    {"sent", "send"},     {"sends", "send"},       {"opened", "open"},   {"opens", "open"},
};
const std::vector<Word> kAdjs = {
    {"big", "big"},   {"small", "small"}, {"old", "old"},     {"new", "new"},     {"red", "red"},
    {"quiet", "quiet"}, {"long", "long"}, {"short", "short"}, {"early", "early"}, {"late", "late"},
    {"green", "green"}, {"busy", "busy"}, {"local", "local"}, {"young", "young"}, {"usual", "usual"},
};
const std::vector<Word> kAdvs = {
    {"today", "today"},   {"again", "again"},     {"often", "often"}, {"later", "later"},
    {"quickly", "quickly"}, {"yesterday", "yesterday"}, {"slowly", "slowly"}, {"twice", "twice"},
};
const std::vector<Word> kDets = {{"the", "the"}, {"a", "a"}, {"this", "this"}, {"that", "that"}, {"some", "some"}};
const std::vector<std::string> kPeople = {"Anna", "John", "Maria", "Tom", "Kasia", "Kenji", "Lee", "Omar", "Sara", "Piotr"};
const std::vector<std::string> kPlaces = {"Paris", "Tokyo", "Warsaw", "London", "Oslo", "Lima", "Cairo", "Kyoto"};
const std::vector<std::string> kNumbers = {"2", "3", "5", "10", "12", "42", "100"};

// class markers
const std::vector<Word> kPosAdjs = {
    {"wonderful", "wonderful"}, {"great", "great"},     {"lovely", "lovely"},       {"brilliant", "brilliant"},
    {"kind", "kind"},           {"happy", "happy"},     {"excellent", "excellent"}, {"superb", "superb"},
    {"delightful", "delightful"}, {"cheerful", "cheerful"}, {"gentle", "gentle"},   {"charming", "charming"},
};
const std::vector<Word> kNegAdjs = {
    {"awful", "awful"},   {"terrible", "terrible"}, {"nasty", "nasty"},         {"horrible", "horrible"},
    {"rude", "rude"},     {"boring", "boring"},     {"dreadful", "dreadful"},   {"lousy", "lousy"},
    {"miserable", "miserable"}, {"annoying", "annoying"}, {"dull", "dull"},     {"gloomy", "gloomy"},
};
const std::vector<Word> kPosVerbs = {
    {"loved", "love"},  {"loves", "love"},   {"enjoyed", "enjoy"},   {"enjoys", "enjoy"},
    {"admired", "admire"}, {"praised", "praise"}, {"thanked", "thank"}, {"adores", "adore"},
};
const std::vector<Word> kNegVerbs = {
    {"hated", "hate"},    {"hates", "hate"},   {"despised", "despise"}, {"mocked", "mock"},
    {"blamed", "blame"},  {"insulted", "insult"}, {"ruined", "ruin"},   {"ignored", "ignore"},
};

struct Builder {
    std::vector<Tok> t;
    int add(std::string form, std::string lemma, std::string upos, std::string deprel, std::string ner = "") {
        t.push_back({std::move(form), std::move(lemma), std::move(upos), 0, std::move(deprel), std::move(ner)});
        return static_cast<int>(t.size());
    }
    void head(int dep, int gov) { t[dep - 1].head = gov; }
};

// marker: 0 none, 1 positive, 2 negative
Word adjective(Rng& r, int marker) {
    if (marker == 1) return pick(r, kPosAdjs);
    if (marker == 2) return pick(r, kNegAdjs);
    return pick(r, kAdjs);
}

Word verb(Rng& r, int marker) {
    if (marker == 1) return pick(r, kPosVerbs);
    if (marker == 2) return pick(r, kNegVerbs);
    return pick(r, kVerbs);
}

// noun phrase: det? adj? noun; returns the noun position
int noun_phrase(Builder& b, Rng& r, int adj_marker, bool first) {
    int det = 0, adj = 0;
    if (r.uniform() < 0.7) {
        Word d = pick(r, kDets);
        det = b.add(first ? cap(d.form) : d.form, d.lemma, "DET", "det");
        first = false;
    }
    if (adj_marker || r.uniform() < 0.4) {
        Word a = adjective(r, adj_marker);
        adj = b.add(first ? cap(a.form) : a.form, a.lemma, "ADJ", "amod");
        first = false;
    }
    Word n = pick(r, kNouns);
    int noun = b.add(first ? cap(n.form) : n.form, n.lemma, "NOUN", "nsubj");
    if (det) b.head(det, noun);
    if (adj) b.head(adj, noun);
    return noun;
}

std::vector<Tok> english_sentence(Rng& r, int adj_marker, int verb_marker) {
    Builder b;
    int kind = static_cast<int>(r.below(4));
    if (kind == 0) {
        // [det] [adj] noun verb [det] [adj] noun [adv] .
        int subj = noun_phrase(b, r, adj_marker, true);
        Word v = verb(r, verb_marker);
        int vb = b.add(v.form, v.lemma, "VERB", "root");
        b.head(subj, vb);
        int obj = noun_phrase(b, r, 0, false);
        b.t[obj - 1].deprel = "obj";
        b.head(obj, vb);
        if (r.uniform() < 0.5) {
            Word a = pick(r, kAdvs);
            b.head(b.add(a.form, a.lemma, "ADV", "advmod"), vb);
        }
        b.head(b.add(".", ".", "PUNCT", "punct"), vb);
    } else if (kind == 1) {
        // Name verb Place|Name [adv] !
        std::string who = pick(r, kPeople);
        int s = b.add(who, who, "PROPN", "nsubj", "PER");
        Word v = verb(r, verb_marker);
        int vb = b.add(v.form, v.lemma, "VERB", "root");
        b.head(s, vb);
        bool place = r.uniform() < 0.5;
        std::string o = place ? pick(r, kPlaces) : pick(r, kPeople);
        b.head(b.add(o, o, "PROPN", "obj", place ? "LOC" : "PER"), vb);
        if (adj_marker) {
            Word a = adjective(r, adj_marker);
            int cc = b.add("and", "and", "CCONJ", "cc");
            int it = b.add("it", "it", "PRON", "nsubj");
            int was = b.add("was", "be", "AUX", "cop");
            int ad = b.add(a.form, a.lemma, "ADJ", "conj");
            b.head(cc, ad);
            b.head(it, ad);
            b.head(was, ad);
            b.head(ad, vb);
        } else if (r.uniform() < 0.5) {
            Word a = pick(r, kAdvs);
            b.head(b.add(a.form, a.lemma, "ADV", "advmod"), vb);
        }
        std::string p = r.uniform() < 0.5 ? "!" : ".";
        b.head(b.add(p, p, "PUNCT", "punct"), vb);
    } else if (kind == 2) {
        // The noun was adj .
        Word d = pick(r, kDets);
        int det = b.add(cap(d.form), d.lemma, "DET", "det");
        Word n = pick(r, kNouns);
        int noun = b.add(n.form, n.lemma, "NOUN", "nsubj");
        b.head(det, noun);
        int cop = b.add(r.uniform() < 0.5 ? "was" : "is", "be", "AUX", "cop");
        Word a = adjective(r, adj_marker ? adj_marker : (verb_marker ? verb_marker : 0));
        int ad = b.add(a.form, a.lemma, "ADJ", "root");
        b.head(noun, ad);
        b.head(cop, ad);
        if (r.uniform() < 0.4) {
            b.head(b.add("in", "in", "ADP", "case"), 0);
            std::string pl = pick(r, kPlaces);
            int place = b.add(pl, pl, "PROPN", "obl", "LOC");
            b.head(place - 1, place);
            b.head(place, ad);
        }
        b.head(b.add(".", ".", "PUNCT", "punct"), ad);
    } else {
        // num nouns verb the noun .
        std::string num = pick(r, kNumbers);
        int nm = b.add(num, num, "NUM", "nummod", "CARDINAL");
        Word n = pick(r, kNouns);
        int noun = b.add(n.form, n.lemma, "NOUN", "nsubj");
        b.head(nm, noun);
        Word v = verb(r, verb_marker);
        int vb = b.add(v.form, v.lemma, "VERB", "root");
        b.head(noun, vb);
        int obj = noun_phrase(b, r, adj_marker, false);
        b.t[obj - 1].deprel = "obj";
        b.head(obj, vb);
        b.head(b.add(".", ".", "PUNCT", "punct"), vb);
    }
    return b.t;
}

void write_english(const std::filesystem::path& dir, std::uint64_t seed) {
    Rng r(seed);
    struct Doc {
        std::string id, label;
        bool separable;
    };
    std::vector<Doc> docs;
    for (int i = 0; i < 400; ++i)
        docs.push_back({"", i < 130 ? "positive" : "negative", true});
    for (int i = 0; i < 100; ++i)
        docs.push_back({"", i < 45 ? "positive" : "negative", false});
    r.shuffle(docs);
    int ns = 0, nh = 0;
    char buf[32];
    for (auto& d : docs) {
        std::snprintf(buf, sizeof buf, "%s-%04d", d.separable ? "sep" : "hard", d.separable ? ++ns : ++nh);
        d.id = buf;
    }

    std::ofstream out(dir / "synthetic_en.conllu", std::ios::binary);
    std::ofstream lab(dir / "synthetic_en.labels.jsonl", std::ios::binary);
    for (const auto& d : docs) {
        out << "# newdoc id = " << d.id << '\n';
        lab << "{\"id\": \"" << d.id << "\", \"label\": \"" << d.label << "\"}\n";
        int sentences = 1 + static_cast<int>(r.below(3));
        int cls = d.label == "positive" ? 1 : 2;
        // separable documents carry at least two class markers
        int markers_left = d.separable ? 2 + static_cast<int>(r.below(2)) : 0;
        for (int s = 0; s < sentences; ++s) {
            int am = 0, vm = 0;
            if (markers_left > 0) {
                bool last = s == sentences - 1;
                am = cls;
                --markers_left;
                if (markers_left > 0 && (last || r.uniform() < 0.5)) {
                    vm = cls;
                    --markers_left;
                }
                if (last)
                    markers_left = 0;
            }
            emit(out, d.id + "-" + std::to_string(s + 1), english_sentence(r, am, vm));
        }
    }
}

// polish-like sample with a fixed train/test split
void write_polish(const std::filesystem::path& dir, std::uint64_t seed) {
    Rng r(seed);
    const std::vector<Word> people = {{"Anna", "Anna"}, {"Piotr", "Piotr"}, {"Kasia", "Kasia"}, {"Marek", "Marek"}};
    const std::vector<Word> verbs = {{"kupiła", "kupić"}, {"widział", "widzieć"}, {"czytał", "czytać"},
                                     {"odwiedziła", "odwiedzić"}, {"zrobił", "zrobić"}};
    const std::vector<Word> nouns = {{"samochód", "samochód"}, {"książkę", "książka"}, {"dom", "dom"},
                                     {"film", "film"}, {"obiad", "obiad"}, {"ogród", "ogród"}};
    const std::vector<Word> adjs = {{"nowy", "nowy"}, {"stary", "stary"}, {"duży", "duży"}, {"mały", "mały"}};
    const std::vector<Word> pos = {{"wspaniały", "wspaniały"}, {"piękny", "piękny"}, {"świetny", "świetny"}};
    const std::vector<Word> neg = {{"okropny", "okropny"}, {"żałosny", "żałosny"}, {"głupi", "głupi"}};
    std::ofstream out(dir / "sample_pl.conllu", std::ios::binary);
    for (int i = 0; i < 40; ++i) {
        std::string label = i % 3 == 0 ? "positive" : "negative";
        char id[16];
        std::snprintf(id, sizeof id, "pl-%03d", i + 1);
        out << "# newdoc id = " << id << "\n# label = " << label << "\n# split = " << (i < 30 ? "train" : "test")
            << '\n';
        int sentences = 1 + static_cast<int>(r.below(2));
        for (int s = 0; s < sentences; ++s) {
            Builder b;
            Word p = pick(r, people);
            int subj = b.add(p.form, p.lemma, "PROPN", "nsubj", "PER");
            Word v = pick(r, verbs);
            int vb = b.add(v.form, v.lemma, "VERB", "root");
            b.head(subj, vb);
            Word a = s == 0 ? pick(r, label == "positive" ? pos : neg) : pick(r, adjs);
            int ad = b.add(a.form, a.lemma, "ADJ", "amod");
            Word n = pick(r, nouns);
            int nn = b.add(n.form, n.lemma, "NOUN", "obj");
            b.head(ad, nn);
            b.head(nn, vb);
            if (r.uniform() < 0.4) {
                b.head(b.add("w", "w", "ADP", "case"), 0);
                int city = b.add("Warszawie", "Warszawa", "PROPN", "obl", "LOC");
                b.head(city - 1, city);
                b.head(city, vb);
            }
            b.head(b.add(".", ".", "PUNCT", "punct"), vb);
            emit(out, std::string(id) + "-" + std::to_string(s + 1), b.t);
        }
    }
}

// japanese-like sample exercising kanji/kana tokens
void write_japanese(const std::filesystem::path& dir, std::uint64_t seed) {
    Rng r(seed);
    const std::vector<Word> subjects = {{"猫", "猫"}, {"先生", "先生"}, {"友達", "友達"}, {"田中", "田中"}};
    const std::vector<Word> objects = {{"魚", "魚"}, {"テレビ", "テレビ"}, {"ゲーム", "ゲーム"}, {"本", "本"},
                                       {"ラーメン", "ラーメン"}};
    const std::vector<Word> verbs = {{"食べ", "食べる"}, {"見", "見る"}, {"買っ", "買う"}, {"読ん", "読む"}};
    const std::vector<Word> pos = {{"素晴らしい", "素晴らしい"}, {"楽しい", "楽しい"}, {"優しい", "優しい"}};
    const std::vector<Word> neg = {{"ひどい", "ひどい"}, {"つまらない", "つまらない"}, {"悪い", "悪い"}};
    std::ofstream out(dir / "sample_ja.conllu", std::ios::binary);
    for (int i = 0; i < 30; ++i) {
        std::string label = i % 2 == 0 ? "positive" : "negative";
        char id[16];
        std::snprintf(id, sizeof id, "ja-%03d", i + 1);
        out << "# newdoc id = " << id << "\n# label = " << label << '\n';
        Builder b;
        Word s = pick(r, subjects);
        int subj = b.add(s.form, s.lemma, s.form == "田中" ? "PROPN" : "NOUN", "nsubj", s.form == "田中" ? "PER" : "");
        b.head(b.add("は", "は", "ADP", "case"), subj);
        Word a = pick(r, label == "positive" ? pos : neg);
        int ad = b.add(a.form, a.lemma, "ADJ", "amod");
        Word o = pick(r, objects);
        int obj = b.add(o.form, o.lemma, "NOUN", "obj");
        b.head(ad, obj);
        b.head(b.add("を", "を", "ADP", "case"), obj);
        if (r.uniform() < 0.4) b.head(b.add("3", "3", "NUM", "nummod", "CARDINAL"), obj);
        Word v = pick(r, verbs);
        int vb = b.add(v.form, v.lemma, "VERB", "root");
        b.head(subj, vb);
        b.head(obj, vb);
        b.head(b.add("た", "た", "AUX", "aux"), vb);
        b.head(b.add("。", "。", "PUNCT", "punct"), vb);
        emit(out, std::string(id) + "-1", b.t);
    }
}

// two gaussian blobs with a guaranteed margin around the line x + y = 0
void write_points(const std::filesystem::path& dir, std::uint64_t seed) {
    Rng r(seed);
    std::ofstream out(dir / "separable_2d.csv", std::ios::binary);
    out << "x,y,label\n";
    int made = 0;
    while (made < 80) {
        bool a = made % 2 == 0;
        double cx = a ? 2.0 : -2.0;
        double x = cx + r.normal() * 0.8, y = cx + r.normal() * 0.8;
        double s = (x + y) / std::sqrt(2.0);
        if (a ? s < 0.5 : s > -0.5) continue;
        out << fdk::format_fixed(x, 4) << ',' << fdk::format_fixed(y, 4) << ',' << (a ? "a" : "b") << '\n';
        ++made;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path dir = argc > 1 ? argv[1] : "data/corpus";
    std::filesystem::create_directories(dir);
    write_english(dir, 20240501);
    write_polish(dir, 20240502);
    write_japanese(dir, 20240503);
    write_points(dir, 20240504);
    std::cout << "wrote corpora to " << dir << '\n';
}
