#include "fdkit/corpus.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

namespace fdk {

std::size_t AnnotatedDocument::token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
}

std::size_t Dataset::token_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.token_count();
    return n;
}

namespace {

std::string strip_iob(const std::string& tag) {
    if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I' || tag[0] == 'E' || tag[0] == 'S') &&
        (tag[1] == '-' || tag[1] == '_'))
        return tag.substr(2);
    return tag;
}

std::string ner_from_misc(const std::string& misc) {
    if (misc == "_") return "O";
    for (const auto& kv : split(misc, '|')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        if (kv.compare(0, eq, "NER") == 0) {
            std::string v = strip_iob(kv.substr(eq + 1));
            return v.empty() || v == "_" ? "O" : v;
        }
    }
    return "O";
}

// "key = value" comment; returns false when the comment has another key
bool comment_value(const std::string& line, std::string_view key, std::string& value) {
    std::string body = trim(std::string_view(line).substr(1));
    if (body.compare(0, key.size(), key) != 0) return false;
    std::string rest = trim(std::string_view(body).substr(key.size()));
    if (rest.empty() || rest[0] != '=') return false;
    value = trim(std::string_view(rest).substr(1));
    return true;
}

struct Pending {
    AnnotatedDocument doc;
    std::string comment_label;
    std::string split;
    bool explicit_doc = false;
};

}  // namespace

Dataset parse_conllu(std::istream& in, const LabelMap& labels, const std::string& language,
                     std::vector<std::string>* warnings) {
    std::vector<Pending> docs;
    Sentence sent;
    std::string sent_id;
    bool in_doc = false;
    long lineno = 0;
    long sent_line = 0;

    auto flush_sentence = [&] {
        if (sent.empty()) return;
        if (!in_doc || (!docs.empty() && !docs.back().explicit_doc)) {
            if (sent_id.empty())
                throw ParseError("sentence outside any document has no sent_id", sent_line);
            Pending p;
            p.doc.id = sent_id;
            docs.push_back(std::move(p));
            in_doc = true;
        }
        docs.back().doc.sentences.push_back(std::move(sent));
        sent.clear();
        sent_id.clear();
    };

    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush_sentence();
            if (in_doc && !docs.back().explicit_doc) in_doc = false;
            continue;
        }
        if (line[0] == '#') {
            std::string v;
            if (comment_value(line, "newdoc id", v)) {
                flush_sentence();
                Pending p;
                p.doc.id = v;
                p.explicit_doc = true;
                docs.push_back(std::move(p));
                in_doc = true;
            } else if (comment_value(line, "sent_id", v)) {
                sent_id = v;
            } else if (comment_value(line, "label", v)) {
                if (in_doc && docs.back().explicit_doc) docs.back().comment_label = v;
            } else if (comment_value(line, "split", v)) {
                if (v != "train" && v != "test") throw ParseError("split must be train or test", lineno);
                if (in_doc && docs.back().explicit_doc) docs.back().split = v;
            }
            continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() != 10)
            throw ParseError("expected 10 tab-separated columns, got " + std::to_string(cols.size()),
                             lineno);
        const std::string& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
            if (warnings)
                warnings->push_back("line " + std::to_string(lineno) + ": skipped token range or empty node " + id);
            continue;
        }
        if (sent.empty()) sent_line = lineno;
        AnnotatedToken t;
        try {
            t.index = static_cast<int>(parse_int(id));
            t.head = cols[6] == "_" ? -1 : static_cast<int>(parse_int(cols[6]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        t.form = cols[1];
        t.lemma = cols[2];
        t.upos = cols[3];
        t.deprel = cols[7];
        t.ner = ner_from_misc(cols[9]);
        sent.push_back(std::move(t));
    }
    flush_sentence();

    Dataset ds;
    std::set<std::string> seen_ids, label_set;
    for (auto& p : docs) seen_ids.insert(p.doc.id);
    for (const auto& [id, lab] : labels)
        if (!seen_ids.count(id)) throw ValidationError("label map names unknown document '" + id + "'");

    std::size_t with_split = 0;
    std::vector<std::string> splits;
    for (auto& p : docs) {
        if (p.doc.sentences.empty()) {
            if (warnings) warnings->push_back("document " + p.doc.id + " has no sentences; dropped");
            continue;
        }
        auto it = labels.find(p.doc.id);
        if (it != labels.end())
            p.doc.label = it->second;
        else if (!p.comment_label.empty())
            p.doc.label = p.comment_label;
        else
            throw ValidationError("document '" + p.doc.id + "' has no label");
        p.doc.language = language;
        label_set.insert(p.doc.label);
        if (!p.split.empty()) ++with_split;
        splits.push_back(p.split);
        ds.documents.push_back(std::move(p.doc));
    }
    ds.label_set.assign(label_set.begin(), label_set.end());

    if (with_split > 0) {
        if (with_split != ds.documents.size())
            throw ValidationError("split comment present on some documents but not all");
        Split s;
        for (std::size_t k = 0; k < splits.size(); ++k)
            (splits[k] == "train" ? s.train : s.test).push_back(ds.documents[k].id);
        ds.split = std::move(s);
    }
    return ds;
}

void write_conllu(std::ostream& out, const Dataset& ds) {
    std::set<std::string> test;
    if (ds.split) test.insert(ds.split->test.begin(), ds.split->test.end());
    for (const auto& d : ds.documents) {
        out << "# newdoc id = " << d.id << '\n';
        out << "# label = " << d.label << '\n';
        if (ds.split) out << "# split = " << (test.count(d.id) ? "test" : "train") << '\n';
        for (std::size_t si = 0; si < d.sentences.size(); ++si) {
            out << "# sent_id = " << d.id << '-' << si + 1 << '\n';
            for (const auto& t : d.sentences[si]) {
                out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t";
                if (t.head < 0)
                    out << '_';
                else
                    out << t.head;
                out << '\t' << t.deprel << "\t_\t";
                if (t.ner == "O")
                    out << '_';
                else
                    out << "NER=" << t.ner;
                out << '\n';
            }
            out << '\n';
        }
    }
}

LabelMap load_labels_jsonl(std::istream& in) {
    LabelMap m;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("labels: ") + e.what(), lineno);
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("label") ||
            !j["label"].is_string())
            throw ValidationError("labels line " + std::to_string(lineno) +
                                  ": need string fields \"id\" and \"label\"");
        std::string id = j["id"];
        if (!m.emplace(id, j["label"].get<std::string>()).second)
            throw ValidationError("labels line " + std::to_string(lineno) + ": duplicate id '" + id + "'");
    }
    return m;
}

std::vector<Violation> validate(const Dataset& ds) {
    std::vector<Violation> out;
    std::set<std::string> ids;
    std::set<std::string> labels(ds.label_set.begin(), ds.label_set.end());
    for (const auto& d : ds.documents) {
        if (!ids.insert(d.id).second) out.push_back({d.id, -1, "duplicate id", ""});
        if (!labels.count(d.label)) out.push_back({d.id, -1, "unknown label", d.label});
        if (d.sentences.empty()) out.push_back({d.id, -1, "empty document", ""});
        for (std::size_t si = 0; si < d.sentences.size(); ++si) {
            const auto& s = d.sentences[si];
            int sidx = static_cast<int>(si);
            if (s.empty()) {
                out.push_back({d.id, sidx, "empty sentence", ""});
                continue;
            }
            int n = static_cast<int>(s.size());
            int roots = 0, missing = 0;
            for (int i = 0; i < n; ++i) {
                const auto& t = s[i];
                std::string where = "token " + std::to_string(i + 1);
                if (t.index != i + 1) out.push_back({d.id, sidx, "index sequence", where});
                if (t.form.empty()) out.push_back({d.id, sidx, "empty form", where});
                if (t.lemma.empty() || t.upos.empty() || t.deprel.empty() || t.ner.empty())
                    out.push_back({d.id, sidx, "empty field", where});
                if (t.head < 0) {
                    ++missing;
                    continue;
                }
                if (t.head == 0) ++roots;
                if (t.head > n) out.push_back({d.id, sidx, "head out of bounds", where});
                if (t.head == t.index) out.push_back({d.id, sidx, "self loop", where});
            }
            if (missing == n) continue;
            if (missing > 0) out.push_back({d.id, sidx, "missing head", ""});
            if (roots > 1) out.push_back({d.id, sidx, "multiple roots", ""});
            if (roots == 0) out.push_back({d.id, sidx, "no root", ""});
            if (roots == 1 && missing == 0) {
                bool bounded = true;
                for (const auto& t : s)
                    if (t.head > n || t.head == t.index) bounded = false;
                if (bounded) {
                    for (int i = 0; i < n; ++i) {
                        int cur = i + 1, steps = 0;
                        while (cur != 0 && steps <= n) {
                            cur = s[cur - 1].head;
                            ++steps;
                        }
                        if (cur != 0) {
                            out.push_back({d.id, sidx, "head cycle", "token " + std::to_string(i + 1)});
                            break;
                        }
                    }
                }
            }
        }
    }
    if (ds.split) {
        std::set<std::string> seen;
        bool ok = true;
        for (const auto* part : {&ds.split->train, &ds.split->test})
            for (const auto& id : *part)
                if (!ids.count(id) || !seen.insert(id).second) ok = false;
        if (!ok || seen.size() != ids.size()) out.push_back({"", -1, "split not a partition", ""});
    }
    return out;
}

}  // namespace fdk
