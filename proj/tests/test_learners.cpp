#include "helpers.hpp"

#include "fdkit/error.hpp"
#include "fdkit/learners.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace fdk;

namespace {

FeatureVector vec(std::vector<std::pair<std::uint32_t, double>> e, std::string label = {}) {
    return {"v", std::move(e), std::move(label)};
}

std::vector<FeatureVector> separable_2d() {
    CsvTable t = read_csv_file(th::data("corpus/separable_2d.csv"));
    int cx = t.require("x"), cy = t.require("y"), cl = t.require("label");
    std::vector<FeatureVector> out;
    for (const auto& r : t.rows) {
        FeatureVector v{"p" + std::to_string(out.size()), {}, r[cl]};
        double x = parse_double(r[cx]), y = parse_double(r[cy]);
        if (x != 0) v.entries.emplace_back(0, x);
        if (y != 0) v.entries.emplace_back(1, y);
        out.push_back(v);
    }
    return out;
}

Dataset synthetic() {
    std::ifstream lf(th::data("corpus/synthetic_en.labels.jsonl"));
    LabelMap labels = load_labels_jsonl(lf);
    std::ifstream in(th::data("corpus/synthetic_en.conllu"));
    return parse_conllu(in, labels, "en");
}

Dataset polish() {
    std::ifstream in(th::data("corpus/sample_pl.conllu"));
    return parse_conllu(in, {}, "pl");
}

ClassifierConfig cfg(LearnerKind k) {
    ClassifierConfig c;
    c.kind = k;
    return c;
}

std::string strip_timing(const std::vector<EvalResult>& rs) {
    std::ostringstream out;
    for (const auto& r : rs) {
        out << r.spec_name << ',' << r.classifier << ',' << format_sig(r.mean_f1, 17) << ','
            << format_sig(r.dispersion, 17);
        for (double f : r.per_fold_f1) out << ',' << format_sig(f, 17);
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> lines_of(const std::string& path) {
    std::ifstream f(path);
    std::vector<std::string> out;
    std::string l;
    while (std::getline(f, l)) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("config names and checks") {
    for (auto k : {LearnerKind::NaiveBayes, LearnerKind::Knn, LearnerKind::LogregSgd, LearnerKind::LinsvmSgd,
                   LearnerKind::Mlp})
        CHECK(kind_from_name(kind_name(k)) == k);
    CHECK_FALSE(kind_from_name("svm"));
    auto d = default_configs();
    CHECK(d.size() == 5);
    CHECK(d[1].k == 1);
    CHECK(d[2].lr == 0.01);
    CHECK(d[2].l2 == 1e-4);
    CHECK(d[2].epochs == 50);
    CHECK(d[4].hidden == 64);
    CHECK(d[4].dropout == 0.5);
    CHECK(d[4].mlp_epochs == 30);
    ClassifierConfig bad = cfg(LearnerKind::Knn);
    bad.k = 0;
    CHECK_THROWS_AS(bad.check(), ValidationError);
    bad = cfg(LearnerKind::Mlp);
    bad.dropout = 1.0;
    CHECK_THROWS_AS(bad.check(), ValidationError);
}

TEST_CASE("naive bayes smoothed feature probabilities") {
    // class A: "x x", class B: "y"; feature 0 = x, 1 = y
    std::vector<FeatureVector> xs = {vec({{0, 2.0}}, "A"), vec({{1, 1.0}}, "B")};
    std::vector<int> ys = {0, 1};
    NaiveBayesModel nb({"A", "B"}, 2, xs, ys, 1.0);
    CHECK(nb.feature_prob(0, 0) == doctest::Approx(3.0 / 4.0));
    CHECK(nb.feature_prob(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("naive bayes posteriors sum to one") {
    Dataset ds = synthetic();
    auto seqs = extract_all(ds, spec_from_name("TOK"), {});
    Vocabulary v = fit_vocabulary(seqs);
    std::vector<FeatureVector> xs;
    std::vector<int> ys;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        xs.push_back(tfidf(seqs[i], v, ds.documents[i].label));
        ys.push_back(ds.documents[i].label == ds.label_set[0] ? 0 : 1);
    }
    NaiveBayesModel nb(ds.label_set, v.size(), xs, ys, 1.0);
    for (const auto& x : xs) {
        auto p = nb.posteriors(x);
        double s = 0;
        for (double q : p) s += q;
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("naive bayes ties go to the first label") {
    std::vector<FeatureVector> xs = {vec({{0, 1.0}}, "b"), vec({{1, 1.0}}, "a")};
    auto m = train(cfg(LearnerKind::NaiveBayes), xs, {"a", "b"}, 2);
    CHECK(m->predict_one(vec({})) == "a");
}

TEST_CASE("knn recalls an exact training vector") {
    auto xs = separable_2d();
    auto m = train(cfg(LearnerKind::Knn), xs, {"a", "b"}, 2);
    for (const auto& x : xs) CHECK(m->predict_one(x) == x.label);
}

TEST_CASE("predict on empty input is empty and checks dimensions") {
    auto xs = separable_2d();
    for (auto k : {LearnerKind::NaiveBayes, LearnerKind::Knn, LearnerKind::LogregSgd, LearnerKind::LinsvmSgd,
                   LearnerKind::Mlp}) {
        auto m = train(cfg(k), xs, {"a", "b"}, 2);
        CHECK(m->predict({}).empty());
        CHECK_THROWS(m->predict_one(vec({{5, 1.0}})));
    }
}

TEST_CASE("linear svm separates the bundled 2-d set") {
    auto xs = separable_2d();
    auto m = train(cfg(LearnerKind::LinsvmSgd), xs, {"a", "b"}, 2);
    std::vector<std::string> gold, pred = m->predict(xs);
    for (const auto& x : xs) gold.push_back(x.label);
    CHECK(macro_f1(gold, pred, {"a", "b"}) == 1.0);
}

TEST_CASE("sgd training loss is non-increasing on the separable set") {
    auto xs = separable_2d();
    for (auto k : {LearnerKind::LinsvmSgd, LearnerKind::LogregSgd}) {
        auto losses = sgd_epoch_losses(cfg(k), xs, {"a", "b"}, 2);
        REQUIRE(losses.size() == 50);
        for (std::size_t e = 1; e < losses.size(); ++e) CHECK(losses[e] <= losses[e - 1] + 1e-12);
        CHECK(losses.back() < losses.front());
    }
}

TEST_CASE("mlp gradients match central differences") {
    Rng rng(4);
    std::vector<FeatureVector> xs;
    for (int i = 0; i < 4; ++i) {
        FeatureVector v;
        for (std::uint32_t f = 0; f < 5; ++f)
            if (rng.below(4) != 0) v.entries.emplace_back(f, rng.uniform() * 2 - 0.5);
        xs.push_back(v);
    }
    std::vector<int> ys = {0, 1, 2, 1};
    MlpParams p;
    p.init(5, 6, 3, 99);
    MlpParams g;
    mlp_loss(p, xs, ys, &g);
    const double h = 1e-6;
    double worst = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        MlpParams a = p, b = p;
        a.at(i) += h;
        b.at(i) -= h;
        double num = (mlp_loss(a, xs, ys, nullptr) - mlp_loss(b, xs, ys, nullptr)) / (2 * h);
        double ana = g.at(i);
        double denom = std::max({std::abs(num), std::abs(ana), 1e-7});
        worst = std::max(worst, std::abs(num - ana) / denom);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("mlp learns the separable set") {
    auto xs = separable_2d();
    auto m = train(cfg(LearnerKind::Mlp), xs, {"a", "b"}, 2);
    std::vector<std::string> gold, pred = m->predict(xs);
    for (const auto& x : xs) gold.push_back(x.label);
    CHECK(macro_f1(gold, pred, {"a", "b"}) >= 0.95);
}

TEST_CASE("macro f1 hand computations") {
    std::vector<std::string> L = {"A", "B"};
    std::vector<std::string> g = {"A", "A", "B", "B"};
    CHECK(macro_f1(g, g, L) == 1.0);
    std::vector<std::string> p = {"A", "B", "B", "B"};
    CHECK(macro_f1(g, p, L) == doctest::Approx((2.0 / 3.0 + 4.0 / 5.0) / 2));
    CHECK(format_fixed(macro_f1(g, p, L), 4) == "0.7333");
    std::vector<std::string> one = {"A", "A", "A", "A"};
    CHECK(format_fixed(macro_f1(g, one, L), 4) == "0.3333");
}

TEST_CASE("macro f1 is invariant under permuting pairs") {
    Rng rng(12);
    std::vector<std::string> L = {"x", "y", "z"};
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 1 + rng.below(30);
        std::vector<std::pair<std::string, std::string>> gp;
        for (std::size_t i = 0; i < n; ++i) gp.emplace_back(L[rng.below(3)], L[rng.below(3)]);
        auto score = [&] {
            std::vector<std::string> g, p;
            for (auto& [a, b] : gp) g.push_back(a), p.push_back(b);
            return macro_f1(g, p, L);
        };
        double before = score();
        rng.shuffle(gp);
        CHECK(score() == doctest::Approx(before).epsilon(1e-15));
        CHECK(before >= 0.0);
        CHECK(before <= 1.0);
    }
}

TEST_CASE("stratified folds keep class proportions") {
    Rng rng(21);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 20 + rng.below(200);
        int k = 2 + static_cast<int>(rng.below(9));
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(rng.below(4) == 0 ? "pos" : "neg");
        std::vector<std::string> L = {"neg", "pos"};
        std::map<std::string, std::size_t> total;
        for (const auto& l : labels) total[l]++;
        if (total["pos"] < static_cast<std::size_t>(k)) {
            CHECK_THROWS_AS(stratified_folds(labels, L, k, 1), StratificationError);
            continue;
        }
        auto folds = stratified_folds(labels, L, k, rng.next());
        REQUIRE(folds.size() == static_cast<std::size_t>(k));
        std::vector<int> seen(n, 0);
        for (const auto& f : folds) {
            std::map<std::string, double> c;
            for (auto i : f) {
                seen[i]++;
                c[labels[i]]++;
            }
            for (const auto& l : L) {
                double expect = static_cast<double>(total[l]) * f.size() / n;
                CHECK(std::abs(c[l] - expect) <= 1.0 + 1e-9);
            }
        }
        for (int s : seen) CHECK(s == 1);
    }
}

TEST_CASE("kfold(10) on 100 docs gives ten folds of ten") {
    Dataset ds = synthetic();
    ds.documents.resize(100);
    std::vector<std::string> labels;
    for (const auto& d : ds.documents) labels.push_back(d.label);
    auto folds = stratified_folds(labels, ds.label_set, 10, 5);
    REQUIRE(folds.size() == 10);
    for (const auto& f : folds) CHECK(f.size() == 10);
    auto r = evaluate(ds, spec_from_name("TOK"), cfg(LearnerKind::NaiveBayes), Protocol::kfold(10), {}, 5);
    CHECK(r.per_fold_f1.size() == 10);
    CHECK(r.mean_f1 >= 0.0);
    CHECK(r.mean_f1 <= 1.0);
    CHECK(r.dispersion >= 0.0);
}

TEST_CASE("holdout gives a single fold and needs a split") {
    Dataset ds = polish();
    auto r = evaluate(ds, spec_from_name("LEM"), cfg(LearnerKind::LinsvmSgd), Protocol::holdout(), {}, 1);
    CHECK(r.per_fold_f1.size() == 1);
    CHECK(r.dispersion == 0.0);
    Dataset nosplit = synthetic();
    CHECK_THROWS_AS(
        evaluate(nosplit, spec_from_name("TOK"), cfg(LearnerKind::NaiveBayes), Protocol::holdout(), {}, 1),
        ValidationError);
}

TEST_CASE("same seed gives identical results apart from timing") {
    Dataset ds = polish();
    for (auto k : {LearnerKind::Knn, LearnerKind::LogregSgd, LearnerKind::Mlp}) {
        auto a = evaluate(ds, spec_from_name("TOK"), cfg(k), Protocol::kfold(5), {}, 17);
        auto b = evaluate(ds, spec_from_name("TOK"), cfg(k), Protocol::kfold(5), {}, 17);
        CHECK(a.per_fold_f1 == b.per_fold_f1);
        CHECK(a.mean_f1 == b.mean_f1);
        CHECK(a.dispersion == b.dispersion);
    }
}

TEST_CASE("cell seeds differ by every coordinate") {
    auto s = cell_seed(1, "TOK", "knn", 0);
    CHECK(s == cell_seed(1, "TOK", "knn", 0));
    CHECK(s != cell_seed(2, "TOK", "knn", 0));
    CHECK(s != cell_seed(1, "LEM", "knn", 0));
    CHECK(s != cell_seed(1, "TOK", "mlp", 0));
    CHECK(s != cell_seed(1, "TOK", "knn", 1));
}

TEST_CASE("full matrix on the small corpus has 340 cells") {
    Dataset ds = polish();
    Resources res;
    res.stopwords = load_stopwords_file(th::data("stopwords/pl.txt"));
    auto specs = enumerate_specs();
    auto configs = default_configs();
    for (auto& c : configs) c.mlp_epochs = 3;
    auto rs = run_matrix(ds, specs, configs, Protocol::kfold(3), res, 1);
    CHECK(rs.size() == 340);
    for (const auto& r : rs) {
        CHECK(r.per_fold_f1.size() == 3);
        CHECK(r.mean_f1 >= 0.0);
        CHECK(r.mean_f1 <= 1.0);
    }
}

TEST_CASE("run_matrix resumes from a partial store without recomputing finished cells") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "fdkit_resume_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string store = (dir / "results.csv").string();

    Dataset ds = polish();
    std::vector<PreprocSpec> specs = {spec_from_name("TOK"), spec_from_name("LEM"), spec_from_name("CHNK")};
    auto configs = default_configs();
    for (auto& c : configs) c.mlp_epochs = 3;
    MatrixOptions opt;
    opt.store_path = store;
    opt.header = "# test header";
    auto full = run_matrix(ds, specs, configs, Protocol::kfold(3), {}, 9, opt);
    auto lines = lines_of(store);
    REQUIRE(lines.size() == 2 + 15 * 3);
    CHECK(lines[0] == "# test header");

    // keep the first 4 complete cells plus one fold of the fifth, as if killed mid-run
    {
        std::ofstream f(store, std::ios::binary | std::ios::trunc);
        for (std::size_t i = 0; i < 2 + 4 * 3 + 1; ++i) f << lines[i] << '\n';
    }
    int computed = 0;
    opt.on_cell = [&](const EvalResult&) { ++computed; };
    auto resumed = run_matrix(ds, specs, configs, Protocol::kfold(3), {}, 9, opt);
    CHECK(computed == 11);
    auto after = lines_of(store);
    REQUIRE(after.size() == lines.size());
    CHECK(strip_timing(resumed) == strip_timing(full));
    // finished cells come back byte-identical, timing included
    std::set<std::string> kept(lines.begin() + 2, lines.begin() + 2 + 12);
    std::size_t found = 0;
    for (const auto& l : after) found += kept.count(l);
    CHECK(found == 12);

    opt.header = "# other header";
    CHECK_THROWS_AS(run_matrix(ds, specs, configs, Protocol::kfold(3), {}, 9, opt), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("summary csv layout") {
    EvalResult r;
    r.spec_name = "TOK";
    r.classifier = "knn";
    r.per_fold_f1 = {0.5, 1.0};
    r.per_fold_seconds = {0.25, 0.25};
    r.finish();
    CHECK(r.mean_f1 == 0.75);
    CHECK(r.dispersion == doctest::Approx(std::sqrt(0.125)));
    std::ostringstream out;
    std::vector<EvalResult> rs = {r};
    write_summary_csv(out, rs);
    CHECK(out.str() == "spec,classifier,mean_f1,dispersion,seconds\nTOK,knn,0.750000,0.353553,0.500000\n");
}

}
