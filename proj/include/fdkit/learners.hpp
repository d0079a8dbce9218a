#pragma once

#include "fdkit/corpus.hpp"
#include "fdkit/featgen.hpp"
#include "fdkit/vectorize.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fdk {

enum class LearnerKind { NaiveBayes, Knn, LogregSgd, LinsvmSgd, Mlp };

std::string_view kind_name(LearnerKind k);
std::optional<LearnerKind> kind_from_name(std::string_view s);

struct ClassifierConfig {
    LearnerKind kind = LearnerKind::NaiveBayes;
    std::string name;  // column label in outputs; kind name when empty

    double alpha = 1.0;  // naive_bayes
    int k = 1;           // knn

    // sgd learners
    double lr = 0.01;
    double l2 = 1e-4;
    int epochs = 50;

    // mlp
    int hidden = 64;
    double dropout = 0.5;
    double adam_lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int mlp_epochs = 30;
    int batch = 32;

    std::uint64_t seed = 0;

    std::string label() const { return name.empty() ? std::string(kind_name(kind)) : name; }
    void check() const;
};

std::vector<ClassifierConfig> default_configs();

class Model {
public:
    virtual ~Model() = default;
    std::vector<std::string> predict(std::span<const FeatureVector> xs) const;
    std::string predict_one(const FeatureVector& x) const;
    const std::vector<std::string>& labels() const { return labels_; }
    std::size_t dim() const { return dim_; }

protected:
    Model(std::vector<std::string> labels, std::size_t dim) : labels_(std::move(labels)), dim_(dim) {}
    virtual int classify(const FeatureVector& x) const = 0;

    std::vector<std::string> labels_;
    std::size_t dim_;
};

class NaiveBayesModel : public Model {
public:
    NaiveBayesModel(std::vector<std::string> labels, std::size_t dim, std::span<const FeatureVector> xs,
                    std::span<const int> ys, double alpha);
    double feature_prob(int cls, std::uint32_t feature) const;
    std::vector<double> posteriors(const FeatureVector& x) const;

protected:
    int classify(const FeatureVector& x) const override;

private:
    std::vector<double> joint(const FeatureVector& x) const;
    std::vector<double> log_prior_;
    std::vector<double> log_prob_;  // cls * dim + feature
};

// labels defines class order (ties resolve to the earlier label); dim is the vocabulary size
std::unique_ptr<Model> train(const ClassifierConfig& cfg, std::span<const FeatureVector> xs,
                             const std::vector<std::string>& labels, std::size_t dim);

// mean training objective per epoch of the last sgd fit; used by tests
std::vector<double> sgd_epoch_losses(const ClassifierConfig& cfg, std::span<const FeatureVector> xs,
                                     const std::vector<std::string>& labels, std::size_t dim);

struct MlpParams {
    std::size_t in = 0, hidden = 0, out = 0;
    std::vector<double> w1, b1, w2, b2;  // w1: in x hidden, w2: hidden x out, row-major

    void init(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed);
    std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
    double& at(std::size_t flat);
};

// mean cross-entropy over the batch; fills grad when non-null; keep[i*hidden+j] scales hidden
// units (inverted dropout) when non-null
double mlp_loss(const MlpParams& p, std::span<const FeatureVector> xs, std::span<const int> ys, MlpParams* grad,
                const std::vector<double>* keep = nullptr);

struct ConfusionCounts {
    std::vector<std::size_t> tp, fp, fn;
};

ConfusionCounts confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          const std::vector<std::string>& label_set);
double macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                const std::vector<std::string>& label_set);

double mean(std::span<const double> v);
double sample_stddev(std::span<const double> v);

struct Protocol {
    enum Kind { KFold, Holdout } kind = KFold;
    int folds = 5;
    static Protocol kfold(int n) { return {KFold, n}; }
    static Protocol holdout() { return {Holdout, 1}; }
    int fold_count() const { return kind == Holdout ? 1 : folds; }
};

// test indices per fold; seeded shuffle inside each class, dealt round-robin across folds
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::string> labels,
                                                       const std::vector<std::string>& label_set, int n,
                                                       std::uint64_t seed);

struct EvalOptions {
    bool smote = true;
    int smote_k = 5;
};

struct EvalResult {
    std::string spec_name;
    std::string classifier;
    std::vector<double> per_fold_f1;
    std::vector<double> per_fold_seconds;
    double mean_f1 = 0.0;
    double dispersion = 0.0;
    double wall_seconds = 0.0;

    void finish();
};

std::uint64_t cell_seed(std::uint64_t seed, std::string_view spec, std::string_view classifier, int fold);

// features pre-extracted for the spec, one per document in dataset order
EvalResult evaluate_features(const Dataset& ds, std::span<const FeatureSequence> feats, const PreprocSpec& spec,
                             const ClassifierConfig& cfg, const Protocol& protocol, std::uint64_t seed,
                             const EvalOptions& opt = {});

EvalResult evaluate(const Dataset& ds, const PreprocSpec& spec, const ClassifierConfig& cfg, const Protocol& protocol,
                    const Resources& res, std::uint64_t seed, const EvalOptions& opt = {});

struct MatrixOptions {
    EvalOptions eval;
    unsigned jobs = 1;
    std::string store_path;  // results csv; empty for in-memory only
    std::string header;      // comment line written at the top of the store
    std::function<void(const EvalResult&)> on_cell;
};

// cells already complete in the store are loaded, not recomputed
std::vector<EvalResult> run_matrix(const Dataset& ds, std::span<const PreprocSpec> specs,
                                   std::span<const ClassifierConfig> configs, const Protocol& protocol,
                                   const Resources& res, std::uint64_t seed, const MatrixOptions& opt = {});

void write_results_csv(std::ostream& out, std::span<const EvalResult> rs);
void write_summary_csv(std::ostream& out, std::span<const EvalResult> rs);

}  // namespace fdk
