#include "fdkit/learners.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fdk {

namespace {

constexpr std::string_view kKindNames[] = {"naive_bayes", "knn", "logreg_sgd", "linsvm_sgd", "mlp"};

}  // namespace

std::string_view kind_name(LearnerKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<LearnerKind> kind_from_name(std::string_view s) {
    for (int i = 0; i < 5; ++i)
        if (kKindNames[i] == s) return static_cast<LearnerKind>(i);
    return std::nullopt;
}

void ClassifierConfig::check() const {
    auto bad = [&](const std::string& m) { throw ValidationError(label() + ": " + m); };
    if (alpha <= 0) bad("alpha must be positive");
    if (k < 1) bad("k must be at least 1");
    if (epochs < 1 || mlp_epochs < 1) bad("epochs must be at least 1");
    if (!(dropout >= 0 && dropout < 1)) bad("dropout must be in [0,1)");
    if (hidden < 1 || batch < 1) bad("hidden and batch must be positive");
    if (lr <= 0 || adam_lr <= 0 || l2 < 0) bad("learning rates must be positive, l2 non-negative");
}

std::vector<ClassifierConfig> default_configs() {
    std::vector<ClassifierConfig> out;
    for (auto k : {LearnerKind::NaiveBayes, LearnerKind::Knn, LearnerKind::LogregSgd, LearnerKind::LinsvmSgd,
                   LearnerKind::Mlp}) {
        ClassifierConfig c;
        c.kind = k;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> Model::predict(std::span<const FeatureVector> xs) const {
    std::vector<std::string> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(predict_one(x));
    return out;
}

std::string Model::predict_one(const FeatureVector& x) const {
    for (const auto& [i, w] : x.entries)
        if (i >= dim_)
            throw Error("dimension mismatch: feature " + std::to_string(i) + " outside model width " +
                        std::to_string(dim_));
    return labels_[classify(x)];
}

namespace {

int argmax(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double dot(const std::vector<double>& w, const FeatureVector& x) {
    double s = 0.0;
    for (const auto& [i, v] : x.entries) s += w[i] * v;
    return s;
}

double sparse_dot(const FeatureVector& a, const FeatureVector& b) {
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        auto ia = a.entries[i].first, jb = b.entries[j].first;
        if (ia < jb)
            ++i;
        else if (jb < ia)
            ++j;
        else
            s += a.entries[i++].second * b.entries[j++].second;
    }
    return s;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

NaiveBayesModel::NaiveBayesModel(std::vector<std::string> labels, std::size_t dim, std::span<const FeatureVector> xs,
                                 std::span<const int> ys, double alpha)
    : Model(std::move(labels), dim) {
    std::size_t K = labels_.size();
    std::vector<double> counts(K * dim, 0.0), totals(K, 0.0), docs(K, 0.0);
    for (std::size_t n = 0; n < xs.size(); ++n) {
        int c = ys[n];
        docs[c] += 1;
        for (const auto& [i, w] : xs[n].entries) {
            counts[c * dim + i] += w;
            totals[c] += w;
        }
    }
    log_prior_.resize(K);
    log_prob_.resize(K * dim);
    for (std::size_t c = 0; c < K; ++c) {
        log_prior_[c] = docs[c] > 0 ? std::log(docs[c] / static_cast<double>(xs.size()))
                                    : -std::numeric_limits<double>::infinity();
        double denom = totals[c] + alpha * static_cast<double>(dim);
        for (std::size_t i = 0; i < dim; ++i) log_prob_[c * dim + i] = std::log((counts[c * dim + i] + alpha) / denom);
    }
}

double NaiveBayesModel::feature_prob(int cls, std::uint32_t feature) const {
    return std::exp(log_prob_[static_cast<std::size_t>(cls) * dim_ + feature]);
}

std::vector<double> NaiveBayesModel::joint(const FeatureVector& x) const {
    std::vector<double> s(log_prior_);
    for (std::size_t c = 0; c < s.size(); ++c) {
        if (std::isinf(s[c])) continue;
        for (const auto& [i, w] : x.entries) s[c] += w * log_prob_[c * dim_ + i];
    }
    return s;
}

std::vector<double> NaiveBayesModel::posteriors(const FeatureVector& x) const {
    auto s = joint(x);
    double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (auto& v : s) z += (v = std::exp(v - m));
    for (auto& v : s) v /= z;
    return s;
}

int NaiveBayesModel::classify(const FeatureVector& x) const { return argmax(joint(x)); }

namespace {

class KnnModel : public Model {
public:
    KnnModel(std::vector<std::string> labels, std::size_t dim, std::span<const FeatureVector> xs,
             std::span<const int> ys, int k)
        : Model(std::move(labels), dim), xs_(xs.begin(), xs.end()), ys_(ys.begin(), ys.end()), k_(k) {
        for (const auto& x : xs_) norms_.push_back(std::sqrt(sparse_dot(x, x)));
    }

protected:
    int classify(const FeatureVector& x) const override {
        double nq = std::sqrt(sparse_dot(x, x));
        std::vector<std::pair<double, std::size_t>> sims;
        sims.reserve(xs_.size());
        for (std::size_t n = 0; n < xs_.size(); ++n) {
            double d = nq > 0 && norms_[n] > 0 ? sparse_dot(x, xs_[n]) / (nq * norms_[n]) : 0.0;
            sims.emplace_back(d, n);
        }
        std::size_t k = std::min<std::size_t>(k_, sims.size());
        std::partial_sort(sims.begin(), sims.begin() + k, sims.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        std::vector<double> votes(labels_.size(), 0.0);
        for (std::size_t t = 0; t < k; ++t) votes[ys_[sims[t].second]] += 1;
        return argmax(votes);
    }

private:
    std::vector<FeatureVector> xs_;
    std::vector<int> ys_;
    std::vector<double> norms_;
    int k_;
};

struct Linear {
    std::vector<double> w;
    double b = 0.0;
};

// y in {-1,+1}; weights kept as scale * v so the l2 decay costs O(1) per step
Linear fit_binary(std::span<const FeatureVector> xs, const std::vector<int>& y, std::size_t dim,
                  const ClassifierConfig& cfg, std::uint64_t seed, std::vector<double>* losses) {
    bool hinge = cfg.kind == LearnerKind::LinsvmSgd;
    std::vector<double> v(dim, 0.0);
    double scale = 1.0, b = 0.0;
    Rng rng(seed);
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    double decay = 1.0 - cfg.lr * cfg.l2;

    auto objective = [&] {
        double sum = 0.0;
        for (std::size_t n = 0; n < xs.size(); ++n) {
            double m = y[n] * (scale * dot(v, xs[n]) + b);
            sum += hinge ? std::max(0.0, 1.0 - m) : std::log1p(std::exp(-std::abs(m))) + std::max(0.0, -m);
        }
        double norm = 0.0;
        for (double t : v) norm += t * t;
        return sum / static_cast<double>(xs.size()) + 0.5 * cfg.l2 * norm * scale * scale;
    };

    for (int e = 0; e < cfg.epochs; ++e) {
        rng.shuffle(order);
        for (std::size_t n : order) {
            const auto& x = xs[n];
            double m = y[n] * (scale * dot(v, x) + b);
            scale *= decay;
            double g = hinge ? (m < 1.0 ? -y[n] : 0.0) : -y[n] * sigmoid(-m);
            if (g != 0.0) {
                double step = cfg.lr * g / scale;
                for (const auto& [i, val] : x.entries) v[i] -= step * val;
                b -= cfg.lr * g;
            }
            if (scale < 1e-9) {
                for (double& t : v) t *= scale;
                scale = 1.0;
            }
        }
        if (losses) losses->push_back(objective());
    }
    for (double& t : v) t *= scale;
    return {std::move(v), b};
}

class LinearModel : public Model {
public:
    LinearModel(std::vector<std::string> labels, std::size_t dim, std::span<const FeatureVector> xs,
                std::span<const int> ys, const ClassifierConfig& cfg, std::vector<double>* losses)
        : Model(std::move(labels), dim) {
        std::size_t K = labels_.size();
        // two classes share one hyperplane, positive side is the second label
        std::size_t planes = K == 2 ? 1 : K;
        for (std::size_t c = 0; c < planes; ++c) {
            int pos = K == 2 ? 1 : static_cast<int>(c);
            std::vector<int> y(ys.size());
            for (std::size_t n = 0; n < ys.size(); ++n) y[n] = ys[n] == pos ? 1 : -1;
            planes_.push_back(fit_binary(xs, y, dim, cfg, mix64(cfg.seed + c), c == 0 ? losses : nullptr));
        }
    }

protected:
    int classify(const FeatureVector& x) const override {
        if (planes_.size() == 1) return dot(planes_[0].w, x) + planes_[0].b > 0 ? 1 : 0;
        std::vector<double> s;
        for (const auto& p : planes_) s.push_back(dot(p.w, x) + p.b);
        return argmax(s);
    }

private:
    std::vector<Linear> planes_;
};

void forward_hidden(const MlpParams& p, const FeatureVector& x, std::vector<double>& pre) {
    pre.assign(p.b1.begin(), p.b1.end());
    for (const auto& [i, v] : x.entries) {
        const double* row = &p.w1[static_cast<std::size_t>(i) * p.hidden];
        for (std::size_t j = 0; j < p.hidden; ++j) pre[j] += v * row[j];
    }
}

class MlpModel : public Model {
public:
    MlpModel(std::vector<std::string> labels, std::size_t dim, std::span<const FeatureVector> xs,
             std::span<const int> ys, const ClassifierConfig& cfg)
        : Model(std::move(labels), dim) {
        p_.init(dim, static_cast<std::size_t>(cfg.hidden), labels_.size(), cfg.seed);
        MlpParams g, m, v;
        for (auto* q : {&g, &m, &v}) {
            *q = p_;
            for (auto* a : {&q->w1, &q->b1, &q->w2, &q->b2}) std::fill(a->begin(), a->end(), 0.0);
        }
        Rng rng(mix64(cfg.seed ^ 0x6d6c70ull));
        std::vector<std::size_t> order(xs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::vector<FeatureVector> bx;
        std::vector<int> by;
        std::vector<double> keep;
        double keep_scale = 1.0 / (1.0 - cfg.dropout);
        long t = 0;
        for (int e = 0; e < cfg.mlp_epochs; ++e) {
            rng.shuffle(order);
            for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
                std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
                bx.clear();
                by.clear();
                for (std::size_t q = start; q < end; ++q) {
                    bx.push_back(xs[order[q]]);
                    by.push_back(ys[order[q]]);
                }
                keep.resize(bx.size() * p_.hidden);
                for (double& k : keep) k = rng.uniform() < cfg.dropout ? 0.0 : keep_scale;
                mlp_loss(p_, bx, by, &g, cfg.dropout > 0 ? &keep : nullptr);
                ++t;
                double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
                double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
                auto adam = [&](std::vector<double>& w, const std::vector<double>& gw, std::vector<double>& mw,
                                std::vector<double>& vw) {
                    for (std::size_t f = 0; f < w.size(); ++f) {
                        mw[f] = cfg.beta1 * mw[f] + (1 - cfg.beta1) * gw[f];
                        vw[f] = cfg.beta2 * vw[f] + (1 - cfg.beta2) * gw[f] * gw[f];
                        w[f] -= cfg.adam_lr * (mw[f] / c1) / (std::sqrt(vw[f] / c2) + cfg.eps);
                    }
                };
                adam(p_.w1, g.w1, m.w1, v.w1);
                adam(p_.b1, g.b1, m.b1, v.b1);
                adam(p_.w2, g.w2, m.w2, v.w2);
                adam(p_.b2, g.b2, m.b2, v.b2);
            }
        }
    }

protected:
    int classify(const FeatureVector& x) const override {
        std::vector<double> pre;
        forward_hidden(p_, x, pre);
        std::vector<double> logits(p_.b2);
        for (std::size_t j = 0; j < p_.hidden; ++j) {
            double h = std::max(0.0, pre[j]);
            if (h == 0.0) continue;
            for (std::size_t c = 0; c < p_.out; ++c) logits[c] += h * p_.w2[j * p_.out + c];
        }
        return argmax(logits);
    }

private:
    MlpParams p_;
};

}  // namespace

void MlpParams::init(std::size_t in_, std::size_t hidden_, std::size_t out_, std::uint64_t seed) {
    in = in_;
    hidden = hidden_;
    out = out_;
    Rng rng(mix64(seed));
    auto glorot = [&](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
        double lim = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        w.resize(fan_in * fan_out);
        for (double& x : w) x = (2.0 * rng.uniform() - 1.0) * lim;
    };
    glorot(w1, in, hidden);
    glorot(w2, hidden, out);
    b1.assign(hidden, 0.0);
    b2.assign(out, 0.0);
}

double& MlpParams::at(std::size_t f) {
    if (f < w1.size()) return w1[f];
    f -= w1.size();
    if (f < b1.size()) return b1[f];
    f -= b1.size();
    if (f < w2.size()) return w2[f];
    return b2[f - w2.size()];
}

double mlp_loss(const MlpParams& p, std::span<const FeatureVector> xs, std::span<const int> ys, MlpParams* grad,
                const std::vector<double>* keep) {
    if (grad) {
        grad->in = p.in;
        grad->hidden = p.hidden;
        grad->out = p.out;
        grad->w1.assign(p.w1.size(), 0.0);
        grad->b1.assign(p.b1.size(), 0.0);
        grad->w2.assign(p.w2.size(), 0.0);
        grad->b2.assign(p.b2.size(), 0.0);
    }
    double B = static_cast<double>(xs.size());
    double loss = 0.0;
    std::vector<double> pre, h(p.hidden), logits(p.out), dh(p.hidden);
    for (std::size_t n = 0; n < xs.size(); ++n) {
        forward_hidden(p, xs[n], pre);
        for (std::size_t j = 0; j < p.hidden; ++j) {
            double k = keep ? (*keep)[n * p.hidden + j] : 1.0;
            h[j] = pre[j] > 0 ? pre[j] * k : 0.0;
        }
        for (std::size_t c = 0; c < p.out; ++c) {
            logits[c] = p.b2[c];
            for (std::size_t j = 0; j < p.hidden; ++j) logits[c] += h[j] * p.w2[j * p.out + c];
        }
        double m = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (double l : logits) z += std::exp(l - m);
        double lse = m + std::log(z);
        loss += lse - logits[ys[n]];
        if (!grad) continue;
        for (std::size_t c = 0; c < p.out; ++c) {
            double d = (std::exp(logits[c] - lse) - (static_cast<int>(c) == ys[n] ? 1.0 : 0.0)) / B;
            grad->b2[c] += d;
            for (std::size_t j = 0; j < p.hidden; ++j) grad->w2[j * p.out + c] += h[j] * d;
            logits[c] = d;
        }
        for (std::size_t j = 0; j < p.hidden; ++j) {
            if (pre[j] <= 0) {
                dh[j] = 0.0;
                continue;
            }
            double s = 0.0;
            for (std::size_t c = 0; c < p.out; ++c) s += p.w2[j * p.out + c] * logits[c];
            dh[j] = s * (keep ? (*keep)[n * p.hidden + j] : 1.0);
            grad->b1[j] += dh[j];
        }
        for (const auto& [i, v] : xs[n].entries) {
            double* row = &grad->w1[static_cast<std::size_t>(i) * p.hidden];
            for (std::size_t j = 0; j < p.hidden; ++j) row[j] += v * dh[j];
        }
    }
    return loss / B;
}

namespace {

std::vector<int> encode(std::span<const FeatureVector> xs, const std::vector<std::string>& labels, std::size_t dim) {
    std::unordered_map<std::string, int> pos;
    for (std::size_t i = 0; i < labels.size(); ++i) pos[labels[i]] = static_cast<int>(i);
    std::vector<int> ys;
    std::set<int> present;
    for (const auto& x : xs) {
        auto it = pos.find(x.label);
        if (it == pos.end()) throw Error("training label '" + x.label + "' not in label set");
        ys.push_back(it->second);
        present.insert(it->second);
        for (const auto& [i, w] : x.entries) {
            if (!std::isfinite(w)) throw Error("non-finite weight in training vector " + x.doc_id);
            if (i >= dim) throw Error("training vector " + x.doc_id + " exceeds model width");
        }
    }
    if (present.size() < 2) throw Error("training data has fewer than two classes");
    return ys;
}

}  // namespace

std::unique_ptr<Model> train(const ClassifierConfig& cfg, std::span<const FeatureVector> xs,
                             const std::vector<std::string>& labels, std::size_t dim) {
    cfg.check();
    auto ys = encode(xs, labels, dim);
    switch (cfg.kind) {
        case LearnerKind::NaiveBayes:
            return std::make_unique<NaiveBayesModel>(labels, dim, xs, ys, cfg.alpha);
        case LearnerKind::Knn:
            return std::make_unique<KnnModel>(labels, dim, xs, ys, cfg.k);
        case LearnerKind::LogregSgd:
        case LearnerKind::LinsvmSgd:
            return std::make_unique<LinearModel>(labels, dim, xs, ys, cfg, nullptr);
        case LearnerKind::Mlp:
            return std::make_unique<MlpModel>(labels, dim, xs, ys, cfg);
    }
    throw Error("unknown learner kind");
}

std::vector<double> sgd_epoch_losses(const ClassifierConfig& cfg, std::span<const FeatureVector> xs,
                                     const std::vector<std::string>& labels, std::size_t dim) {
    if (cfg.kind != LearnerKind::LogregSgd && cfg.kind != LearnerKind::LinsvmSgd)
        throw Error("sgd_epoch_losses needs an sgd learner");
    cfg.check();
    auto ys = encode(xs, labels, dim);
    std::vector<double> losses;
    LinearModel m(labels, dim, xs, ys, cfg, &losses);
    return losses;
}

ConfusionCounts confusion(std::span<const std::string> gold, std::span<const std::string> pred,
                          const std::vector<std::string>& label_set) {
    if (gold.size() != pred.size()) throw Error("macro_f1: gold and prediction lengths differ");
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < label_set.size(); ++i) pos[label_set[i]] = i;
    ConfusionCounts cc;
    cc.tp.assign(label_set.size(), 0);
    cc.fp.assign(label_set.size(), 0);
    cc.fn.assign(label_set.size(), 0);
    auto find = [&](const std::string& l) {
        auto it = pos.find(l);
        if (it == pos.end()) throw Error("label '" + l + "' not in label set");
        return it->second;
    };
    for (std::size_t n = 0; n < gold.size(); ++n) {
        std::size_t g = find(gold[n]), p = find(pred[n]);
        if (g == p) {
            ++cc.tp[g];
        } else {
            ++cc.fp[p];
            ++cc.fn[g];
        }
    }
    return cc;
}

double macro_f1(std::span<const std::string> gold, std::span<const std::string> pred,
                const std::vector<std::string>& label_set) {
    auto cc = confusion(gold, pred, label_set);
    if (label_set.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t c = 0; c < label_set.size(); ++c) {
        double tp = static_cast<double>(cc.tp[c]);
        double pd = tp + static_cast<double>(cc.fp[c]), rd = tp + static_cast<double>(cc.fn[c]);
        double p = pd > 0 ? tp / pd : 0.0, r = rd > 0 ? tp / rd : 0.0;
        sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    return sum / static_cast<double>(label_set.size());
}

double mean(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::string> labels,
                                                       const std::vector<std::string>& label_set, int n,
                                                       std::uint64_t seed) {
    if (n < 2) throw ValidationError("k-fold needs at least two folds");
    std::map<std::string, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].push_back(i);
    for (const auto& [l, idx] : by)
        if (std::find(label_set.begin(), label_set.end(), l) == label_set.end())
            throw Error("label '" + l + "' not in label set");
    Rng rng(mix64(seed));
    std::vector<std::vector<std::size_t>> folds(n);
    std::size_t counter = 0;
    for (const auto& l : label_set) {
        auto idx = by[l];
        if (static_cast<int>(idx.size()) < n)
            throw StratificationError("class '" + l + "' has " + std::to_string(idx.size()) +
                                      " documents, fewer than " + std::to_string(n) + " folds");
        rng.shuffle(idx);
        for (std::size_t i : idx) folds[counter++ % n].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

void EvalResult::finish() {
    mean_f1 = mean(per_fold_f1);
    dispersion = sample_stddev(per_fold_f1);
    wall_seconds = 0.0;
    for (double s : per_fold_seconds) wall_seconds += s;
}

std::uint64_t cell_seed(std::uint64_t seed, std::string_view spec, std::string_view classifier, int fold) {
    std::uint64_t h = fnv1a(spec, mix64(seed));
    h = fnv1a("/", h);
    h = fnv1a(classifier, h);
    return mix64(h ^ static_cast<std::uint64_t>(fold));
}

EvalResult evaluate_features(const Dataset& ds, std::span<const FeatureSequence> feats, const PreprocSpec& spec,
                             const ClassifierConfig& cfg, const Protocol& protocol, std::uint64_t seed,
                             const EvalOptions& opt) {
    std::vector<std::string> labels;
    for (const auto& d : ds.documents) labels.push_back(d.label);
    std::size_t N = labels.size();

    std::vector<std::vector<std::size_t>> tests;
    if (protocol.kind == Protocol::Holdout) {
        if (!ds.split) throw ValidationError("holdout protocol needs a train/test split");
        std::unordered_map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < N; ++i) pos[ds.documents[i].id] = i;
        std::vector<std::size_t> t;
        for (const auto& id : ds.split->test) t.push_back(pos.at(id));
        std::sort(t.begin(), t.end());
        tests.push_back(std::move(t));
    } else {
        tests = stratified_folds(labels, ds.label_set, protocol.folds, seed);
    }

    EvalResult r;
    r.spec_name = spec.name();
    r.classifier = cfg.label();
    for (std::size_t f = 0; f < tests.size(); ++f) {
        std::vector<char> is_test(N, 0);
        for (std::size_t i : tests[f]) is_test[i] = 1;
        std::vector<FeatureSequence> tr;
        std::vector<std::size_t> tr_idx;
        for (std::size_t i = 0; i < N; ++i)
            if (!is_test[i]) {
                tr.push_back(feats[i]);
                tr_idx.push_back(i);
            }
        Vocabulary vocab = fit_vocabulary(tr);
        std::vector<FeatureVector> xtr, xte;
        for (std::size_t q = 0; q < tr.size(); ++q) xtr.push_back(tfidf(tr[q], vocab, labels[tr_idx[q]]));
        std::vector<std::string> gold;
        for (std::size_t i : tests[f]) {
            xte.push_back(tfidf(feats[i], vocab, labels[i]));
            gold.push_back(labels[i]);
        }
        std::uint64_t s = cell_seed(seed, r.spec_name, r.classifier, static_cast<int>(f));

        auto t0 = std::chrono::steady_clock::now();
        if (opt.smote) {
            std::map<std::string, std::size_t> counts;
            for (const auto& x : xtr) ++counts[x.label];
            if (counts.size() == 2) {
                auto lo = std::min(counts.begin()->second, std::next(counts.begin())->second);
                auto hi = std::max(counts.begin()->second, std::next(counts.begin())->second);
                if (lo != hi && lo >= 2) xtr = smote(std::move(xtr), opt.smote_k, mix64(s ^ 0x736d6f7465ull));
            }
        }
        ClassifierConfig c = cfg;
        c.seed = s;
        auto model = train(c, xtr, ds.label_set, vocab.size());
        auto pred = model->predict(xte);
        auto t1 = std::chrono::steady_clock::now();

        r.per_fold_f1.push_back(macro_f1(gold, pred, ds.label_set));
        r.per_fold_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    r.finish();
    return r;
}

EvalResult evaluate(const Dataset& ds, const PreprocSpec& spec, const ClassifierConfig& cfg, const Protocol& protocol,
                    const Resources& res, std::uint64_t seed, const EvalOptions& opt) {
    auto feats = extract_all(ds, spec, res);
    return evaluate_features(ds, feats, spec, cfg, protocol, seed, opt);
}

namespace {

struct StoredFold {
    double f1;
    double seconds;
};

using Store = std::map<std::pair<std::string, std::string>, std::map<int, StoredFold>>;

Store load_store(const std::string& path, const std::string& header) {
    Store st;
    std::ifstream f(path, std::ios::binary);
    if (!f) return st;
    std::string first;
    std::getline(f, first);
    if (!header.empty() && first != header)
        throw ValidationError(path + " was written under a different manifest; move it away to start over");
    f.clear();
    f.seekg(0);
    auto t = read_csv(f);
    int cs = t.require("spec"), cc = t.require("classifier"), cf = t.require("fold"), c1 = t.require("f1"),
        ct = t.require("seconds");
    for (const auto& row : t.rows)
        st[{row[cs], row[cc]}][static_cast<int>(parse_int(row[cf]))] = {parse_double(row[c1]),
                                                                       parse_double(row[ct])};
    return st;
}

void write_result_rows(std::ostream& out, const EvalResult& r) {
    for (std::size_t f = 0; f < r.per_fold_f1.size(); ++f)
        out << csv_field(r.spec_name) << ',' << csv_field(r.classifier) << ',' << f << ','
            << format_sig(r.per_fold_f1[f], 17) << ',' << format_fixed(r.per_fold_seconds[f], 6) << '\n';
}

}  // namespace

void write_results_csv(std::ostream& out, std::span<const EvalResult> rs) {
    out << "spec,classifier,fold,f1,seconds\n";
    for (const auto& r : rs) write_result_rows(out, r);
}

void write_summary_csv(std::ostream& out, std::span<const EvalResult> rs) {
    out << "spec,classifier,mean_f1,dispersion,seconds\n";
    for (const auto& r : rs)
        out << csv_field(r.spec_name) << ',' << csv_field(r.classifier) << ',' << format_fixed(r.mean_f1, 6) << ','
            << format_fixed(r.dispersion, 6) << ',' << format_fixed(r.wall_seconds, 6) << '\n';
}

std::vector<EvalResult> run_matrix(const Dataset& ds, std::span<const PreprocSpec> specs,
                                   std::span<const ClassifierConfig> configs, const Protocol& protocol,
                                   const Resources& res, std::uint64_t seed, const MatrixOptions& opt) {
    std::set<std::string> names;
    for (const auto& c : configs)
        if (!names.insert(c.label()).second) throw ValidationError("duplicate classifier name " + c.label());

    int folds = protocol.fold_count();
    Store stored = opt.store_path.empty() ? Store{} : load_store(opt.store_path, opt.header);

    std::size_t C = configs.size();
    std::vector<EvalResult> results(specs.size() * C);
    std::vector<std::size_t> pending;
    for (std::size_t s = 0; s < specs.size(); ++s)
        for (std::size_t c = 0; c < C; ++c) {
            auto& r = results[s * C + c];
            r.spec_name = specs[s].name();
            r.classifier = configs[c].label();
            auto it = stored.find({r.spec_name, r.classifier});
            bool done = it != stored.end() && static_cast<int>(it->second.size()) == folds;
            if (done)
                for (int f = 0; f < folds; ++f) done = done && it->second.count(f);
            if (!done) {
                pending.push_back(s * C + c);
                continue;
            }
            for (const auto& [f, v] : it->second) {
                r.per_fold_f1.push_back(v.f1);
                r.per_fold_seconds.push_back(v.seconds);
            }
            r.finish();
        }

    std::ofstream journal;
    if (!opt.store_path.empty() && !pending.empty()) {
        bool fresh = !std::filesystem::exists(opt.store_path);
        journal.open(opt.store_path, std::ios::binary | std::ios::app);
        if (!journal) throw Error("cannot write " + opt.store_path);
        if (fresh) {
            if (!opt.header.empty()) journal << opt.header << '\n';
            journal << "spec,classifier,fold,f1,seconds\n";
            journal.flush();
        }
    }

    // features per spec are shared by every classifier in that row
    std::vector<std::vector<FeatureSequence>> feats(specs.size());
    std::vector<std::once_flag> once(specs.size());
    std::mutex out_mu;
    parallel_for(pending.size(), opt.jobs, [&](std::size_t q) {
        std::size_t cell = pending[q];
        std::size_t s = cell / C, c = cell % C;
        std::call_once(once[s], [&] { feats[s] = extract_all(ds, specs[s], res); });
        EvalResult r = evaluate_features(ds, feats[s], specs[s], configs[c], protocol, seed, opt.eval);
        std::lock_guard lk(out_mu);
        if (journal.is_open()) {
            write_result_rows(journal, r);
            journal.flush();
        }
        results[cell] = std::move(r);
        if (opt.on_cell) opt.on_cell(results[cell]);
    });

    if (!opt.store_path.empty()) {
        journal.close();
        std::string tmp = opt.store_path + ".tmp";
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!opt.header.empty()) f << opt.header << '\n';
            write_results_csv(f, results);
            if (!f) throw Error("cannot write " + tmp);
        }
        std::filesystem::rename(tmp, opt.store_path);
    }
    return results;
}

}  // namespace fdk
