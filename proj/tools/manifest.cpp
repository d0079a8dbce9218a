#include "manifest.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <fstream>
#include <set>

namespace fdk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const fs::path& dir, const std::string& p) {
    if (p.empty()) return p;
    fs::path q(p);
    return (q.is_absolute() ? q : dir / q).lexically_normal().string();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("manifest field '") + key + "' has the wrong type");
    }
}

}  // namespace

ClassifierConfig parse_classifier(const json& j) {
    ClassifierConfig c;
    std::string kind;
    if (j.is_string())
        kind = j.get<std::string>();
    else if (j.is_object())
        kind = get_or<std::string>(j, "kind", "");
    else
        throw ValidationError("classifier entries are names or objects");
    auto k = kind_from_name(kind);
    if (!k) throw ValidationError("unknown classifier kind '" + kind + "'");
    c.kind = *k;
    if (j.is_object()) {
        static const std::set<std::string> known = {"kind", "name", "alpha", "k", "lr", "l2", "epochs", "hidden",
                                                    "dropout", "adam_lr", "beta1", "beta2", "eps", "mlp_epochs",
                                                    "batch"};
        for (const auto& [key, v] : j.items())
            if (!known.count(key)) throw ValidationError("unknown classifier field '" + key + "'");
        c.name = get_or<std::string>(j, "name", "");
        c.alpha = get_or(j, "alpha", c.alpha);
        c.k = get_or(j, "k", c.k);
        c.lr = get_or(j, "lr", c.lr);
        c.l2 = get_or(j, "l2", c.l2);
        c.epochs = get_or(j, "epochs", c.epochs);
        c.hidden = get_or(j, "hidden", c.hidden);
        c.dropout = get_or(j, "dropout", c.dropout);
        c.adam_lr = get_or(j, "adam_lr", c.adam_lr);
        c.beta1 = get_or(j, "beta1", c.beta1);
        c.beta2 = get_or(j, "beta2", c.beta2);
        c.eps = get_or(j, "eps", c.eps);
        c.mlp_epochs = get_or(j, "mlp_epochs", c.mlp_epochs);
        c.batch = get_or(j, "batch", c.batch);
    }
    c.check();
    return c;
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open manifest " + path);
    RunManifest m;
    try {
        m.raw = json::parse(f);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    const json& j = m.raw;
    if (!j.is_object()) throw ValidationError("manifest must be a JSON object");
    static const std::set<std::string> known = {"corpus", "labels", "language", "stopwords", "specs",
                                                "classifiers", "protocol", "seed", "smote", "device",
                                                "energy", "planner", "out"};
    for (const auto& [key, v] : j.items())
        if (!known.count(key)) throw ValidationError("unknown manifest field '" + key + "'");

    m.dir = fs::absolute(fs::path(path)).parent_path();
    if (!j.contains("corpus")) throw ValidationError("manifest needs 'corpus'");
    if (j["corpus"].is_string())
        m.corpus.push_back(resolve(m.dir, j["corpus"].get<std::string>()));
    else if (j["corpus"].is_array())
        for (const auto& c : j["corpus"]) {
            if (!c.is_string()) throw ValidationError("corpus entries must be paths");
            m.corpus.push_back(resolve(m.dir, c.get<std::string>()));
        }
    else
        throw ValidationError("'corpus' must be a path or a list of paths");
    if (m.corpus.empty()) throw ValidationError("'corpus' is empty");

    m.labels = resolve(m.dir, get_or<std::string>(j, "labels", ""));
    m.language = get_or<std::string>(j, "language", m.language);
    m.stopwords = resolve(m.dir, get_or<std::string>(j, "stopwords", ""));

    if (!j.contains("specs") || (j["specs"].is_string() && j["specs"] == "all")) {
        m.specs = enumerate_specs();
    } else if (j["specs"].is_string() && j["specs"] == "plan") {
        m.spec_mode = "plan";
        m.specs = enumerate_specs();
    } else if (j["specs"].is_array()) {
        m.spec_mode = "list";
        std::set<PreprocSpec> seen;
        for (const auto& s : j["specs"]) {
            if (!s.is_string()) throw ValidationError("spec entries must be names");
            auto spec = spec_from_name(s.get<std::string>());
            if (seen.insert(spec).second) m.specs.push_back(spec);
        }
    } else {
        throw ValidationError("'specs' must be \"all\", \"plan\" or a list of names");
    }

    if (j.contains("classifiers")) {
        if (!j["classifiers"].is_array()) throw ValidationError("'classifiers' must be a list");
        for (const auto& c : j["classifiers"]) m.classifiers.push_back(parse_classifier(c));
    } else {
        m.classifiers = default_configs();
    }

    if (j.contains("protocol")) {
        const json& p = j["protocol"];
        if (p.is_string() && p == "holdout")
            m.protocol = Protocol::holdout();
        else if (p.is_object() && p.contains("kfold") && p["kfold"].is_number_integer())
            m.protocol = Protocol::kfold(p["kfold"].get<int>());
        else
            throw ValidationError("'protocol' must be \"holdout\" or {\"kfold\": n}");
        if (m.protocol.kind == Protocol::KFold && m.protocol.folds < 2)
            throw ValidationError("kfold needs at least 2 folds");
    }
    m.seed = get_or<std::uint64_t>(j, "seed", m.seed);

    if (j.contains("smote")) {
        const json& s = j["smote"];
        if (s.is_boolean())
            m.eval.smote = s.get<bool>();
        else if (s.is_object()) {
            m.eval.smote = get_or(s, "enabled", true);
            m.eval.smote_k = get_or(s, "k", 5);
        } else
            throw ValidationError("'smote' must be a boolean or an object");
        if (m.eval.smote_k < 1) throw ValidationError("smote k must be at least 1");
    }
    if (j.contains("device")) {
        const json& d = j["device"];
        if (d.is_string()) {
            std::string n = d.get<std::string>();
            if (n == "cpu")
                m.device = kDesktopCpu;
            else if (n == "gpu")
                m.device = kDesktopGpu;
            else
                throw ValidationError("device must be \"cpu\", \"gpu\" or {name, watts}");
        } else {
            m.device.name = get_or<std::string>(d, "name", "custom");
            m.device.watts = get_or(d, "watts", 0.0);
        }
        if (m.device.watts <= 0) throw ValidationError("device watts must be positive");
    }
    if (j.contains("energy")) {
        const json& e = j["energy"];
        m.constants.intensity_g_per_kwh = get_or(e, "intensity_g_per_kwh", m.constants.intensity_g_per_kwh);
        m.constants.car_g_per_km = get_or(e, "car_g_per_km", m.constants.car_g_per_km);
        m.multiplier = get_or(e, "multiplier", m.multiplier);
        if (m.multiplier < 1) throw ValidationError("energy multiplier must be at least 1");
    }
    if (j.contains("planner")) {
        const json& p = j["planner"];
        m.planner.classifier = get_or(p, "classifier", m.planner.classifier);
        m.planner.neural = get_or(p, "neural", m.planner.neural);
        m.planner.budget = get_or(p, "budget", m.planner.budget);
    }
    m.out = resolve(m.dir, get_or<std::string>(j, "out", m.out));
    return m;
}

void apply_seed(RunManifest& m, std::uint64_t seed) {
    m.seed = seed;
    m.raw["seed"] = seed;
}

std::string RunManifest::hash() const { return hex64(fnv1a(raw.dump())); }

std::string RunManifest::header(const std::string& version) const {
    return "# fdtool " + version + " manifest " + hash();
}

}  // namespace fdk::cli
