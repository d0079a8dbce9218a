#include "manifest.hpp"

#include "fdkit/analysis.hpp"
#include "fdkit/corpus.hpp"
#include "fdkit/density.hpp"
#include "fdkit/energy.hpp"
#include "fdkit/error.hpp"
#include "fdkit/featgen.hpp"
#include "fdkit/learners.hpp"
#include "fdkit/planner.hpp"
#include "fdkit/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fdk;
using fdk::cli::RunManifest;

namespace {

const std::string kVersion = FDKIT_VERSION;

struct Common {
    std::string manifest;
    unsigned jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string out;
};

std::string read_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// tmp then rename so a crash never leaves a half-written artifact
void write_file(const fs::path& path, const std::string& body) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + tmp.string());
        f << body;
        if (!f) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
    std::cout << "wrote " << path.string() << '\n';
}

RunManifest load(const Common& c) {
    if (c.manifest.empty()) throw ValidationError("--manifest is required");
    RunManifest m = cli::load_manifest(c.manifest);
    if (c.seed) cli::apply_seed(m, *c.seed);
    return m;
}

fs::path out_dir(const Common& c, const RunManifest* m) {
    if (!c.out.empty()) return c.out;
    return m ? fs::path(m->out) : fs::path(".");
}

bool wants_stop(std::span<const PreprocSpec> specs) {
    for (const auto& s : specs)
        if (s.stop) return true;
    return false;
}

Resources resources(const RunManifest& m, std::span<const PreprocSpec> specs) {
    Resources r;
    r.alpha = alpha_policy_for(m.language);
    if (!m.stopwords.empty()) {
        if (!fs::exists(m.stopwords)) throw ValidationError("stopword file not found: " + m.stopwords);
        r.stopwords = load_stopwords_file(m.stopwords);
    } else if (wants_stop(specs)) {
        throw ValidationError("STOP specs selected but the manifest names no stopword file");
    }
    return r;
}

Dataset load_dataset(const RunManifest& m, bool report) {
    LabelMap labels;
    if (!m.labels.empty()) {
        std::ifstream f(m.labels, std::ios::binary);
        if (!f) throw ValidationError("cannot open labels " + m.labels);
        labels = load_labels_jsonl(f);
    }
    Dataset all;
    std::set<std::string> label_set;
    std::vector<std::string> warnings;
    for (const auto& path : m.corpus) {
        std::ifstream f(path, std::ios::binary);
        if (!f) throw ValidationError("cannot open corpus " + path);
        Dataset d = parse_conllu(f, labels, m.language, &warnings);
        for (auto& doc : d.documents) all.documents.push_back(std::move(doc));
        label_set.insert(d.label_set.begin(), d.label_set.end());
        if (d.split) {
            if (!all.split) all.split = Split{};
            all.split->train.insert(all.split->train.end(), d.split->train.begin(), d.split->train.end());
            all.split->test.insert(all.split->test.end(), d.split->test.begin(), d.split->test.end());
        }
    }
    all.label_set.assign(label_set.begin(), label_set.end());
    if (report)
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    auto vs = validate(all);
    if (!vs.empty()) {
        for (const auto& v : vs) {
            std::cerr << "invalid: " << v.doc_id;
            if (v.sentence >= 0) std::cerr << " sentence " << v.sentence + 1;
            std::cerr << ": " << v.rule;
            if (!v.detail.empty()) std::cerr << " (" << v.detail << ')';
            std::cerr << '\n';
        }
        throw ValidationError(std::to_string(vs.size()) + " annotation violation(s)");
    }
    return all;
}

std::vector<FeatureDensityRecord> compute_density(const RunManifest& m, const Dataset& ds, const Resources& res,
                                                  unsigned jobs) {
    return density_table(ds, m.specs, res, jobs);
}

std::string density_csv(const std::string& header, std::span<const FeatureDensityRecord> rows) {
    std::ostringstream ss;
    ss << header << '\n';
    write_density_csv(ss, rows);
    return ss.str();
}

// ---- ingest

int cmd_ingest(const Common& c) {
    RunManifest m = load(c);
    Dataset ds = load_dataset(m, true);
    std::map<std::string, int> per_label;
    std::size_t sentences = 0;
    for (const auto& d : ds.documents) {
        ++per_label[d.label];
        sentences += d.sentences.size();
    }
    std::cout << "documents " << ds.documents.size() << '\n'
              << "sentences " << sentences << '\n'
              << "tokens " << ds.token_count() << '\n';
    for (const auto& [l, n] : per_label) std::cout << "label " << l << ' ' << n << '\n';
    if (ds.split) std::cout << "split train " << ds.split->train.size() << " test " << ds.split->test.size() << '\n';
    std::cout << "lexical density " << format_fixed(lexical_density(ds), 4) << '\n';
    return 0;
}

// ---- density

int cmd_density(const Common& c) {
    RunManifest m = load(c);
    Resources res = resources(m, m.specs);
    Dataset ds = load_dataset(m, false);
    auto rows = compute_density(m, ds, res, c.jobs);
    write_file(out_dir(c, &m) / "density.csv", density_csv(m.header(kVersion), rows));
    return 0;
}

// ---- run

std::vector<ClassifierConfig> seeded(const RunManifest& m) {
    auto cs = m.classifiers;
    for (auto& x : cs) x.seed = m.seed;
    return cs;
}

int cmd_run(const Common& c) {
    RunManifest m = load(c);
    if (m.spec_mode == "plan") throw ValidationError("spec selection \"plan\" is run by the plan command");
    Resources res = resources(m, m.specs);
    Dataset ds = load_dataset(m, false);
    fs::path dir = out_dir(c, &m);
    fs::create_directories(dir);

    auto configs = seeded(m);
    MatrixOptions opt;
    opt.eval = m.eval;
    opt.jobs = c.jobs;
    opt.store_path = (dir / "results.csv").string();
    opt.header = m.header(kVersion);
    std::size_t total = m.specs.size() * configs.size(), done = 0;
    opt.on_cell = [&](const EvalResult& r) {
        ++done;
        std::cerr << '[' << done << '/' << total << "] " << r.spec_name << ' ' << r.classifier << " f1 "
                  << format_fixed(r.mean_f1, 4) << '\n';
    };
    auto results = run_matrix(ds, m.specs, configs, m.protocol, res, m.seed, opt);
    std::cout << "wrote " << opt.store_path << '\n';

    std::ostringstream ss;
    ss << m.header(kVersion) << '\n';
    write_summary_csv(ss, results);
    write_file(dir / "summary.csv", ss.str());
    return 0;
}

// ---- analyze

struct AnalyzeInputs {
    std::vector<FeatureDensityRecord> fd;
    std::vector<ScoreRow> scores;
    std::string header;
};

void emit_analysis(const AnalyzeInputs& in, const fs::path& dir) {
    auto corr = correlate_fd_f1(in.fd, in.scores);
    std::ostringstream cs;
    cs << in.header << '\n';
    write_correlation_csv(cs, corr);
    write_file(dir / "correlation.csv", cs.str());

    auto stab = stability(in.scores);
    std::ostringstream ss;
    ss << in.header << '\n';
    write_stability_csv(ss, stab);
    write_file(dir / "stability.csv", ss.str());

    std::map<std::string, double> fd;
    for (const auto& r : in.fd) fd[r.spec_name] = r.fd;
    std::map<std::string, std::vector<ScatterPoint>> by_clf;
    for (const auto& s : in.scores) {
        auto it = fd.find(s.spec);
        if (it == fd.end() || is_pos_only(s.spec)) continue;
        by_clf[s.classifier].push_back({s.spec, it->second, s.f1});
    }
    for (auto& [clf, pts] : by_clf) {
        std::ostringstream sv;
        std::string tag = in.header.substr(2);
        sv << "<!-- " << tag << " -->\n";
        write_scatter_svg(sv, clf + ": FD vs macro F1", std::move(pts));
        write_file(dir / ("scatter_" + clf + ".svg"), sv.str());
    }

    std::cout << "classifier        pairs    rho\n";
    for (const auto& r : corr) {
        std::string name = r.classifier;
        name.resize(std::max<std::size_t>(name.size(), 16), ' ');
        std::cout << name << "  " << r.pairs_used << "  " << (std::isnan(r.rho) ? "NA" : format_fixed(r.rho, 4)) << '\n';
    }
}

int cmd_analyze(const Common& c, const std::vector<std::string>& replay) {
    AnalyzeInputs in;
    fs::path dir;
    if (!replay.empty()) {
        if (replay.size() != 2) throw ValidationError("--replay takes <fd.csv> <f1.csv>");
        in.fd = read_density_csv_file(replay[0]);
        in.scores = read_scores_csv_file(replay[1]);
        json j = {{"replay", {{"fd", hex64(fnv1a(read_bytes(replay[0])))}, {"f1", hex64(fnv1a(read_bytes(replay[1])))}}}};
        in.header = "# fdtool " + kVersion + " manifest " + hex64(fnv1a(j.dump()));
        dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    } else {
        RunManifest m = load(c);
        dir = out_dir(c, &m);
        fs::path fdp = dir / "density.csv", sp = dir / "summary.csv";
        if (!fs::exists(fdp) || !fs::exists(sp))
            throw ValidationError("analyze needs density.csv and summary.csv in " + dir.string() +
                                  "; run the density and run commands first");
        in.fd = read_density_csv_file(fdp.string());
        in.scores = read_scores_csv_file(sp.string());
        in.header = m.header(kVersion);
    }
    emit_analysis(in, dir);
    return 0;
}

// ---- plan

struct OracleTable {
    std::map<std::string, double> fd, f1;
};

OracleTable read_oracle(const std::string& path, const std::string& classifier) {
    CsvTable t = read_csv_file(path);
    int spec = t.require("spec"), f1 = t.column("f1"), fd = t.column("fd"), clf = t.column("classifier");
    if (f1 < 0) f1 = t.require("mean_f1");
    OracleTable o;
    for (const auto& row : t.rows) {
        if (clf >= 0 && row[clf] != classifier) continue;
        std::string name = spec_from_name(row[spec]).name();
        if (o.f1.count(name)) throw ValidationError("oracle lists " + name + " twice");
        o.f1[name] = parse_double(row[f1]);
        if (fd >= 0) o.fd[name] = parse_double(row[fd]);
    }
    if (o.f1.empty()) throw ValidationError("oracle " + path + " has no rows for classifier " + classifier);
    return o;
}

json trace_json(const PruningPlan& plan, const Trace& tr) {
    json j;
    json st0 = json::array();
    for (const auto& e : plan.stage0) st0.push_back({{"spec", e.spec}, {"reason", e.reason}});
    j["classifier"] = plan.classifier;
    j["neural"] = plan.neural;
    j["budget"] = plan.budget;
    j["stage0_excluded"] = st0;
    j["stage1"] = plan.stage1;
    j["stage2_pool"] = plan.stage2_pool;
    j["pivot"] = tr.pivot;
    j["stage2_order"] = tr.stage2_order;
    json runs = json::array();
    for (const auto& r : tr.runs)
        runs.push_back({{"spec", r.spec}, {"stage", r.stage}, {"fd", r.fd}, {"f1", r.f1}, {"seconds", r.seconds}});
    j["runs"] = runs;
    if (tr.best) j["best"] = {{"spec", tr.best->spec}, {"f1", tr.best->f1}, {"stage", tr.best->stage}};
    j["aborted"] = tr.aborted;
    if (tr.aborted) j["error"] = tr.error;
    return j;
}

void print_trace(const Trace& tr) {
    for (const auto& r : tr.runs)
        std::cout << "stage " << r.stage << "  " << r.spec << "  fd " << format_fixed(r.fd, 4) << "  f1 "
                  << format_fixed(r.f1, 3) << '\n';
    if (!tr.pivot.empty()) std::cout << "pivot " << tr.pivot << '\n';
    if (tr.best) std::cout << "best " << tr.best->spec << " f1 " << format_fixed(tr.best->f1, 3) << '\n';
    if (tr.aborted) std::cout << "aborted: " << tr.error << '\n';
}

json energy_json(const Savings& s, const EnergyConstants& k) {
    EnergyReport e = savings_report(s.wh_avoided, k);
    return {{"runs_executed", s.runs_executed},
            {"runs_avoided", s.runs_avoided},
            {"wh_avoided", s.wh_avoided},
            {"co2e_g_avoided", e.co2e_g},
            {"car_km_avoided", e.car_km}};
}

struct PlanArgs {
    std::string oracle;
    std::string fd;
    std::string classifier = "sgd_svm";
    std::optional<int> budget;
    bool neural = false;
    std::optional<double> total_wh;
};

int cmd_plan_oracle(const Common& c, const PlanArgs& a) {
    OracleTable o = read_oracle(a.oracle, a.classifier);
    std::vector<FeatureDensityRecord> recs;
    if (!a.fd.empty()) {
        recs = read_density_csv_file(a.fd);
    } else {
        if (o.fd.empty()) throw ValidationError("oracle has no fd column; pass --fd <density.csv>");
        for (const auto& [n, v] : o.fd) recs.push_back({n, 0, 0, v});
    }
    int budget = a.budget.value_or(8);
    PruningPlan plan = build_plan(recs, a.classifier, a.neural, budget);
    Oracle fn = [&](const PreprocSpec& s) -> OracleResult {
        auto it = o.f1.find(s.name());
        if (it == o.f1.end()) throw ValidationError("oracle has no score for " + s.name());
        return {it->second, 0.0};
    };
    Trace tr = execute_plan(plan, fn, c.jobs);
    print_trace(tr);

    CostModel cost = a.total_wh ? CostModel::uniform_from_total(*a.total_wh) : CostModel{};
    Savings s = savings(tr, cost);
    json j = trace_json(plan, tr);
    json inputs = {{"oracle", hex64(fnv1a(read_bytes(a.oracle)))},
                   {"fd", a.fd.empty() ? "" : hex64(fnv1a(read_bytes(a.fd)))},
                   {"classifier", a.classifier},
                   {"budget", budget},
                   {"neural", a.neural},
                   {"total_wh", a.total_wh.value_or(0.0)}};
    j["tool"] = "fdtool " + kVersion;
    j["manifest"] = hex64(fnv1a(inputs.dump()));
    j["energy"] = energy_json(s, EnergyConstants{});
    std::cout << "runs " << s.runs_executed << " of " << enumerate_specs().size() << ", avoided " << s.runs_avoided
              << '\n';
    if (a.total_wh) std::cout << "wh avoided " << format_fixed(s.wh_avoided, 2) << '\n';
    fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    write_file(dir / "plan.json", j.dump(2) + "\n");
    return tr.aborted ? 2 : 0;
}

int cmd_plan_live(const Common& c, const PlanArgs& a) {
    RunManifest m = load(c);
    auto specs = enumerate_specs();
    Resources res = resources(m, specs);
    Dataset ds = load_dataset(m, false);
    fs::path dir = out_dir(c, &m);
    auto recs = compute_density(m, ds, res, c.jobs);

    ClassifierConfig cfg;
    bool found = false;
    for (const auto& x : seeded(m))
        if (x.label() == m.planner.classifier) cfg = x, found = true;
    if (!found) {
        auto k = kind_from_name(m.planner.classifier);
        if (!k) throw ValidationError("planner classifier '" + m.planner.classifier + "' is not configured");
        cfg.kind = *k;
        cfg.seed = m.seed;
    }
    int budget = a.budget.value_or(m.planner.budget);
    PruningPlan plan = build_plan(recs, cfg.label(), m.planner.neural || a.neural, budget);
    Oracle fn = [&](const PreprocSpec& s) -> OracleResult {
        EvalResult r = evaluate(ds, s, cfg, m.protocol, res, m.seed, m.eval);
        return {r.mean_f1, r.wall_seconds};
    };
    // stage-1 cells run on the pool; each evaluation is single-threaded
    Trace tr = execute_plan(plan, fn, c.jobs);
    print_trace(tr);

    CostModel cost;
    double spent = 0;
    for (const auto& r : tr.runs) {
        double wh = energy(r.seconds, m.device, m.multiplier, m.constants).wh;
        cost.per_spec_wh[r.spec] = wh;
        spent += wh;
    }
    if (!tr.runs.empty()) cost.uniform_wh = spent / static_cast<double>(tr.runs.size());
    Savings s = savings(tr, cost);

    json j = trace_json(plan, tr);
    j["tool"] = "fdtool " + kVersion;
    j["manifest"] = m.hash();
    j["energy"] = energy_json(s, m.constants);
    j["energy"]["wh_spent"] = spent;
    write_file(dir / "plan.json", j.dump(2) + "\n");
    return tr.aborted ? 2 : 0;
}

// ---- energy

struct EnergyArgs {
    std::optional<double> seconds;
    std::optional<double> watts;
    std::string device = "cpu";
    double multiplier = 1.0;
    std::optional<double> wh;
};

int cmd_energy(const Common& c, const EnergyArgs& a) {
    EnergyConstants k;
    std::optional<RunManifest> m;
    if (!c.manifest.empty()) {
        m = load(c);
        k = m->constants;
    }
    auto print = [](const EnergyReport& r) {
        std::cout << "wh " << format_fixed(r.wh, 4) << '\n'
                  << "co2e_g " << format_fixed(r.co2e_g, 4) << '\n'
                  << "car_km " << format_fixed(r.car_km, 4) << '\n';
    };
    if (a.wh) {
        print(savings_report(*a.wh, k));
        return 0;
    }
    if (!a.seconds) throw ValidationError("energy needs --seconds or --wh");
    DeviceProfile dev = m ? m->device : kDesktopCpu;
    if (a.device == "gpu")
        dev = kDesktopGpu;
    else if (a.device != "cpu")
        throw ValidationError("--device is cpu or gpu");
    if (a.watts) dev = {"custom", *a.watts};
    double mult = m && a.multiplier == 1.0 ? m->multiplier : a.multiplier;
    print(energy(*a.seconds, dev, mult, k));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature density toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool manifest_required) {
        auto* opt = sub->add_option("--manifest", common.manifest, "run manifest (JSON)");
        if (manifest_required) opt->required();
        sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", common.seed, "override the manifest seed");
        sub->add_option("--out", common.out, "output directory");
    };

    auto* ingest = app.add_subcommand("ingest", "parse and validate the corpus");
    add_common(ingest, true);
    auto* density = app.add_subcommand("density", "write density.csv");
    add_common(density, true);
    auto* run = app.add_subcommand("run", "train and evaluate the spec x classifier matrix");
    add_common(run, true);

    std::vector<std::string> replay;
    auto* analyze = app.add_subcommand("analyze", "correlation, stability and scatter plots");
    add_common(analyze, false);
    analyze->add_option("--replay", replay, "<fd.csv> <f1.csv>; bypasses training")->expected(2);

    PlanArgs pa;
    auto* plan = app.add_subcommand("plan", "FD-guided pruning plan and trace");
    add_common(plan, false);
    plan->add_option("--oracle", pa.oracle, "scores csv used instead of training");
    plan->add_option("--fd", pa.fd, "density csv when the oracle has no fd column");
    plan->add_option("--classifier", pa.classifier, "classifier column to read from a long-format oracle");
    plan->add_option("--budget", pa.budget, "stage-2 run budget")->check(CLI::NonNegativeNumber);
    plan->add_flag("--neural", pa.neural, "keep DEP specs (neural classifier)");
    plan->add_option("--total-wh", pa.total_wh, "energy of the full 68-spec sweep, for savings");

    EnergyArgs ea;
    auto* en = app.add_subcommand("energy", "energy, CO2e and car-km for a run");
    add_common(en, false);
    en->add_option("--seconds", ea.seconds, "wall-clock seconds")->check(CLI::NonNegativeNumber);
    en->add_option("--watts", ea.watts, "rated power")->check(CLI::PositiveNumber);
    en->add_option("--device", ea.device, "cpu or gpu reference profile");
    en->add_option("--multiplier", ea.multiplier, "repeat factor")->check(CLI::Range(1.0, 1e9));
    en->add_option("--wh", ea.wh, "report CO2e and car-km for an energy amount")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(common);
        if (*density) return cmd_density(common);
        if (*run) return cmd_run(common);
        if (*analyze) {
            if (replay.empty() && common.manifest.empty())
                throw ValidationError("analyze needs --manifest or --replay");
            return cmd_analyze(common, replay);
        }
        if (*plan) return pa.oracle.empty() ? cmd_plan_live(common, pa) : cmd_plan_oracle(common, pa);
        if (*en) return cmd_energy(common, ea);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const StratificationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
