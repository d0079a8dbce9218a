#include "fdkit/analysis.hpp"

#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace fdk {

std::vector<ScoreRow> scores_from_results(std::span<const EvalResult> rs) {
    std::vector<ScoreRow> out;
    for (const auto& r : rs) out.push_back({r.spec_name, r.classifier, r.mean_f1, r.dispersion});
    return out;
}

std::vector<ScoreRow> read_scores_csv(std::istream& in) {
    auto t = read_csv(in);
    int cs = t.require("spec"), cc = t.require("classifier");
    int cf = t.column("f1") >= 0 ? t.column("f1") : t.require("mean_f1");
    int cd = t.column("dispersion");
    std::vector<ScoreRow> out;
    for (const auto& row : t.rows) {
        ScoreRow r;
        r.spec = spec_from_name(row[cs]).name();
        r.classifier = row[cc];
        r.f1 = parse_double(row[cf]);
        if (cd >= 0) r.dispersion = parse_double(row[cd]);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<ScoreRow> read_scores_csv_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return read_scores_csv(f);
}

double pearson(std::span<const std::pair<double, double>> xy) {
    if (xy.size() < 3) throw ValidationError("pearson needs at least three pairs");
    double n = static_cast<double>(xy.size()), mx = 0.0, my = 0.0;
    for (const auto& [x, y] : xy) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [x, y] : xy) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("correlation undefined for a constant series");
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

bool is_pos_only(const std::string& spec_name) {
    auto s = parse_spec(spec_name);
    return s && s->base == Base::PosOnly;
}

std::vector<CorrelationReport> correlate_fd_f1(std::span<const FeatureDensityRecord> records,
                                               std::span<const ScoreRow> scores, const SpecPredicate& exclude) {
    std::map<std::string, double> fd;
    for (const auto& r : records) fd[r.spec_name] = r.fd;
    std::map<std::string, std::map<std::string, double>> by;
    for (const auto& s : scores) {
        if (!fd.count(s.spec)) throw ValidationError("spec " + s.spec + " has scores but no density record");
        if (!by[s.classifier].emplace(s.spec, s.f1).second)
            throw ValidationError("spec " + s.spec + " scored twice for " + s.classifier);
    }
    std::vector<std::string> excluded;
    for (const auto& [name, v] : fd)
        if (exclude && exclude(name)) excluded.push_back(name);

    std::vector<CorrelationReport> out;
    for (const auto& [cls, f1] : by) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& [name, x] : fd) {
            if (exclude && exclude(name)) continue;
            auto it = f1.find(name);
            if (it == f1.end()) throw ValidationError("spec " + name + " has no score for " + cls);
            xy.emplace_back(x, it->second);
        }
        double rho = std::numeric_limits<double>::quiet_NaN();
        try {
            rho = pearson(xy);
        } catch (const UndefinedCorrelationError&) {
            // constant column; reported as NA rather than failing the other classifiers
        }
        out.push_back({cls, xy.size(), rho, excluded});
    }
    return out;
}

std::vector<StabilityEntry> stability(std::span<const ScoreRow> rows) {
    std::vector<StabilityEntry> out;
    for (const auto& r : rows) {
        if (r.dispersion < 0) throw ValidationError("negative dispersion for " + r.spec + "/" + r.classifier);
        out.push_back({r.spec, r.classifier, r.f1, r.dispersion, r.f1 - r.dispersion});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.stability != b.stability) return a.stability > b.stability;
        if (a.spec != b.spec) return a.spec < b.spec;
        return a.classifier < b.classifier;
    });
    return out;
}

std::vector<std::string> fd_range_filter(std::span<const FeatureDensityRecord> records, const std::string& base,
                                         double low_mult, double high_mult) {
    auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.spec_name == base; });
    if (it == records.end()) throw ValidationError("base spec " + base + " not in density table");
    double lo = low_mult * it->fd;
    double hi = std::isinf(high_mult) ? high_mult : high_mult * it->fd;
    std::vector<std::string> out;
    for (const auto& r : records)
        if (r.fd >= lo && r.fd <= hi) out.push_back(r.spec_name);
    return out;
}

void write_correlation_csv(std::ostream& out, std::span<const CorrelationReport> rs) {
    out << "classifier,pairs,rho\n";
    for (const auto& r : rs) out << csv_field(r.classifier) << ',' << r.pairs_used << ','
            << (std::isnan(r.rho) ? std::string("NA") : format_fixed(r.rho, 4)) << '\n';
}

void write_stability_csv(std::ostream& out, std::span<const StabilityEntry> rs) {
    out << "spec,classifier,f1,dispersion,stability\n";
    for (const auto& r : rs)
        out << csv_field(r.spec) << ',' << csv_field(r.classifier) << ',' << format_fixed(r.f1, 3) << ','
            << format_fixed(r.dispersion, 3) << ',' << format_fixed(r.stability, 3) << '\n';
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

}  // namespace

void write_scatter_svg(std::ostream& out, const std::string& title, std::vector<ScatterPoint> pts) {
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.spec < b.spec; });
    const double W = 520, H = 380, L = 60, R = 20, T = 40, B = 50;
    double xmax = 0.0;
    for (const auto& p : pts) xmax = std::max(xmax, p.fd);
    xmax = xmax > 0 ? std::ceil(xmax * 10.0) / 10.0 : 1.0;
    auto px = [&](double x) { return L + x / xmax * (W - L - R); };
    auto py = [&](double y) { return H - B - y * (H - T - B); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";
    out << "<g stroke=\"black\" stroke-width=\"1\">\n";
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n";
    out << "</g>\n<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (int i = 0; i <= 5; ++i) {
        double xv = xmax * i / 5.0, yv = i / 5.0;
        out << "<text x=\"" << format_fixed(px(xv), 1) << "\" y=\"" << H - B + 14 << "\" text-anchor=\"middle\">"
            << format_fixed(xv, 2) << "</text>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << format_fixed(py(yv) + 3, 1) << "\" text-anchor=\"end\">"
            << format_fixed(yv, 1) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">FD</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">F1</text>\n";
    out << "</g>\n<g fill=\"steelblue\" fill-opacity=\"0.8\">\n";
    for (const auto& p : pts)
        out << "<circle cx=\"" << format_fixed(px(p.fd), 2) << "\" cy=\"" << format_fixed(py(p.f1), 2)
            << "\" r=\"3\"><title>" << xml_escape(p.spec) << "</title></circle>\n";
    out << "</g>\n</svg>\n";
}

}  // namespace fdk
