#include "sigp/cli.hpp"

#include "sigp/analysis.hpp"
#include "sigp/flows.hpp"
#include "sigp/gaussian.hpp"
#include "sigp/regularity.hpp"
#include "sigp/serialize.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace sigp::cli {

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Type { Str, Double, Int, U64, List, Range };

struct ParamSpec {
    std::string key;
    Type type;
    std::string def;
    std::string help;
    bool echoed = true; // part of the reproducibility record
};

const std::vector<ParamSpec>& global_params() {
    static const std::vector<ParamSpec> p{
        {"seed", Type::U64, "1", "base seed of every random stream"},
        {"reps", Type::Int, "50", "number of replicates"},
        {"out", Type::Str, "", "output file (stdout when omitted)", false},
        {"threads", Type::Int, "1", "worker threads", false},
        {"config", Type::Str, "", "JSON file with parameter values; flags take precedence", false},
    };
    return p;
}

const std::vector<ParamSpec>& model_params() {
    static const std::vector<ParamSpec> p{
        {"model", Type::Str, "sifbm", "sibm, sifbm or siou"},
        {"H", Type::Double, "0.3", "SIfBm index in (0, 0.5]"},
        {"sigma", Type::Double, "1", "SIOU scale"},
        {"gamma", Type::Double, "1", "SIOU rate"},
    };
    return p;
}

const std::vector<ParamSpec>& design_params() {
    static const std::vector<ParamSpec> p{
        {"center", Type::List, "0.6,0.6", "corner of the centre U0"},
        {"rho-max", Type::Double, "0.25", "largest radius"},
        {"rho-min", Type::Double, "1e-7", "smallest radius"},
        {"scale", Type::Str, "dyadic", "dyadic (halving radii) or geometric"},
        {"radii", Type::Int, "12", "number of radii for the geometric scale"},
        {"pair-budget", Type::Int, "32", "sets drawn per radius"},
        {"metric", Type::Str, "dm", "dm or hausdorff"},
    };
    return p;
}

class Params {
public:
    std::string command;
    std::vector<ParamSpec> specs;
    std::map<std::string, std::string> values;

    const std::string& str(const std::string& key) const {
        const auto it = values.find(key);
        if (it == values.end()) throw std::logic_error("unknown parameter " + key);
        return it->second;
    }
    bool has(const std::string& key) const { return !str(key).empty(); }

    double num(const std::string& key) const { return to_double(key, str(key)); }
    int integer(const std::string& key) const {
        const double v = num(key);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("--" + key + ": expected an integer, got '" + str(key) + "'");
        return static_cast<int>(v);
    }
    std::uint64_t u64(const std::string& key) const {
        const std::string& s = str(key);
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size())
            throw UsageError("--" + key + ": expected a non-negative integer, got '" + s + "'");
        return v;
    }
    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& part : split(str(key), ',')) out.push_back(to_double(key, part));
        if (out.empty()) throw UsageError("--" + key + ": expected a comma-separated list");
        return out;
    }
    std::vector<std::string> words(const std::string& key) const { return split(str(key), ','); }
    /// "3:7" or "3,4,5".
    std::vector<int> range(const std::string& key) const {
        const std::string& s = str(key);
        std::vector<int> out;
        const auto colon = s.find(':');
        if (colon != std::string::npos) {
            const double a = to_double(key, s.substr(0, colon)), b = to_double(key, s.substr(colon + 1));
            if (a != std::floor(a) || b != std::floor(b) || b < a) throw UsageError("--" + key + ": expected lo:hi with lo <= hi");
            for (int n = static_cast<int>(a); n <= static_cast<int>(b); ++n) out.push_back(n);
        } else {
            for (double v : list(key)) out.push_back(static_cast<int>(v));
        }
        return out;
    }

    Json echo() const {
        Json j{{"tool", kToolName}, {"version", kVersion}, {"command", command}};
        for (const auto& s : specs) {
            if (!s.echoed) continue;
            const std::string& v = str(s.key);
            if (v.empty()) j[s.key] = nullptr;
            else if (s.type == Type::Double) j[s.key] = num(s.key);
            else if (s.type == Type::Int) j[s.key] = integer(s.key);
            else if (s.type == Type::U64) j[s.key] = u64(s.key);
            else j[s.key] = v;
        }
        return j;
    }

    CovModel model() const {
        CovModel m;
        m.kind = [&] {
            try {
                return parse_model_kind(str("model"));
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }();
        m.H = num("H");
        m.sigma = num("sigma");
        m.gamma = num("gamma");
        m.validate();
        return m;
    }

    Metric metric() const {
        try {
            return parse_metric(str("metric"));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

private:
    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, sep))
            if (!cur.empty()) out.push_back(cur);
        return out;
    }
    static double to_double(const std::string& key, const std::string& s) {
        double v = 0.0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
            throw UsageError("--" + key + ": expected a number, got '" + s + "'");
        return v;
    }
};

std::string json_to_param(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    if (v.is_array()) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : ",") + json_to_param(x);
        return s;
    }
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

Json read_json_file(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw UsageError(what + " '" + path + "' cannot be opened");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError(what + " '" + path + "' is not valid JSON: " + e.what());
    }
}

/// Writes through a temporary file and a rename, so a failed run never
/// leaves a partial file behind.
void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw UsageError("cannot write '" + path + "'");
            f.write(content.data(), static_cast<std::streamsize>(content.size()));
            f.flush();
            if (!f) throw std::runtime_error("write to '" + path + "' failed");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

void emit(const Params& p, const std::string& content, std::ostream& out) {
    if (!p.has("out") || p.str("out") == "-") out << content;
    else write_atomic(p.str("out"), content);
}

void require_format(const Params& p, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (p.str("format") == a) return;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw UsageError("--format for " + p.command + " must be one of: " + list);
}

Rect center_of(const Params& p) {
    const auto c = p.list("center");
    if (c.size() > static_cast<std::size_t>(kMaxDim)) throw UsageError("--center has too many coordinates");
    for (double x : c)
        if (!(x > 0.0 && x <= 1.0)) throw UsageError("--center coordinates must lie in (0, 1]");
    return Rect(Point(std::span<const double>(c)));
}

ScalePlan plan_of(const Params& p, const Rect& center) {
    const double rhoMax = p.num("rho-max"), rhoMin = p.num("rho-min");
    if (!(rhoMax > rhoMin && rhoMin > 0.0)) throw UsageError("radii need 0 < rho-min < rho-max");
    ScalePlan plan;
    if (p.str("scale") == "geometric") {
        plan = geometric_plan(center, rhoMax, rhoMin, p.integer("radii"), p.metric());
    } else if (p.str("scale") == "dyadic") {
        plan.center = center;
        plan.metric = p.metric();
        for (double r = rhoMax; r >= rhoMin; r /= 2.0) plan.radii.push_back(r);
    } else {
        throw UsageError("--scale must be dyadic or geometric");
    }
    plan.pairBudget = p.integer("pair-budget");
    plan.validate();
    return plan;
}

SimpleFlow flow_of(const Params& p, int dim) {
    if (!p.has("flow")) return SimpleFlow({linear_flow(dim)});
    return simple_flow_from_json(read_json_file(p.str("flow"), "flow file"));
}

std::size_t reps_of(const Params& p) {
    const int r = p.integer("reps");
    if (r < 1) throw UsageError("--reps must be positive");
    return static_cast<std::size_t>(r);
}

SampleOptions sample_options(const Params& p) { return {kDefaultCovCap, std::max(1, p.integer("threads"))}; }

// ---------------------------------------------------------------------------

int cmd_simulate(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "binary"});
    const CovModel model = p.model();
    const std::string design = p.str("design");
    std::vector<Rect> sets;
    if (design == "grid") {
        const int dim = p.integer("dim");
        if (dim < 1 || dim > kMaxDim) throw UsageError("--dim out of range");
        sets = enumerate_An({p.integer("level"), dim});
    } else if (design == "ball") {
        const Rect c = center_of(p);
        sets = build_local_design(plan_of(p, c), p.u64("seed")).sets;
    } else if (design == "flow") {
        const SimpleFlow f = flow_of(p, p.integer("dim"));
        if (f.segments().size() != 1) throw UsageError("flow designs take a single elementary flow");
        const ElementaryFlow& e = f.segments().front();
        const int count = p.integer("times");
        if (count < 1) throw UsageError("--times must be positive");
        std::vector<double> ts;
        for (int k = 1; k <= count; ++k) ts.push_back(e.theta_min() + (e.theta_max() - e.theta_min()) * k / count);
        sets = projected_sets(e, ts);
    } else if (design == "pc") {
        const auto t = p.list("t");
        sets = pc_family(Point(std::span<const double>(t)), p.range("levels"));
    } else {
        throw UsageError("--design must be grid, ball, flow or pc");
    }
    const SamplePath path = sample_paths(model, std::move(sets), p.u64("seed"), reps_of(p), sample_options(p));
    std::ostringstream s;
    if (p.str("format") == "binary") write_path_binary(s, path);
    else write_path_csv(s, path, p.echo());
    emit(p, s.str(), out);
    return kOk;
}

int cmd_estimate(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "json"});
    std::vector<ExponentKind> kinds;
    for (const auto& w : p.words("kind")) {
        try {
            kinds.push_back(parse_kind(w));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (kinds.empty()) throw UsageError("--kind lists no estimator");

    std::optional<SamplePath> input;
    if (p.has("input")) {
        std::ifstream in(p.str("input"));
        if (!in) throw UsageError("input path file '" + p.str("input") + "' cannot be opened");
        input = read_path_csv(in);
    }
    const CovModel model = input ? input->model : p.model();

    std::optional<SamplePath> ball;
    const Rect center = center_of(p);
    std::vector<ExponentReport> reports;
    for (ExponentKind k : kinds) {
        const bool pathKind = k == ExponentKind::Pointwise || k == ExponentKind::Local || k == ExponentKind::PointwiseC ||
                              k == ExponentKind::LocalC;
        if (pathKind) {
            const ScalePlan plan = plan_of(p, center);
            if (!ball) {
                if (input) ball = *input;
                else ball = sample_paths(model, build_local_design(plan, p.u64("seed")).sets, p.u64("seed"), reps_of(p),
                                         sample_options(p));
            }
            if (k == ExponentKind::Pointwise) reports.push_back(estimate_pointwise(*ball, center, plan));
            if (k == ExponentKind::Local) reports.push_back(estimate_local(*ball, center, plan));
            if (k == ExponentKind::PointwiseC) reports.push_back(estimate_C_exponents(*ball, center, plan).first);
            if (k == ExponentKind::LocalC) reports.push_back(estimate_C_exponents(*ball, center, plan).second);
        } else if (k == ExponentKind::Pc) {
            const auto t = p.list("t");
            const Point tp{std::span<const double>(t)};
            if (input) {
                auto r = estimate_pc_on_path(*input, tp, p.range("levels"));
                r.target = theoretical_target(model, k, tp.dim());
                reports.push_back(r);
            } else {
                reports.push_back(estimate_pc(model, tp, p.range("levels"),
                                              {reps_of(p), p.u64("seed"), std::max(1, p.integer("threads"))}));
            }
        } else if (k == ExponentKind::DetPc) {
            const auto t = p.list("t");
            reports.push_back(deterministic_pc(model, Point(std::span<const double>(t)), p.range("levels")));
        } else {
            const auto [pw, loc] = deterministic_exponents(model, center, plan_of(p, center));
            reports.push_back(k == ExponentKind::DetPointwise ? pw : loc);
        }
    }

    const Json config = p.echo();
    std::ostringstream s;
    if (p.str("format") == "json") {
        Json j{{"config", config}, {"reports", Json::array()}};
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        s << j.dump(2) << '\n';
    } else {
        s << "# config: " << config.dump() << '\n' << "kind,replicate,estimate,target\n";
        for (const auto& r : reports) {
            const std::string target = r.target ? format_double(*r.target) : "";
            if (r.perReplicate.empty()) {
                s << kind_name(r.kind) << ",," << format_double(r.estimate) << ',' << target << '\n';
                continue;
            }
            for (std::size_t i = 0; i < r.perReplicate.size(); ++i)
                s << kind_name(r.kind) << ',' << i << ',' << format_double(r.perReplicate[i]) << ',' << target << '\n';
        }
    }
    if (p.has("summary")) {
        Json j{{"config", config}, {"reports", Json::array()}};
        for (const auto& r : reports) j["reports"].push_back(to_json(r));
        write_atomic(p.str("summary"), j.dump(2) + "\n");
    }
    emit(p, s.str(), out);
    if (p.has("out")) {
        for (const auto& r : reports)
            out << std::left << std::setw(14) << kind_name(r.kind) << format_double(r.estimate)
                << (r.target ? "  target " + format_double(*r.target) : std::string()) << '\n';
    }
    for (const auto& r : reports)
        if (r.degenerate) throw NumericFailure(kind_name(r.kind) + " estimate is degenerate (no usable oscillations)");
    return kOk;
}

std::vector<int> default_levels(const CollectionDescriptor& d) {
    if (d.kind == CollectionKind::LowerLayers) return {0, 1, 2, 3, 4, 5, 6};
    if (d.dim == 1) return {2, 3, 4, 5, 6, 7, 8};
    if (d.dim == 2) return {2, 3, 4, 5, 6};
    return {2, 3, 4};
}

int cmd_check(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "json"});
    CollectionDescriptor d;
    try {
        d.kind = parse_collection(p.str("collection"));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    d.dim = p.integer("dim");
    const auto levels = p.has("levels") ? p.range("levels") : default_levels(d);
    d.nMin = levels.front();
    d.nMax = levels.back();
    d.metric = p.metric();
    d.M1 = p.num("M1");
    d.cornerFloor = p.num("corner-floor");
    d.deltas = p.list("deltas");
    d.seed = p.u64("seed");
    d.gapSamples = p.u64("samples");
    d.threads = std::max(1, p.integer("threads"));
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }

    AssumptionReport rep;
    if (d.kind == CollectionKind::LowerLayers) {
        rep = lower_layers_report(2);
    } else {
        rep = check_collection(d);
        if (p.has("q")) rep.h1 = check_H1(rep.kSequence, rep.supGap, p.num("q"));
    }
    const H1Check* h1 = rep.h1 ? &*rep.h1 : (rep.h1Grid.empty() ? nullptr : &rep.h1Grid.back());

    std::ostringstream table;
    table << "collection " << collection_name(d.kind);
    if (d.kind == CollectionKind::Rectangles) table << " dim " << d.dim;
    table << "  qFit " << format_double(rep.qFit) << " (stderr " << format_double(rep.qStderr) << ")\n";
    table << std::left << std::setw(7) << "level" << std::setw(16) << "k_n" << std::setw(24) << "supGap" << std::setw(24)
          << "bound" << "pass\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        std::ostringstream k;
        k << std::setprecision(6) << rep.kSequence[i];
        table << std::setw(7) << rep.levels[i] << std::setw(16) << k.str() << std::setw(24) << format_double(rep.supGap[i])
              << std::setw(24) << (h1 ? format_double(h1->bound[i]) : "") << (h1 ? (h1->pass[i] ? "yes" : "no") : "") << '\n';
    }
    if (h1) table << "H1 bound uses q = " << format_double(h1->q) << ", M1 = " << format_double(h1->M1) << '\n';
    table << "verdict: " << verdict_name(rep.verdict) << '\n';
    if (rep.witness)
        table << "witness: level " << rep.witness->level << ", U = " << rep.witness->set << ", g_n(U) = " << rep.witness->image
              << ", gap " << format_double(rep.witness->gap) << '\n';

    if (p.has("out")) {
        std::ostringstream s;
        const Json config = p.echo();
        if (p.str("format") == "json") {
            Json j{{"config", config}, {"report", to_json(rep)}};
            s << j.dump(2) << '\n';
        } else {
            s << "# config: " << config.dump() << '\n' << "level,k_n,sup_gap,sampled_gap,bound,pass\n";
            for (std::size_t i = 0; i < rep.levels.size(); ++i)
                s << rep.levels[i] << ',' << format_double(rep.kSequence[i]) << ',' << format_double(rep.supGap[i]) << ','
                  << format_double(rep.sampledGap[i]) << ',' << (h1 ? format_double(h1->bound[i]) : "") << ','
                  << (h1 ? (h1->pass[i] ? "true" : "false") : "") << '\n';
            s << "# verdict: " << verdict_name(rep.verdict) << '\n';
        }
        emit(p, s.str(), out);
    }
    out << table.str();
    return kOk;
}

int cmd_flow(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "json"});
    const CovModel model = p.model();
    const SimpleFlow f = flow_of(p, p.integer("dim"));
    const int g = p.integer("grid");
    if (g < 2) throw UsageError("--grid must be at least 2");
    const double H = model.kind == ModelKind::SIFBM ? model.H : 0.5;
    const double tmax = f.theta_max();
    struct Row {
        double s, t, proj, fbm;
    };
    std::vector<Row> rows;
    double worst = 0.0;
    for (int a = 1; a <= g; ++a)
        for (int b = 1; b <= g; ++b) {
            const double s = tmax * a / g, t = tmax * b / g;
            const Row r{s, t, projected_cov(model, f, s, t), fbm_cov(H, s, t)};
            worst = std::max(worst, std::abs(r.proj - r.fbm));
            rows.push_back(r);
        }

    const Json config = p.echo();
    std::ostringstream s;
    if (p.str("format") == "json") {
        Json table = Json::array();
        for (const auto& r : rows)
            table.push_back(Json{{"s", r.s}, {"t", r.t}, {"projected", r.proj}, {"fbm", r.fbm}, {"absdiff", std::abs(r.proj - r.fbm)}});
        s << Json{{"config", config}, {"max_absdiff", worst}, {"table", table}}.dump(2) << '\n';
    } else {
        s << "# config: " << config.dump() << '\n' << "s,t,projected,fbm,absdiff\n";
        for (const auto& r : rows)
            s << format_double(r.s) << ',' << format_double(r.t) << ',' << format_double(r.proj) << ',' << format_double(r.fbm)
              << ',' << format_double(std::abs(r.proj - r.fbm)) << '\n';
    }
    if (p.has("paths-out")) {
        if (f.segments().size() != 1) throw UsageError("--paths-out needs a single elementary flow");
        std::vector<double> ts;
        for (int k = 1; k <= g; ++k) ts.push_back(tmax * k / g);
        const auto path = sample_paths(model, projected_sets(f.segments().front(), ts), p.u64("seed"), reps_of(p), sample_options(p));
        std::ostringstream ps;
        write_path_csv(ps, path, config);
        write_atomic(p.str("paths-out"), ps.str());
    }
    emit(p, s.str(), out);
    if (p.has("out")) out << "max |projected - fbm| = " << format_double(worst) << '\n';
    return kOk;
}

int cmd_demo_unbounded(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "json"});
    const int k = p.integer("k");
    if (!is_power_of_two(k)) throw UsageError("--k must be a power of two");
    const double h = p.num("h");
    const auto reps = reps_of(p);
    const auto seed = p.u64("seed");
    const UnboundedDemoReport main = demo_unbounded(h, k, seed, reps);
    const UnboundedGrowth growth = demo_unbounded_growth(h, p.integer("kmin-log2"), p.integer("kmax-log2"), seed, reps);

    const Json config = p.echo();
    std::ostringstream s;
    if (p.str("format") == "json") {
        Json rows = Json::array();
        for (const auto& r : growth.rows) rows.push_back(to_json(r));
        s << Json{{"config", config},
                  {"report", to_json(main)},
                  {"growth", Json{{"rows", rows}, {"slope", growth.slope}, {"target_slope", growth.targetSlope}}}}
                 .dump(2)
          << '\n';
    } else {
        s << "# config: " << config.dump() << '\n' << "role,k,h,replicates,mean_W_C,theoretical_mean,mean_lambda_C,lambda_ratio\n";
        auto row = [&](const char* role, const UnboundedDemoReport& r) {
            s << role << ',' << r.cells << ',' << format_double(r.h) << ',' << r.replicates << ',' << format_double(r.meanWC) << ','
              << format_double(r.theoreticalMean) << ',' << format_double(r.lambdaC) << ',' << format_double(r.lambdaRatio) << '\n';
        };
        row("main", main);
        for (const auto& r : growth.rows) row("growth", r);
        s << "# slope of mean_W_C against sqrt(k): " << format_double(growth.slope) << " (target " << format_double(growth.targetSlope)
          << ")\n";
    }
    emit(p, s.str(), out);
    if (p.has("out"))
        out << "mean W_C " << format_double(main.meanWC) << " vs sqrt(kh/(2 pi)) " << format_double(main.theoreticalMean) << '\n';
    return kOk;
}

int cmd_entropy(const Params& p, std::ostream& out) {
    require_format(p, {"csv", "json"});
    CollectionDescriptor d = CollectionDescriptor::rectangles(p.integer("dim"), 2, 4);
    d.metric = p.metric();
    d.cornerFloor = p.num("corner-floor");
    try {
        d.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    struct Row {
        double eps;
        std::size_t n;
        double bound;
    };
    std::vector<Row> rows;
    for (double eps : p.list("eps")) {
        if (!(eps > 0.0 && eps <= 0.5)) throw UsageError("--eps values must lie in (0, 1/2]");
        rows.push_back({eps, covering_number(d, eps), std::pow(eps, -d.dim)});
    }
    const Json config = p.echo();
    std::ostringstream s;
    if (p.str("format") == "json") {
        Json a = Json::array();
        for (const auto& r : rows)
            a.push_back(Json{{"eps", r.eps}, {"covering_number", r.n}, {"bound", r.bound}, {"within_bound", r.n <= r.bound}});
        s << Json{{"config", config}, {"rows", a}}.dump(2) << '\n';
    } else {
        s << "# config: " << config.dump() << '\n' << "eps,covering_number,bound,within_bound\n";
        for (const auto& r : rows)
            s << format_double(r.eps) << ',' << r.n << ',' << format_double(r.bound) << ',' << (r.n <= r.bound ? "true" : "false") << '\n';
    }
    emit(p, s.str(), out);
    return kOk;
}

struct Command {
    const char* name;
    const char* help;
    std::vector<ParamSpec> params;
    int (*run)(const Params&, std::ostream&);
};

std::vector<ParamSpec> join(std::initializer_list<std::vector<ParamSpec>> parts) {
    std::vector<ParamSpec> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<Command> commands() {
    return {
        {"simulate", "sample a Gaussian process over a finite design",
         join({global_params(), model_params(), design_params(),
               {{"format", Type::Str, "csv", "csv or binary"},
                {"design", Type::Str, "grid", "grid, ball, flow or pc"},
                {"dim", Type::Int, "2", "dimension for grid and flow designs"},
                {"level", Type::Int, "4", "dyadic level of the grid design"},
                {"flow", Type::Str, "", "flow JSON file (linear flow when omitted)"},
                {"times", Type::Int, "16", "number of flow times"},
                {"t", Type::List, "0.37,0.61", "point of the pc design"},
                {"levels", Type::Range, "3:7", "levels of the pc design"}}}),
         cmd_simulate},
        {"estimate", "Hölder exponent estimates",
         join({global_params(), model_params(), design_params(),
               {{"format", Type::Str, "csv", "csv (long format) or json"},
                {"kind", Type::Str, "pointwise,local", "comma-separated estimator kinds"},
                {"input", Type::Str, "", "existing path CSV (from simulate --design ball)"},
                {"t", Type::List, "0.37,0.61", "point for pc kinds"},
                {"levels", Type::Range, "3:7", "levels for pc kinds"},
                {"summary", Type::Str, "", "also write a JSON summary here", false}}}),
         cmd_estimate},
        {"check", "check the approximation assumption on a collection",
         join({global_params(),
               {{"format", Type::Str, "csv", "csv or json (file output)"},
                {"collection", Type::Str, "rectangles", "rectangles or lower-layers"},
                {"dim", Type::Int, "2", "dimension of the rectangles"},
                {"levels", Type::Range, "", "level range lo:hi (per-collection default)"},
                {"metric", Type::Str, "dm", "dm or hausdorff"},
                {"M1", Type::Double, "1", "normalization constant of the neighbour radius"},
                {"corner-floor", Type::Double, "0", "restrict rectangles to corners >= this"},
                {"deltas", Type::List, "0.1,0.5,1", "delta grid of the summability tests"},
                {"q", Type::Double, "", "check H1 at this q instead of the fitted one"},
                {"samples", Type::U64, "10000", "random confirmation sample per level"}}}),
         cmd_check},
        {"flow", "projected covariance along a flow against fBm",
         join({global_params(), model_params(),
               {{"format", Type::Str, "csv", "csv or json"},
                {"flow", Type::Str, "", "flow JSON file (linear flow when omitted)"},
                {"dim", Type::Int, "2", "dimension of the default linear flow"},
                {"grid", Type::Int, "16", "grid points per axis in (s,t)"},
                {"paths-out", Type::Str, "", "also sample projected paths into this CSV", false}}}),
         cmd_flow},
        {"demo-unbounded", "increments over random C-sets grow without bound",
         join({{{"seed", Type::U64, "1", "base seed of every random stream"},
                {"reps", Type::Int, "200", "number of replicates"},
                {"out", Type::Str, "", "output file (stdout when omitted)", false},
                {"threads", Type::Int, "1", "worker threads", false},
                {"config", Type::Str, "", "JSON file with parameter values; flags take precedence", false}},
               {{"format", Type::Str, "csv", "csv or json"},
                {"k", Type::Int, "4096", "number of cells (power of two)"},
                {"h", Type::Double, "0.01", "strip height"},
                {"kmin-log2", Type::Int, "6", "smallest log2 k of the growth table"},
                {"kmax-log2", Type::Int, "12", "largest log2 k of the growth table"}}}),
         cmd_demo_unbounded},
        {"entropy", "covering numbers of the rectangle collection",
         join({global_params(),
               {{"format", Type::Str, "csv", "csv or json"},
                {"dim", Type::Int, "2", "dimension"},
                {"eps", Type::List, "0.25,0.125,0.0625,0.03125", "radii"},
                {"metric", Type::Str, "dm", "dm or hausdorff"},
                {"corner-floor", Type::Double, "0", "restrict to corners >= this"}}}),
         cmd_entropy},
    };
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Set-indexed Gaussian processes: simulation, regularity estimates and assumption checks", kToolName};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    const auto cmds = commands();
    std::vector<std::map<std::string, std::string>> raw(cmds.size());
    std::vector<std::map<std::string, CLI::Option*>> opts(cmds.size());
    std::vector<CLI::App*> subs;
    for (std::size_t c = 0; c < cmds.size(); ++c) {
        CLI::App* sub = app.add_subcommand(cmds[c].name, cmds[c].help);
        for (const auto& spec : cmds[c].params)
            if (spec.key == "h") sub->set_help_flag("--help", "Print this help message and exit");
        for (const auto& spec : cmds[c].params) {
            std::string help = spec.help;
            if (!spec.def.empty()) help += " [" + spec.def + "]";
            opts[c][spec.key] = sub->add_option("--" + spec.key, raw[c][spec.key], help);
        }
        subs.push_back(sub);
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    std::size_t c = 0;
    while (!subs[c]->parsed()) ++c;
    Params p;
    p.command = cmds[c].name;
    p.specs = cmds[c].params;
    try {
        Json file = Json::object();
        if (opts[c]["config"]->count() > 0 && !raw[c]["config"].empty()) file = read_json_file(raw[c]["config"], "config file");
        if (!file.is_object()) throw UsageError("config file must hold a JSON object");
        for (const auto& spec : p.specs) {
            if (opts[c][spec.key]->count() > 0) p.values[spec.key] = raw[c][spec.key];
            else if (spec.key != "config" && file.contains(spec.key)) p.values[spec.key] = json_to_param(file.at(spec.key));
            else p.values[spec.key] = spec.def;
        }
        return cmds[c].run(p, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << p.command << ": " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace sigp::cli
