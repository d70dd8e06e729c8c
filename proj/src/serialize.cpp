#include "sigp/serialize.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sigp {

namespace {

constexpr char kMagic[5] = {'S', 'I', 'D', 'X', '1'};

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json doubles(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
}

Json bools(const std::vector<bool>& v) {
    Json a = Json::array();
    for (bool b : v) a.push_back(b);
    return a;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(b, 8);
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated SIDX1 stream");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
            else if (c == '"') quoted = false;
            else cur += c;
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    return v;
}

} // namespace

std::string exact_dyadic_decimal(double x) {
    if (!std::isfinite(x)) return {};
    int k = 0;
    double scaled = x;
    while (scaled != std::floor(scaled)) {
        if (++k > 32) return {};
        scaled = std::ldexp(x, k);
    }
    // m / 2^k has exactly k decimal places, and glibc prints them exactly.
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.*f", k, x);
    return buf;
}

Json coordinate_to_json(double x) {
    const std::string s = exact_dyadic_decimal(x);
    return s.empty() ? Json(x) : Json(s);
}

double coordinate_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_double(j.get<std::string>());
    throw std::invalid_argument("coordinate must be a number or a decimal string");
}

Json to_json(const Point& p) {
    Json a = Json::array();
    for (double c : p.coords()) a.push_back(coordinate_to_json(c));
    return a;
}

Point point_from_json(const Json& j) {
    if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim))
        throw std::invalid_argument("a point is a non-empty array of at most " + std::to_string(kMaxDim) + " coordinates");
    Point p(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<int>(i)] = coordinate_from_json(j[i]);
    return p;
}

Json to_json(const Rect& r) {
    if (r.empty()) return Json{{"empty", true}, {"dim", r.dim()}};
    return Json{{"corner", to_json(r.corner())}};
}

Rect rect_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("a rectangle is a JSON object");
    if (j.value("empty", false)) return Rect::empty_set(j.at("dim").get<int>());
    return Rect(point_from_json(j.at("corner")));
}

Json to_json(const CSet& c) {
    Json sub = Json::array();
    for (const Rect& r : c.sub) sub.push_back(to_json(r));
    return Json{{"base", to_json(c.base)}, {"sub", sub}};
}

CSet cset_from_json(const Json& j) {
    CSet c{rect_from_json(j.at("base")), {}};
    for (const auto& s : j.value("sub", Json::array())) c.sub.push_back(rect_from_json(s));
    return c;
}

Json to_json(const CovModel& m) {
    Json j{{"model", model_name(m.kind)}};
    if (m.kind == ModelKind::SIFBM) j["H"] = m.H;
    if (m.kind == ModelKind::SIOU) {
        j["sigma"] = m.sigma;
        j["gamma"] = m.gamma;
    }
    return j;
}

CovModel model_from_json(const Json& j) {
    CovModel m;
    m.kind = parse_model_kind(j.at("model").get<std::string>());
    if (m.kind == ModelKind::SIFBM) m.H = j.at("H").get<double>();
    if (m.kind == ModelKind::SIOU) {
        m.sigma = j.value("sigma", 1.0);
        m.gamma = j.value("gamma", 1.0);
    }
    m.validate();
    return m;
}

Json to_json(const ElementaryFlow& f) {
    Json bp = Json::array();
    for (const auto& b : f.breakpoints()) bp.push_back(Json{{"t", coordinate_to_json(b.t)}, {"corner", to_json(b.corner)}});
    return Json{{"breakpoints", bp}};
}

ElementaryFlow elementary_flow_from_json(const Json& j) {
    std::vector<FlowBreakpoint> bp;
    for (const auto& b : j.at("breakpoints")) bp.push_back({coordinate_from_json(b.at("t")), point_from_json(b.at("corner"))});
    return ElementaryFlow(std::move(bp));
}

Json to_json(const SimpleFlow& f) {
    Json seg = Json::array();
    for (const auto& s : f.segments()) seg.push_back(to_json(s));
    return Json{{"segments", seg}};
}

SimpleFlow simple_flow_from_json(const Json& j) {
    std::vector<ElementaryFlow> seg;
    if (j.contains("segments")) {
        for (const auto& s : j.at("segments")) seg.push_back(elementary_flow_from_json(s));
    } else {
        seg.push_back(elementary_flow_from_json(j));
    }
    return SimpleFlow(std::move(seg));
}

Json to_json(const ExponentReport& r) {
    Json j{{"kind", kind_name(r.kind)},
           {"estimate", number_or_null(r.estimate)},
           {"degenerate", r.degenerate},
           {"rho_min", r.rhoMin},
           {"rho_max", r.rhoMax},
           {"regression_r2", number_or_null(r.regressionR2)},
           {"pairs_used", r.pairsUsed},
           {"zero_excluded", r.zeroExcluded},
           {"replicates_used", r.replicatesUsed},
           {"target", r.target ? Json(*r.target) : Json(nullptr)}};
    j["per_replicate"] = doubles(r.perReplicate);
    return j;
}

Json to_json(const KolmogorovReport& r) {
    return Json{{"alphas_tried", r.alphasTried},
                {"alpha", r.alpha},
                {"s", r.s},
                {"s_r2", r.sR2},
                {"log_K", r.logK},
                {"beta", r.beta},
                {"applicable", r.applicable},
                {"note", r.note},
                {"gamma_max", r.gammaMax},
                {"gamma", r.gamma},
                {"h_floor", r.hFloor},
                {"pairs", r.pairs},
                {"replicates", r.replicates},
                {"passed", r.passed},
                {"pass_rate", r.passRate},
                {"h_star", doubles(r.hStar)}};
}

Json to_json(const SummabilityDiagnostic& d) {
    Json tests = Json::array();
    for (const auto& t : d.tests)
        tests.push_back(Json{{"delta", t.delta},
                             {"terms", doubles(t.terms)},
                             {"partial_sums", doubles(t.partialSums)},
                             {"ratios", doubles(t.ratios)},
                             {"threshold", t.threshold},
                             {"geometric", t.geometric}});
    return Json{{"series", d.series}, {"levels", d.levels}, {"tests", tests}, {"verdict", verdict_name(d.verdict)}, {"note", d.note}};
}

namespace {

Json to_json(const H1Check& h) {
    return Json{{"q", h.q}, {"M1", h.M1}, {"bound", doubles(h.bound)}, {"pass", bools(h.pass)}, {"all_pass", h.allPass}};
}

Json to_json(const CollectionDescriptor& d) {
    Json j{{"kind", collection_name(d.kind)}};
    if (d.kind == CollectionKind::Rectangles) j["dim"] = d.dim;
    j["n_min"] = d.nMin;
    j["n_max"] = d.nMax;
    j["metric"] = metric_name(d.metric);
    j["M1"] = d.M1;
    if (d.kind == CollectionKind::Rectangles) j["corner_floor"] = d.cornerFloor;
    j["deltas"] = d.deltas;
    j["seed"] = d.seed;
    j["gap_samples"] = d.gapSamples;
    return j;
}

} // namespace

Json to_json(const AssumptionReport& r) {
    Json levels = Json::array();
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        Json row{{"level", r.levels[i]}, {"k", r.kSequence[i]}, {"sup_gap", r.supGap[i]}, {"sampled_gap", r.sampledGap[i]}};
        if (r.h1) {
            row["bound"] = r.h1->bound[i];
            row["pass"] = static_cast<bool>(r.h1->pass[i]);
        }
        if (i < r.Nn.size()) row["N_n"] = r.Nn[i];
        levels.push_back(row);
    }
    Json j{{"collection", to_json(r.collection)},
           {"levels", levels},
           {"q_fit", number_or_null(r.qFit)},
           {"q_stderr", number_or_null(r.qStderr)},
           {"q_r2", r.qR2}};
    if (r.h1) j["H1"] = to_json(*r.h1);
    if (!r.h1Grid.empty()) {
        Json g = Json::array();
        for (const auto& h : r.h1Grid) g.push_back(to_json(h));
        j["H1_grid"] = g;
    }
    if (r.h2) j["H2"] = to_json(*r.h2);
    if (r.admissible) j["admissibility"] = to_json(*r.admissible);
    if (r.etaHat) j["eta_hat"] = *r.etaHat;
    if (r.counts) {
        const auto& c = *r.counts;
        Json rows = Json::array();
        for (std::size_t i = 0; i < c.levels.size(); ++i)
            rows.push_back(Json{{"level", c.levels[i]},
                                {"core_count", c.core[i]},
                                {"count_with_conventions", c.withConventions[i]},
                                {"lower_bound", c.lowerBound[i]},
                                {"bound_holds", static_cast<bool>(c.boundHolds[i])},
                                {"min_gap", c.minGap[i]},
                                {"min_gap_expected", c.minGapExpected[i]}});
        j["lower_layer_counts"] = rows;
    }
    j["verdict"] = verdict_name(r.verdict);
    if (r.witness)
        j["witness"] = Json{{"level", r.witness->level}, {"set", r.witness->set}, {"image", r.witness->image}, {"gap", r.witness->gap}};
    j["notes"] = r.notes;
    return j;
}

Json to_json(const UnboundedDemoReport& r) {
    return Json{{"h", r.h},
                {"cells", r.cells},
                {"replicates", r.replicates},
                {"mean_W_C", r.meanWC},
                {"mean_lambda_C", r.lambdaC},
                {"lambda_ratio", r.lambdaRatio},
                {"theoretical_mean", r.theoreticalMean}};
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string exponent_csv_header() {
    return "kind,estimate,degenerate,rho_min,rho_max,regression_r2,pairs_used,zero_excluded,replicates_used,target";
}

std::string exponent_csv_row(const ExponentReport& r) {
    return kind_name(r.kind) + "," + format_double(r.estimate) + "," + (r.degenerate ? "true" : "false") + "," +
           format_double(r.rhoMin) + "," + format_double(r.rhoMax) + "," + format_double(r.regressionR2) + "," +
           std::to_string(r.pairsUsed) + "," + std::to_string(r.zeroExcluded) + "," + std::to_string(r.replicatesUsed) + "," +
           (r.target ? format_double(*r.target) : std::string());
}

void write_path_csv(std::ostream& out, const SamplePath& path, const Json& config) {
    out << "# config: " << config.dump() << '\n';
    for (std::size_t i = 0; i < path.sets.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_field(to_json(path.sets[i]).dump());
    }
    out << '\n';
    for (std::size_t r = 0; r < path.replicates; ++r) {
        for (std::size_t i = 0; i < path.sets.size(); ++i) {
            if (i > 0) out << ',';
            out << format_double(path.value(r, i));
        }
        out << '\n';
    }
}

SamplePath read_path_csv(std::istream& in) {
    SamplePath p;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# config: ", 0) == 0) {
            const Json cfg = Json::parse(line.substr(10));
            if (cfg.contains("model")) p.model = model_from_json(cfg);
            if (cfg.contains("seed")) p.seed = cfg.at("seed").get<std::uint64_t>();
            continue;
        }
        if (line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (!header) {
            for (const auto& f : fields) p.sets.push_back(rect_from_json(Json::parse(f)));
            header = true;
            continue;
        }
        if (fields.size() != p.sets.size())
            throw std::runtime_error("row " + std::to_string(p.replicates + 1) + " has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(p.sets.size()));
        for (const auto& f : fields) p.values.push_back(parse_double(f));
        ++p.replicates;
    }
    if (!header) throw std::runtime_error("path CSV has no header row");
    p.rebuild_index();
    return p;
}

void write_path_binary(std::ostream& out, const SamplePath& path) {
    const int dim = path.sets.empty() ? 0 : path.sets.front().dim();
    out.write(kMagic, sizeof kMagic);
    put_u64(out, static_cast<std::uint64_t>(dim));
    put_u64(out, path.sets.size());
    put_u64(out, path.replicates);
    put_u64(out, path.seed);
    put_u64(out, static_cast<std::uint64_t>(path.model.kind));
    put_f64(out, path.model.H);
    put_f64(out, path.model.sigma);
    put_f64(out, path.model.gamma);
    for (const Rect& r : path.sets) {
        if (r.dim() != dim) throw std::invalid_argument("binary paths need sets of one dimension");
        put_u64(out, r.empty() ? 1 : 0);
        for (int i = 0; i < dim; ++i) put_f64(out, r.empty() ? 0.0 : r[i]);
    }
    for (double v : path.values) put_f64(out, v);
}

SamplePath read_path_binary(std::istream& in) {
    char magic[sizeof kMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error("not a SIDX1 stream");
    SamplePath p;
    const auto dim = static_cast<int>(get_u64(in));
    if (dim < 0 || dim > kMaxDim) throw std::runtime_error("SIDX1 dimension out of range");
    const std::uint64_t n = get_u64(in);
    p.replicates = get_u64(in);
    p.seed = get_u64(in);
    const std::uint64_t kind = get_u64(in);
    if (kind > static_cast<std::uint64_t>(ModelKind::SIOU)) throw std::runtime_error("SIDX1 model kind out of range");
    p.model.kind = static_cast<ModelKind>(kind);
    p.model.H = get_f64(in);
    p.model.sigma = get_f64(in);
    p.model.gamma = get_f64(in);
    for (std::uint64_t s = 0; s < n; ++s) {
        const bool empty = get_u64(in) != 0;
        Point c(dim);
        for (int i = 0; i < dim; ++i) c[i] = get_f64(in);
        p.sets.push_back(empty ? Rect::empty_set(dim) : Rect(c));
    }
    p.values.resize(n * p.replicates);
    for (double& v : p.values) v = get_f64(in);
    p.rebuild_index();
    return p;
}

} // namespace sigp
