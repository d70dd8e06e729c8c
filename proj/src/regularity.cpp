#include "sigp/regularity.hpp"

#include "sigp/rng.hpp"
#include "sigp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace sigp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Chain sets are built to sit exactly at distance rho; rounding may put them
// a hair outside, so ball membership allows a relative slack.
constexpr double kBallSlack = 1e-9;

bool in_ball(double d, double rho) { return d <= rho * (1.0 + kBallSlack); }

} // namespace

std::string metric_name(Metric m) { return m == Metric::Dm ? "dm" : "hausdorff"; }

Metric parse_metric(const std::string& name) {
    if (name == "dm" || name == "d_m") return Metric::Dm;
    if (name == "hausdorff" || name == "dh" || name == "d_H") return Metric::Hausdorff;
    throw std::invalid_argument("unknown metric '" + name + "' (expected dm or hausdorff)");
}

double distance(Metric m, const Rect& u, const Rect& v) { return m == Metric::Dm ? d_m(u, v) : d_hausdorff(u, v); }

void ScalePlan::validate() const {
    if (center.empty()) throw std::invalid_argument("scale plan centre must be non-empty");
    if (radii.empty()) throw std::invalid_argument("scale plan has no radii");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0)) throw std::invalid_argument("radii must be positive");
        if (j > 0 && !(radii[j] < radii[j - 1])) throw std::invalid_argument("radii must be strictly decreasing");
    }
    if (pairBudget < 16) throw std::invalid_argument("pairBudget must be at least 16");
}

ScalePlan dyadic_plan(const Rect& center, int jmin, int jmax, int pairBudget, Metric metric) {
    ScalePlan p;
    p.center = center;
    p.pairBudget = pairBudget;
    p.metric = metric;
    for (int j = jmin; j <= jmax; ++j) p.radii.push_back(std::ldexp(1.0, -j));
    p.validate();
    return p;
}

ScalePlan geometric_plan(const Rect& center, double rhoMax, double rhoMin, int count, Metric metric) {
    if (count < 2 || !(rhoMin > 0.0) || !(rhoMax > rhoMin)) throw std::invalid_argument("bad geometric plan");
    ScalePlan p;
    p.center = center;
    p.metric = metric;
    const double ratio = std::log(rhoMin / rhoMax) / (count - 1);
    for (int j = 0; j < count; ++j) p.radii.push_back(rhoMax * std::exp(ratio * j));
    p.radii.back() = rhoMin;
    p.validate();
    return p;
}

std::size_t LocalDesign::ball_size(double rho) const {
    std::size_t n = 0;
    while (n < dist.size() && in_ball(dist[n], rho)) ++n;
    return n;
}

namespace {

std::vector<double> usable_radii(const ScalePlan& plan) {
    std::vector<double> out;
    for (double r : plan.radii)
        if (plan.gridStep <= 0.0 || r >= 4.0 * plan.gridStep) out.push_back(r);
    return out;
}

std::optional<Rect> shrunk(const Rect& u0, double rho, Metric metric) {
    const int n = u0.dim();
    Point c = u0.corner();
    if (metric == Metric::Hausdorff) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            moved = moved || c[i] >= rho;
            c[i] = std::max(0.0, c[i] - rho);
        }
        if (!moved) return std::nullopt;
        return Rect(c);
    }
    const double m0 = rect_measure(u0);
    if (!(m0 > rho)) return std::nullopt;
    const double f = std::pow((m0 - rho) / m0, 1.0 / n);
    for (int i = 0; i < n; ++i) c[i] *= f;
    return Rect(c);
}

std::optional<Rect> grown(const Rect& u0, double rho, Metric metric) {
    const int n = u0.dim();
    Point c = u0.corner();
    if (metric == Metric::Hausdorff) {
        bool moved = false;
        for (int i = 0; i < n; ++i) {
            moved = moved || c[i] + rho <= 1.0;
            c[i] = std::min(1.0, c[i] + rho);
        }
        if (!moved) return std::nullopt;
        return Rect(c);
    }
    const double m0 = rect_measure(u0);
    if (!(m0 > 0.0) || m0 + rho > 1.0) return std::nullopt;
    const double f = std::pow((m0 + rho) / m0, 1.0 / n);
    bool fits = true;
    for (int i = 0; i < n; ++i) fits = fits && c[i] * f <= 1.0;
    if (fits) {
        for (int i = 0; i < n; ++i) c[i] *= f;
        return Rect(c);
    }
    // Grow one coordinate at a time, most room first.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return c[a] < c[b]; });
    double need = rho;
    for (int i : order) {
        if (need <= 0.0) break;
        const double others = rect_measure(Rect(c)) / c[i];
        const double room = (1.0 - c[i]) * others;
        const double take = std::min(room, need);
        c[i] = std::min(1.0, c[i] + take / others);
        need -= take;
    }
    if (need > 1e-15 * rho) return std::nullopt;
    return Rect(c);
}

class DesignBuilder {
public:
    DesignBuilder(const Rect& center, Metric metric) : center_(center), metric_(metric) { add(center); }

    bool add(const Rect& r) {
        if (r.empty() || r.dim() != center_.dim()) return false;
        if (!seen_.insert(r).second) return false;
        sets_.push_back(r);
        return true;
    }

    LocalDesign finish() {
        LocalDesign d;
        d.center = center_;
        d.metric = metric_;
        std::vector<double> dist(sets_.size());
        for (std::size_t i = 0; i < sets_.size(); ++i) dist[i] = distance(metric_, center_, sets_[i]);
        std::vector<std::size_t> idx(sets_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return rect_less(sets_[a], sets_[b]);
        });
        for (std::size_t i : idx) {
            d.sets.push_back(sets_[i]);
            d.dist.push_back(dist[i]);
        }
        return d;
    }

    std::size_t size() const { return sets_.size(); }

private:
    Rect center_;
    Metric metric_;
    std::vector<Rect> sets_;
    std::unordered_set<Rect, RectHash> seen_;
};

} // namespace

LocalDesign build_local_design(const ScalePlan& plan, std::uint64_t seed) {
    plan.validate();
    const Rect& u0 = plan.center;
    const int n = u0.dim();
    const CounterRng rng(seed, Stream::Design);
    DesignBuilder b(u0, plan.metric);

    for (std::size_t j = 0; j < plan.radii.size(); ++j) {
        const double rho = plan.radii[j];
        const std::size_t before = b.size();
        auto budget_left = [&] { return static_cast<std::size_t>(plan.pairBudget) > b.size() - before; };

        if (auto s = shrunk(u0, rho, plan.metric)) b.add(*s);
        if (auto g = grown(u0, rho, plan.metric)) b.add(*g);

        // Dyadic neighbours: each coordinate rounded down or up on the level grid.
        const double want = plan.metric == Metric::Dm ? n / rho : 1.0 / rho;
        const int level = std::min(52, std::max(0, static_cast<int>(std::ceil(std::log2(want)))));
        const double scale = std::ldexp(1.0, level);
        for (int mask = 0; mask < (1 << n) && budget_left(); ++mask) {
            Point c(n);
            for (int i = 0; i < n; ++i) {
                const double y = u0[i] * scale;
                c[i] = std::min(1.0, ((mask >> i) & 1 ? std::ceil(y) : std::floor(y)) / scale);
            }
            const Rect r(c);
            if (in_ball(distance(plan.metric, u0, r), rho)) b.add(r);
        }

        // Random corners in a box that contains the ball, kept if inside it.
        std::vector<double> halfWidth(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double w = rho;
            if (plan.metric == Metric::Dm) {
                double others = 1.0;
                for (int k = 0; k < n; ++k)
                    if (k != i) others *= u0[k];
                w = others > 0.0 ? rho / others : 1.0;
            }
            halfWidth[static_cast<std::size_t>(i)] = std::min(1.0, w);
        }
        std::uint64_t draw = 0;
        const std::uint64_t maxDraws = 40ull * static_cast<std::uint64_t>(plan.pairBudget) * static_cast<std::uint64_t>(n);
        while (budget_left() && draw < maxDraws) {
            Point c(n);
            for (int i = 0; i < n; ++i) {
                const double u = rng.uniform(j, draw++);
                c[i] = std::clamp(u0[i] + (2.0 * u - 1.0) * halfWidth[static_cast<std::size_t>(i)], 0.0, 1.0);
            }
            const Rect r(c);
            if (in_ball(distance(plan.metric, u0, r), rho)) b.add(r);
        }
        if (b.size() > kLocalDesignCap)
            throw std::length_error("local design exceeds " + std::to_string(kLocalDesignCap) + " sets");
    }
    return b.finish();
}

LocalDesign build_chain_design(const ScalePlan& plan) {
    plan.validate();
    DesignBuilder b(plan.center, plan.metric);
    for (double rho : plan.radii) {
        if (auto s = shrunk(plan.center, rho, plan.metric)) b.add(*s);
        if (auto g = grown(plan.center, rho, plan.metric)) b.add(*g);
    }
    return b.finish();
}

namespace {

struct BallOrder {
    std::vector<std::size_t> order;  // path set indices sorted by distance to u0
    std::vector<std::size_t> prefix; // per radius, number of sets in the ball
};

BallOrder ball_order(const SamplePath& path, const Rect& u0, std::span<const double> radii, Metric metric) {
    BallOrder b;
    std::vector<double> dist(path.sets.size());
    for (std::size_t i = 0; i < path.sets.size(); ++i)
        dist[i] = path.sets[i].empty() ? kInf : distance(metric, u0, path.sets[i]);
    b.order.resize(path.sets.size());
    std::iota(b.order.begin(), b.order.end(), 0);
    std::stable_sort(b.order.begin(), b.order.end(), [&](std::size_t a, std::size_t c) { return dist[a] < dist[c]; });
    for (double rho : radii) {
        std::size_t n = 0;
        while (n < b.order.size() && in_ball(dist[b.order[n]], rho)) ++n;
        if (n < 2)
            throw std::invalid_argument("fewer than 2 sets in the ball of radius " + std::to_string(rho));
        b.prefix.push_back(n);
    }
    return b;
}

struct NestedPair {
    std::size_t a, b;    // path indices
    std::size_t enters;  // prefix length at which both are in the ball
};

std::vector<NestedPair> nested_pairs(const SamplePath& path, const BallOrder& bo, std::size_t limit) {
    std::vector<NestedPair> pairs;
    for (std::size_t j = 1; j < limit; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const Rect& u = path.sets[bo.order[i]];
            const Rect& v = path.sets[bo.order[j]];
            if (u == v) continue;
            if (u.subset_of(v) || v.subset_of(u)) pairs.push_back({bo.order[i], bo.order[j], j + 1});
        }
    return pairs;
}

} // namespace

std::vector<std::vector<double>> oscillation_profile(const SamplePath& path, const Rect& u0,
                                                     std::span<const double> radii, Metric metric, bool ordered) {
    const BallOrder bo = ball_order(path, u0, radii, metric);
    const std::size_t limit = *std::max_element(bo.prefix.begin(), bo.prefix.end());
    std::vector<std::vector<double>> out(path.replicates, std::vector<double>(radii.size(), 0.0));

    // Radii are processed in order of increasing prefix length.
    std::vector<std::size_t> byPrefix(radii.size());
    std::iota(byPrefix.begin(), byPrefix.end(), 0);
    std::sort(byPrefix.begin(), byPrefix.end(), [&](std::size_t a, std::size_t b) { return bo.prefix[a] < bo.prefix[b]; });

    if (!ordered) {
        for (std::size_t r = 0; r < path.replicates; ++r) {
            double lo = kInf, hi = -kInf;
            std::size_t k = 0;
            for (std::size_t p = 0; p < limit; ++p) {
                const double x = path.value(r, bo.order[p]);
                lo = std::min(lo, x);
                hi = std::max(hi, x);
                while (k < byPrefix.size() && bo.prefix[byPrefix[k]] == p + 1) out[r][byPrefix[k++]] = hi - lo;
            }
        }
        return out;
    }

    const auto pairs = nested_pairs(path, bo, limit);
    for (std::size_t r = 0; r < path.replicates; ++r) {
        double best = 0.0;
        std::size_t k = 0, q = 0;
        for (std::size_t len = 1; len <= limit; ++len) {
            while (q < pairs.size() && pairs[q].enters == len) {
                best = std::max(best, std::abs(path.value(r, pairs[q].a) - path.value(r, pairs[q].b)));
                ++q;
            }
            while (k < byPrefix.size() && bo.prefix[byPrefix[k]] == len) out[r][byPrefix[k++]] = best;
        }
    }
    return out;
}

std::vector<double> oscillation(const SamplePath& path, const Rect& u0, double rho, Metric metric, bool ordered) {
    const double radii[] = {rho};
    const auto prof = oscillation_profile(path, u0, radii, metric, ordered);
    std::vector<double> out(prof.size());
    for (std::size_t r = 0; r < prof.size(); ++r) out[r] = prof[r][0];
    return out;
}

std::string kind_name(ExponentKind k) {
    switch (k) {
    case ExponentKind::Pointwise: return "pointwise";
    case ExponentKind::Local: return "local";
    case ExponentKind::PointwiseC: return "pointwiseC";
    case ExponentKind::LocalC: return "localC";
    case ExponentKind::Pc: return "pc";
    case ExponentKind::DetPointwise: return "detPointwise";
    case ExponentKind::DetLocal: return "detLocal";
    case ExponentKind::DetPc: return "detPc";
    }
    return "unknown";
}

ExponentKind parse_kind(const std::string& name) {
    for (auto k : {ExponentKind::Pointwise, ExponentKind::Local, ExponentKind::PointwiseC, ExponentKind::LocalC,
                   ExponentKind::Pc, ExponentKind::DetPointwise, ExponentKind::DetLocal, ExponentKind::DetPc})
        if (kind_name(k) == name) return k;
    throw std::invalid_argument("unknown exponent kind '" + name + "'");
}

namespace {

void aggregate(ExponentReport& rep, const std::vector<double>& r2s) {
    std::vector<double> valid;
    for (double v : rep.perReplicate)
        if (std::isfinite(v)) valid.push_back(v);
    rep.replicatesUsed = valid.size();
    if (valid.empty()) {
        rep.degenerate = true;
        rep.estimate = kInf;
        rep.regressionR2 = 0.0;
        return;
    }
    rep.estimate = median(valid);
    rep.regressionR2 = r2s.empty() ? 1.0 : median(r2s);
}

ExponentReport pointwise_from_profile(const std::vector<std::vector<double>>& prof, std::span<const double> radii,
                                      ExponentKind kind) {
    ExponentReport rep;
    rep.kind = kind;
    rep.rhoMax = radii.front();
    rep.rhoMin = radii.back();
    std::vector<double> r2s;
    for (const auto& row : prof) {
        std::vector<double> x, y;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            if (row[j] > 0.0) {
                x.push_back(std::log(radii[j]));
                y.push_back(std::log(row[j]));
            } else {
                ++rep.zeroExcluded;
            }
        }
        if (x.size() < 4) {
            rep.perReplicate.push_back(kNaN);
            continue;
        }
        const auto fit = least_squares(x, y);
        rep.perReplicate.push_back(fit.slope);
        r2s.push_back(fit.r2);
    }
    aggregate(rep, r2s);
    return rep;
}

ExponentReport local_min_ratio(const SamplePath& path, const Rect& u0, const ScalePlan& plan,
                               std::span<const double> radii, bool ordered, ExponentKind kind) {
    const double rhoMin = radii.back();
    const double radius[] = {rhoMin};
    const BallOrder bo = ball_order(path, u0, radius, plan.metric);
    const std::size_t n = bo.prefix[0];

    struct Pair {
        std::size_t a, b;
        double logD;
    };
    std::vector<Pair> pairs;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const Rect& u = path.sets[bo.order[i]];
            const Rect& v = path.sets[bo.order[j]];
            if (ordered && !(u.subset_of(v) || v.subset_of(u))) continue;
            const double d = distance(plan.metric, u, v);
            if (d < rhoMin * 1e-3 || d >= 1.0) continue;
            pairs.push_back({bo.order[i], bo.order[j], std::log(d)});
        }

    ExponentReport rep;
    rep.kind = kind;
    rep.rhoMin = rhoMin;
    rep.rhoMax = rhoMin;
    rep.pairsUsed = pairs.size();
    for (std::size_t r = 0; r < path.replicates; ++r) {
        double best = kInf;
        for (const auto& p : pairs) {
            const double dx = std::abs(path.value(r, p.a) - path.value(r, p.b));
            if (dx == 0.0) {
                ++rep.zeroExcluded;
                continue;
            }
            best = std::min(best, std::log(dx) / p.logD);
        }
        rep.perReplicate.push_back(std::isfinite(best) ? best : kNaN);
    }
    aggregate(rep, {});
    return rep;
}

std::vector<double> checked_radii(const ScalePlan& plan) {
    plan.validate();
    auto radii = usable_radii(plan);
    if (radii.size() < 4) throw std::invalid_argument("at least 4 usable radii are needed");
    return radii;
}

std::size_t pair_count(std::size_t n) { return n * (n - 1) / 2; }

} // namespace

ExponentReport estimate_pointwise(const SamplePath& path, const Rect& u0, const ScalePlan& plan) {
    const auto radii = checked_radii(plan);
    const auto prof = oscillation_profile(path, u0, radii, plan.metric, false);
    auto rep = pointwise_from_profile(prof, radii, ExponentKind::Pointwise);
    rep.pairsUsed = pair_count(ball_order(path, u0, std::span<const double>(radii).first(1), plan.metric).prefix[0]);
    rep.target = theoretical_target(path.model, rep.kind, u0.dim());
    return rep;
}

ExponentReport estimate_local(const SamplePath& path, const Rect& u0, const ScalePlan& plan) {
    const auto radii = checked_radii(plan);
    auto rep = local_min_ratio(path, u0, plan, radii, false, ExponentKind::Local);
    rep.target = theoretical_target(path.model, rep.kind, u0.dim());
    return rep;
}

std::pair<ExponentReport, ExponentReport> estimate_C_exponents(const SamplePath& path, const Rect& u0,
                                                               const ScalePlan& plan) {
    const auto radii = checked_radii(plan);
    const auto prof = oscillation_profile(path, u0, radii, plan.metric, true);
    auto pw = pointwise_from_profile(prof, radii, ExponentKind::PointwiseC);
    const BallOrder bo = ball_order(path, u0, std::span<const double>(radii).first(1), plan.metric);
    pw.pairsUsed = nested_pairs(path, bo, bo.prefix[0]).size();
    auto loc = local_min_ratio(path, u0, plan, radii, true, ExponentKind::LocalC);
    pw.target = theoretical_target(path.model, pw.kind, u0.dim());
    loc.target = theoretical_target(path.model, loc.kind, u0.dim());
    return {pw, loc};
}

std::vector<Rect> pc_family(const Point& t, std::span<const int> levels) {
    std::vector<Rect> out;
    std::unordered_set<Rect, RectHash> seen;
    for (int n : levels)
        for (const auto& r : closure_sets(left_neighbourhood(t, n)))
            if (seen.insert(r).second) out.push_back(r);
    return out;
}

namespace {

void check_levels(std::span<const int> levels) {
    if (levels.size() < 3) throw std::invalid_argument("at least 3 levels are needed");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] < 0 || levels[i] > 40) throw std::invalid_argument("levels must lie in [0, 40]");
        if (i > 0 && levels[i] <= levels[i - 1]) throw std::invalid_argument("levels must be increasing");
    }
}

} // namespace

ExponentReport estimate_pc_on_path(const SamplePath& path, const Point& t, std::span<const int> levels) {
    check_levels(levels);
    ExponentReport rep;
    rep.kind = ExponentKind::Pc;
    std::vector<std::vector<double>> inc;
    std::vector<double> logM;
    for (int n : levels) {
        const CSet c = left_neighbourhood(t, n);
        inc.push_back(delta_increment(path, c));
        logM.push_back(std::log(measure_cset(c)));
    }
    rep.rhoMax = std::exp(logM.front());
    rep.rhoMin = std::exp(logM.back());
    rep.pairsUsed = levels.size();
    std::vector<double> r2s;
    for (std::size_t r = 0; r < path.replicates; ++r) {
        std::vector<double> x, y;
        for (std::size_t j = 0; j < levels.size(); ++j) {
            const double v = std::abs(inc[j][r]);
            if (v == 0.0) {
                ++rep.zeroExcluded;
                continue;
            }
            x.push_back(logM[j]);
            y.push_back(std::log(v));
        }
        if (x.size() < 3) {
            rep.perReplicate.push_back(kNaN);
            continue;
        }
        const auto fit = least_squares(x, y);
        rep.perReplicate.push_back(fit.slope);
        r2s.push_back(fit.r2);
    }
    aggregate(rep, r2s);
    if (rep.degenerate) throw std::runtime_error("pc estimate: fewer than 3 levels with non-zero increments");
    return rep;
}

ExponentReport estimate_pc(const CovModel& model, const Point& t, std::span<const int> levels,
                           const PcOptions& options) {
    check_levels(levels);
    const auto path = sample_paths(model, pc_family(t, levels), options.seed, options.replicates,
                                   {kDefaultCovCap, options.threads});
    auto rep = estimate_pc_on_path(path, t, levels);
    rep.target = theoretical_target(model, ExponentKind::Pc, t.dim());
    return rep;
}

std::pair<ExponentReport, ExponentReport> deterministic_exponents(const CovModel& model, const Rect& u0,
                                                                  const ScalePlan& plan) {
    const auto radii = checked_radii(plan);
    const LocalDesign d = build_chain_design(plan);

    ExponentReport pw;
    pw.kind = ExponentKind::DetPointwise;
    pw.rhoMax = radii.front();
    pw.rhoMin = radii.back();
    std::vector<double> x, y;
    for (double rho : radii) {
        const std::size_t n = d.ball_size(rho);
        double sup = 0.0;
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) sup = std::max(sup, increment_var(model, d.sets[i], d.sets[j]));
        if (sup <= 0.0) {
            ++pw.zeroExcluded;
            continue;
        }
        x.push_back(std::log(rho));
        y.push_back(0.5 * std::log(sup));
        pw.pairsUsed += pair_count(n);
    }
    if (x.size() < 4) throw std::invalid_argument("deterministic exponent: fewer than 4 radii with positive variance");
    const auto fit = least_squares(x, y);
    pw.estimate = fit.slope;
    pw.regressionR2 = fit.r2;
    pw.replicatesUsed = 1;
    pw.target = theoretical_target(model, pw.kind, u0.dim());

    ExponentReport loc;
    loc.kind = ExponentKind::DetLocal;
    loc.rhoMin = loc.rhoMax = radii.back();
    const std::size_t n = d.ball_size(radii.back());
    double best = kInf;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const double dist = distance(plan.metric, d.sets[i], d.sets[j]);
            const double v = increment_var(model, d.sets[i], d.sets[j]);
            if (dist < radii.back() * 1e-3 || dist >= 1.0 || v <= 0.0) continue;
            best = std::min(best, 0.5 * std::log(v) / std::log(dist));
            ++loc.pairsUsed;
        }
    loc.degenerate = !std::isfinite(best);
    loc.estimate = best;
    loc.replicatesUsed = 1;
    loc.target = theoretical_target(model, loc.kind, u0.dim());
    return {pw, loc};
}

ExponentReport deterministic_pc(const CovModel& model, const Point& t, std::span<const int> levels) {
    check_levels(levels);
    ExponentReport rep;
    rep.kind = ExponentKind::DetPc;
    std::vector<double> x, y;
    for (int n : levels) {
        const CSet c = left_neighbourhood(t, n);
        const double v = delta_variance(model, c);
        if (v <= 0.0) {
            ++rep.zeroExcluded;
            continue;
        }
        x.push_back(std::log(measure_cset(c)));
        y.push_back(0.5 * std::log(v));
    }
    if (x.size() < 3) throw std::runtime_error("deterministic pc: fewer than 3 levels with positive variance");
    const auto fit = least_squares(x, y);
    rep.estimate = fit.slope;
    rep.regressionR2 = fit.r2;
    rep.rhoMax = std::exp(x.front());
    rep.rhoMin = std::exp(x.back());
    rep.pairsUsed = x.size();
    rep.replicatesUsed = 1;
    rep.target = theoretical_target(model, rep.kind, t.dim());
    return rep;
}

std::optional<double> theoretical_target(const CovModel& model, ExponentKind kind, int dim) {
    if (kind == ExponentKind::Pc || kind == ExponentKind::DetPc) {
        // E[(Delta X_{C_n(t)})^2] ~ m(C_n)^{2H/N} for SIFBM; additive to first
        // order for SIBM and SIOU.
        if (model.kind == ModelKind::SIFBM) return model.H / std::max(1, dim);
        return 0.5;
    }
    return model.hurst();
}

double gaussian_even_moment(int p) {
    if (p < 0) throw std::invalid_argument("moment order must be non-negative");
    double m = 1.0;
    for (int k = 1; k <= p; ++k) m *= 2.0 * k - 1.0;
    return m;
}

namespace {

struct DesignPair {
    std::size_t a, b;
    double d;
};

std::vector<DesignPair> positive_pairs(std::span<const Rect> design, Metric metric) {
    std::vector<DesignPair> out;
    for (std::size_t j = 1; j < design.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const double d = distance(metric, design[i], design[j]);
            if (d > 0.0) out.push_back({i, j, d});
        }
    return out;
}

} // namespace

double fit_moment_exponent(const CovModel& model, std::span<const Rect> design, Metric metric, int alpha, double* r2,
                           double* logK) {
    if (alpha < 2 || alpha % 2 != 0) throw std::invalid_argument("alpha must be an even integer >= 2");
    const double logM = std::log(gaussian_even_moment(alpha / 2));
    std::vector<double> x, y;
    for (const auto& p : positive_pairs(design, metric)) {
        const double v = increment_var(model, design[p.a], design[p.b]);
        if (v <= 0.0) continue;
        x.push_back(std::log(p.d));
        y.push_back(logM + 0.5 * alpha * std::log(v));
    }
    if (x.size() < 2) throw std::invalid_argument("design has too few pairs with positive distance");
    const auto fit = least_squares(x, y);
    if (r2) *r2 = fit.r2;
    if (logK) *logK = fit.intercept;
    return fit.slope;
}

KolmogorovReport kolmogorov_harness(const CovModel& model, std::span<const Rect> design, Metric metric,
                                    const KolmogorovOptions& options) {
    if (options.alpha < 2 || options.alpha % 2 != 0) throw std::invalid_argument("alpha must be an even integer >= 2");
    if (!(options.q > 0.0)) throw std::invalid_argument("q must be positive");
    auto pairs = positive_pairs(design, metric);
    if (pairs.empty()) throw std::invalid_argument("design has no pairs with positive distance");
    std::sort(pairs.begin(), pairs.end(), [](const DesignPair& a, const DesignPair& b) { return a.d < b.d; });
    const double dMin = pairs.front().d, dMax = pairs.back().d;
    if (std::log2(dMax / dMin) < 3.0) throw std::invalid_argument("pair distances must span at least 3 dyadic decades");

    KolmogorovReport rep;
    rep.pairs = pairs.size();
    for (int alpha = options.alpha; alpha <= options.maxAlpha; alpha *= 2) {
        rep.alphasTried.push_back(alpha);
        rep.alpha = alpha;
        rep.s = fit_moment_exponent(model, design, metric, alpha, &rep.sR2, &rep.logK);
        rep.beta = rep.s - options.q;
        if (rep.beta > 0.0) {
            rep.applicable = true;
            break;
        }
    }
    if (!rep.applicable) {
        rep.note = "criterion inapplicable at this q";
        return rep;
    }
    rep.gammaMax = rep.beta / rep.alpha;
    rep.gamma = options.gammaFraction * rep.gammaMax;
    rep.hFloor = 8.0 * dMin;
    if (!options.verifyPaths) return rep;

    const auto path = sample_paths(model, std::vector<Rect>(design.begin(), design.end()), options.seed,
                                   options.replicates, {kDefaultCovCap, options.threads});
    std::vector<double> scale(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) scale[k] = std::pow(pairs[k].d, -rep.gamma);

    // Thresholds h = 2^-k down to hFloor; count[k] = pairs with d <= h.
    std::vector<double> thresholds;
    std::vector<std::size_t> counts;
    for (double h = 1.0; h >= rep.hFloor * 0.5; h *= 0.5) {
        thresholds.push_back(h);
        counts.push_back(static_cast<std::size_t>(
            std::upper_bound(pairs.begin(), pairs.end(), h, [](double v, const DesignPair& p) { return v < p.d; }) -
            pairs.begin()));
    }

    rep.replicates = options.replicates;
    rep.hStar.assign(options.replicates, 0.0);
    for (std::size_t r = 0; r < options.replicates; ++r) {
        std::vector<double> prefixMax(pairs.size());
        double m = 0.0;
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            m = std::max(m, std::abs(path.value(r, pairs[k].a) - path.value(r, pairs[k].b)) * scale[k]);
            prefixMax[k] = m;
        }
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            const std::size_t c = counts[k];
            if (c == 0 || prefixMax[c - 1] <= options.L) {
                rep.hStar[r] = thresholds[k];
                break;
            }
        }
        if (rep.hStar[r] >= rep.hFloor) ++rep.passed;
    }
    rep.passRate = static_cast<double>(rep.passed) / static_cast<double>(options.replicates);
    return rep;
}

} // namespace sigp
