#include "sigp/flows.hpp"

#include "sigp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigp {

ElementaryFlow::ElementaryFlow(std::vector<FlowBreakpoint> breakpoints) : bp_(std::move(breakpoints)) {
    if (bp_.size() < 2) throw std::invalid_argument("an elementary flow needs at least two breakpoints");
    const int dim = bp_.front().corner.dim();
    for (std::size_t k = 0; k < bp_.size(); ++k) {
        const auto& b = bp_[k];
        if (b.corner.dim() != dim) throw std::invalid_argument("flow breakpoints differ in dimension");
        for (int i = 0; i < dim; ++i)
            if (!(b.corner[i] >= 0.0 && b.corner[i] <= 1.0))
                throw std::invalid_argument("flow corner coordinates must lie in [0,1]");
        if (k == 0) continue;
        const auto& a = bp_[k - 1];
        if (!(b.t > a.t)) throw std::invalid_argument("flow breakpoint times must be strictly increasing");
        for (int i = 0; i < dim; ++i)
            if (b.corner[i] < a.corner[i]) throw std::invalid_argument("flow corners must be non-decreasing");
    }
}

Point ElementaryFlow::corner_at(double t) const {
    if (!(t >= t_min() && t <= t_max())) throw std::out_of_range("time outside the flow domain");
    auto it = std::lower_bound(bp_.begin(), bp_.end(), t, [](const FlowBreakpoint& b, double x) { return b.t < x; });
    if (it->t == t) return it->corner;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (t - a.t) / (b.t - a.t);
    Point c(a.corner.dim());
    for (int i = 0; i < c.dim(); ++i) c[i] = std::clamp(a.corner[i] + w * (b.corner[i] - a.corner[i]), a.corner[i], b.corner[i]);
    return c;
}

double ElementaryFlow::theta(double t) const {
    const Point c = corner_at(t);
    double m = 1.0;
    for (int i = 0; i < c.dim(); ++i) m *= c[i];
    return m;
}

namespace {

template <class Theta>
double bisect_inverse(const Theta& th, double lo, double hi, double s) {
    // Invariant: th(lo) < s <= th(hi).
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (th(mid) >= s)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace

double ElementaryFlow::theta_inverse(double s) const {
    const double lo = theta_min(), hi = theta_max();
    if (!(s >= lo - 1e-15 && s <= hi + 1e-15)) throw std::out_of_range("value outside the range of theta");
    if (s <= lo) return t_min();
    std::size_t k = 1;
    while (k < bp_.size() && theta(bp_[k].t) < s) ++k;
    if (k == bp_.size()) return t_max();
    return bisect_inverse([this](double x) { return theta(x); }, bp_[k - 1].t, bp_[k].t, s);
}

SimpleFlow::SimpleFlow(std::vector<ElementaryFlow> segments) : seg_(std::move(segments)) {
    if (seg_.empty()) throw std::invalid_argument("a simple flow needs at least one segment");
    std::vector<Rect> acc;
    for (std::size_t i = 0; i < seg_.size(); ++i) {
        if (seg_[i].dim() != seg_.front().dim()) throw std::invalid_argument("flow segments differ in dimension");
        if (i == 0) {
            acc.push_back(seg_[0].set_at(seg_[0].t_max()));
            continue;
        }
        if (seg_[i].t_min() != seg_[i - 1].t_max()) throw std::invalid_argument("flow segments must be contiguous in time");
        // Continuity: the new segment must start inside what is already covered.
        const Rect start = seg_[i].set_at(seg_[i].t_min());
        const bool covered = std::any_of(acc.begin(), acc.end(), [&](const Rect& r) { return start.subset_of(r); });
        if (!covered) throw std::invalid_argument("flow segment does not start inside the accumulated union");
        acc.push_back(seg_[i].set_at(seg_[i].t_max()));
    }
}

std::size_t SimpleFlow::segment_for(double t) const {
    if (!(t >= t_min() && t <= t_max())) throw std::out_of_range("time outside the flow domain");
    for (std::size_t i = 0; i < seg_.size(); ++i)
        if (t <= seg_[i].t_max()) return i;
    return seg_.size() - 1;
}

std::vector<Rect> SimpleFlow::sets_at(double t) const {
    const std::size_t i = segment_for(t);
    std::vector<Rect> out;
    for (std::size_t j = 0; j < i; ++j) out.push_back(seg_[j].set_at(seg_[j].t_max()));
    out.push_back(seg_[i].set_at(t));
    return out;
}

double SimpleFlow::theta(double t) const {
    const auto sets = sets_at(t);
    return measure_union(sets);
}

double SimpleFlow::theta_inverse(double s) const {
    const double lo = theta(t_min()), hi = theta_max();
    if (!(s >= lo - 1e-15 && s <= hi + 1e-15)) throw std::out_of_range("value outside the range of theta");
    if (s <= lo) return t_min();
    std::size_t i = 0;
    while (i + 1 < seg_.size() && theta(seg_[i].t_max()) < s) ++i;
    const double a = seg_[i].t_min();
    if (theta(a) >= s) return a;
    return bisect_inverse([this](double x) { return theta(x); }, a, seg_[i].t_max(), s);
}

double theta(const ElementaryFlow& flow, double t) { return flow.theta(t); }
double theta_inverse(const ElementaryFlow& flow, double s) { return flow.theta_inverse(s); }

std::vector<Rect> projected_sets(const ElementaryFlow& flow, std::span<const double> times) {
    std::vector<Rect> out;
    out.reserve(times.size());
    for (double s : times) out.push_back(flow.set_at(flow.theta_inverse(s)));
    return out;
}

double projected_cov(const CovModel& model, const ElementaryFlow& flow, double s, double t) {
    return cov(model, flow.set_at(flow.theta_inverse(s)), flow.set_at(flow.theta_inverse(t)));
}

std::vector<LinearTerm> projected_terms(const SimpleFlow& flow, double s) {
    const auto sets = flow.sets_at(flow.theta_inverse(s));
    return union_terms(sets);
}

double projected_cov(const CovModel& model, const SimpleFlow& flow, double s, double t) {
    const auto a = projected_terms(flow, s);
    const auto b = projected_terms(flow, t);
    double c = 0.0;
    for (const auto& x : a)
        for (const auto& y : b) c += x.coef * y.coef * cov(model, x.set, y.set);
    return c;
}

double fbm_cov(double H, double s, double t) {
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("fbm_cov needs H in (0,1)");
    if (s < 0.0 || t < 0.0) throw std::invalid_argument("fbm_cov needs non-negative times");
    const double twoH = 2.0 * H;
    auto p = [twoH](double x) { return x > 0.0 ? std::pow(x, twoH) : 0.0; };
    return 0.5 * (p(s) + p(t) - p(std::abs(t - s)));
}

ElementaryFlow random_elementary_flow(int dim, int segments, std::uint64_t seed, std::uint64_t index) {
    if (segments < 1) throw std::invalid_argument("a flow needs at least one segment");
    const CounterRng rng(seed, Stream::Design);
    std::uint64_t draw = 0;
    auto u = [&] { return rng.uniform(index, draw++); };

    // Random positive increments per coordinate, normalized so each
    // coordinate ends in [0.5, 1].
    std::vector<std::vector<double>> inc(static_cast<std::size_t>(dim), std::vector<double>(static_cast<std::size_t>(segments)));
    std::vector<double> target(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        target[static_cast<std::size_t>(i)] = 0.5 + 0.5 * u();
        double total = 0.0;
        for (int k = 0; k < segments; ++k) total += inc[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = u();
        for (auto& x : inc[static_cast<std::size_t>(i)]) x *= target[static_cast<std::size_t>(i)] / total;
    }
    std::vector<double> times(static_cast<std::size_t>(segments) + 1, 0.0);
    for (int k = 1; k < segments; ++k) times[static_cast<std::size_t>(k)] = u();
    times.back() = 1.0;
    std::sort(times.begin() + 1, times.end() - 1);

    std::vector<FlowBreakpoint> bp;
    Point c(dim);
    bp.push_back({0.0, c});
    for (int k = 0; k < segments; ++k) {
        for (int i = 0; i < dim; ++i) c[i] = std::min(1.0, c[i] + inc[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        double t = times[static_cast<std::size_t>(k) + 1];
        if (!(t > bp.back().t)) t = std::nextafter(bp.back().t, 2.0);
        bp.push_back({t, c});
    }
    bp.back().t = std::max(bp.back().t, 1.0);
    return ElementaryFlow(std::move(bp));
}

ElementaryFlow linear_flow(int dim) {
    Point a(dim), b(dim);
    for (int i = 1; i < dim; ++i) a[i] = b[i] = 1.0;
    b[0] = 1.0;
    return ElementaryFlow({{0.0, a}, {1.0, b}});
}

} // namespace sigp
