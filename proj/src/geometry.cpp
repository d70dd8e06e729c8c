#include "sigp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sigp {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
}

void check_same_dim(const Rect& u, const Rect& v) {
    if (u.dim() != v.dim()) throw std::invalid_argument("rectangles of different dimension");
}

} // namespace

Point::Point(int dim) : dim_(dim) { check_dim(dim); }

Point::Point(std::initializer_list<double> coords)
    : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
    check_dim(dim_);
    std::copy(coords.begin(), coords.end(), c_.begin());
}

bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
        if (a[i] != b[i]) return false;
    return true;
}

Rect::Rect(Point corner) : corner_(corner) {
    for (int i = 0; i < corner_.dim(); ++i) {
        const double x = corner_[i];
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("rectangle corner must lie in [0,1]^N");
    }
}

Rect Rect::empty_set(int dim) {
    Rect r{Point(dim)};
    r.empty_ = true;
    return r;
}

bool Rect::subset_of(const Rect& other) const noexcept {
    if (empty_) return true;
    if (other.empty_) return false;
    for (int i = 0; i < dim(); ++i)
        if (corner_[i] > other.corner_[i]) return false;
    return true;
}

bool operator==(const Rect& a, const Rect& b) noexcept {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_ && a.dim() == b.dim();
    return a.corner_ == b.corner_;
}

std::size_t RectHash::operator()(const Rect& r) const noexcept {
    std::size_t h = r.empty() ? 0x9e3779b97f4a7c15ULL : 0;
    for (double x : r.corner().coords())
        h ^= std::hash<double>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

bool rect_less(const Rect& a, const Rect& b) noexcept {
    if (a.empty() != b.empty()) return a.empty();
    if (a.dim() != b.dim()) return a.dim() < b.dim();
    return std::lexicographical_compare(a.corner().coords().begin(), a.corner().coords().end(),
                                        b.corner().coords().begin(), b.corner().coords().end());
}

double DyadicLevel::step() const noexcept { return std::ldexp(1.0, -n); }

std::uint64_t DyadicLevel::cardinality() const {
    if (n > 40) throw std::out_of_range("dyadic level too deep");
    std::uint64_t side = (std::uint64_t{1} << n) + 1;
    std::uint64_t k = 1;
    for (int i = 0; i < dim; ++i) {
        if (k > std::numeric_limits<std::uint64_t>::max() / side) throw std::out_of_range("k_n overflows");
        k *= side;
    }
    return k;
}

double rect_measure(const Rect& u) noexcept {
    if (u.empty()) return 0.0;
    double m = 1.0;
    for (double x : u.corner().coords()) m *= x;
    return m;
}

Rect rect_intersect(const Rect& u, const Rect& v) noexcept {
    if (u.empty()) return u;
    if (v.empty()) return v;
    Point c(u.dim());
    for (int i = 0; i < u.dim(); ++i) c[i] = std::min(u[i], v[i]);
    return Rect(c);
}

namespace {

// Depth-first over subsets; an intersection of measure zero kills every
// superset, so those branches are pruned.
void inclusion_exclusion(std::span<const Rect> rects, std::size_t next, const Point& corner, int sign,
                         double& sum) {
    for (std::size_t j = next; j < rects.size(); ++j) {
        if (rects[j].empty()) continue;
        Point c(corner.dim());
        double m = 1.0;
        for (int i = 0; i < corner.dim(); ++i) {
            c[i] = std::min(corner[i], rects[j][i]);
            m *= c[i];
        }
        if (m == 0.0) continue;
        sum += -sign * m;
        inclusion_exclusion(rects, j + 1, c, -sign, sum);
    }
}

} // namespace

double measure_union_inclusion_exclusion(std::span<const Rect> rects) {
    if (rects.size() > kInclusionExclusionLimit)
        throw std::out_of_range("inclusion-exclusion limited to " + std::to_string(kInclusionExclusionLimit) +
                                " sets");
    if (rects.empty()) return 0.0;
    const int dim = rects.front().dim();
    Point ones(dim);
    for (int i = 0; i < dim; ++i) ones[i] = 1.0;
    double sum = 0.0;
    inclusion_exclusion(rects, 0, ones, -1, sum);
    return sum;
}

double measure_union_sweep(std::span<const Rect> rects) {
    std::vector<Rect> live;
    for (const auto& r : rects)
        if (!r.empty() && rect_measure(r) > 0.0) live.push_back(r);
    if (live.empty()) return 0.0;
    const int dim = live.front().dim();

    // Distinct coordinates per axis, with 0 prepended; cell a on axis i spans
    // [xs[i][a], xs[i][a+1]].
    std::vector<std::vector<double>> xs(static_cast<std::size_t>(dim));
    std::size_t cells = 1;
    for (int i = 0; i < dim; ++i) {
        auto& x = xs[static_cast<std::size_t>(i)];
        x.push_back(0.0);
        for (const auto& r : live) x.push_back(r[i]);
        std::sort(x.begin(), x.end());
        x.erase(std::unique(x.begin(), x.end()), x.end());
        cells *= x.size() - 1;
        if (cells > (std::size_t{1} << 26)) throw std::out_of_range("sweep grid too large");
    }

    std::vector<std::size_t> extent(static_cast<std::size_t>(dim)), stride(static_cast<std::size_t>(dim));
    std::size_t s = 1;
    for (int i = dim - 1; i >= 0; --i) {
        extent[static_cast<std::size_t>(i)] = xs[static_cast<std::size_t>(i)].size() - 1;
        stride[static_cast<std::size_t>(i)] = s;
        s *= extent[static_cast<std::size_t>(i)];
    }

    // A cell is covered iff some corner dominates its upper vertex. Mark the
    // cell whose upper vertex equals each corner, then propagate downwards
    // along every axis (suffix OR).
    std::vector<std::uint8_t> covered(cells, 0);
    for (const auto& r : live) {
        std::size_t idx = 0;
        for (int i = 0; i < dim; ++i) {
            const auto& x = xs[static_cast<std::size_t>(i)];
            auto a = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), r[i]) - x.begin());
            idx += (a - 1) * stride[static_cast<std::size_t>(i)];
        }
        covered[idx] = 1;
    }
    for (int i = 0; i < dim; ++i) {
        const std::size_t st = stride[static_cast<std::size_t>(i)];
        const std::size_t ext = extent[static_cast<std::size_t>(i)];
        for (std::size_t idx = cells; idx-- > 0;) {
            const std::size_t a = (idx / st) % ext;
            if (a + 1 < ext && covered[idx + st]) covered[idx] = 1;
        }
    }

    double total = 0.0;
    for (std::size_t idx = 0; idx < cells; ++idx) {
        if (!covered[idx]) continue;
        double vol = 1.0;
        for (int i = 0; i < dim; ++i) {
            const auto& x = xs[static_cast<std::size_t>(i)];
            const std::size_t a = (idx / stride[static_cast<std::size_t>(i)]) % extent[static_cast<std::size_t>(i)];
            vol *= x[a + 1] - x[a];
        }
        total += vol;
    }
    return total;
}

double measure_union(std::span<const Rect> rects) {
    if (rects.size() <= kInclusionExclusionLimit) return measure_union_inclusion_exclusion(rects);
    return measure_union_sweep(rects);
}

CSet canonical(const CSet& c) {
    CSet out{c.base, {}};
    if (c.base.empty()) return out;
    std::vector<Rect> clipped;
    clipped.reserve(c.sub.size());
    for (const auto& v : c.sub) {
        check_same_dim(c.base, v);
        Rect w = rect_intersect(c.base, v);
        if (!w.empty()) clipped.push_back(w);
    }
    for (std::size_t i = 0; i < clipped.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < clipped.size() && !dominated; ++j) {
            if (i == j) continue;
            // Drop strict subsets, and all but the first of equal sets.
            if (clipped[i].subset_of(clipped[j]) && (!(clipped[i] == clipped[j]) || j < i)) dominated = true;
        }
        if (!dominated) out.sub.push_back(clipped[i]);
    }
    std::sort(out.sub.begin(), out.sub.end(), rect_less);
    return out;
}

double measure_cset(const CSet& c) {
    const CSet k = canonical(c);
    if (k.base.empty()) return 0.0;
    for (const auto& v : k.sub)
        if (v == k.base) return 0.0;
    const double removed = measure_union(k.sub);
    return std::max(0.0, rect_measure(k.base) - removed);
}

double d_m(const Rect& u, const Rect& v) noexcept {
    const double d = rect_measure(u) + rect_measure(v) - 2.0 * rect_measure(rect_intersect(u, v));
    return std::max(0.0, d);
}

double d_hausdorff(const Rect& u, const Rect& v) {
    if (u.empty() || v.empty()) throw std::invalid_argument("Hausdorff distance is undefined on the empty set");
    check_same_dim(u, v);
    double d = 0.0;
    for (int i = 0; i < u.dim(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
    return d;
}

Rect g_n(const Rect& u, const DyadicLevel& level) {
    if (u.empty()) throw std::invalid_argument("g_n is applied to non-empty sets");
    const double scale = std::ldexp(1.0, level.n);
    Point c(u.dim());
    for (int i = 0; i < u.dim(); ++i) c[i] = std::min(1.0, std::ceil(u[i] * scale) / scale);
    return Rect(c);
}

std::vector<Rect> enumerate_An(const DyadicLevel& level, std::uint64_t cap) {
    const std::uint64_t k = level.cardinality();
    if (k > cap) throw std::out_of_range("A_n enumeration exceeds cap (" + std::to_string(k) + " sets)");
    const std::uint64_t side = (std::uint64_t{1} << level.n) + 1;
    const double step = level.step();
    std::vector<Rect> out;
    out.reserve(k);
    std::vector<std::uint64_t> idx(static_cast<std::size_t>(level.dim), 0);
    for (std::uint64_t flat = 0; flat < k; ++flat) {
        std::uint64_t rem = flat;
        Point c(level.dim);
        for (int i = level.dim - 1; i >= 0; --i) {
            c[i] = static_cast<double>(rem % side) * step;
            rem /= side;
        }
        out.emplace_back(c);
    }
    return out;
}

CSet left_neighbourhood(const Point& t, int n) {
    const double scale = std::ldexp(1.0, n);
    Point upper(t.dim()), lower(t.dim());
    for (int j = 0; j < t.dim(); ++j) {
        if (!(t[j] > 0.0 && t[j] < 1.0)) throw std::invalid_argument("left neighbourhood needs t in (0,1)^N");
        const double y = t[j] * scale;
        if (y == std::floor(y)) {
            upper[j] = t[j];
            lower[j] = std::floor(y - 1.0) / scale;
        } else {
            upper[j] = std::floor(y + 1.0) / scale;
            lower[j] = std::floor(y) / scale;
        }
    }
    CSet c{Rect(upper), {}};
    for (int k = 0; k < t.dim(); ++k) {
        Point v = upper;
        v[k] = lower[k];
        c.sub.emplace_back(v);
    }
    return c;
}

bool cset_contains(const CSet& c, const Point& x) noexcept {
    if (c.base.empty()) return false;
    for (int i = 0; i < x.dim(); ++i)
        if (x[i] < 0.0 || x[i] > c.base[i]) return false;
    for (const auto& v : c.sub) {
        if (v.empty()) continue;
        bool inside = true;
        for (int i = 0; i < x.dim() && inside; ++i) inside = x[i] <= v[i];
        if (inside) return false;
    }
    return true;
}

} // namespace sigp
