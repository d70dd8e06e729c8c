#pragma once

// Fixed-seed generators for property tests.

#include "sigp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gen {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    /// Corner coordinates either uniform or snapped to a coarse dyadic grid,
    /// so that ties and shared faces show up regularly.
    double coordinate(double lo = 0.0) {
        if (integer(0, 3) == 0) {
            const int level = integer(1, 4);
            const int steps = 1 << level;
            const int lowStep = static_cast<int>(std::ceil(lo * steps));
            return static_cast<double>(integer(std::max(lowStep, 1), steps)) / steps;
        }
        return uniform(lo, 1.0);
    }

    sigp::Point point(int dim, double lo = 0.0) {
        sigp::Point p(dim);
        for (int i = 0; i < dim; ++i) p[i] = coordinate(lo);
        return p;
    }

    sigp::Rect rect(int dim, double lo = 0.0) { return sigp::Rect(point(dim, lo)); }

    std::vector<sigp::Rect> rects(int dim, int count) {
        std::vector<sigp::Rect> out;
        for (int i = 0; i < count; ++i) out.push_back(rect(dim));
        return out;
    }

    sigp::CSet cset(int dim, int maxSub) {
        sigp::CSet c{rect(dim), {}};
        const int k = integer(0, maxSub);
        for (int i = 0; i < k; ++i) c.sub.push_back(rect(dim));
        return c;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

/// Equivalent representations of the same point set.
inline std::vector<sigp::CSet> perturbations(const sigp::CSet& c, Gen& g) {
    std::vector<sigp::CSet> out;
    sigp::CSet a = c;
    if (!c.sub.empty()) {
        sigp::Point inner = c.sub[0].corner();
        for (int i = 0; i < inner.dim(); ++i) inner[i] *= g.uniform(0.2, 1.0);
        a.sub.push_back(sigp::Rect(inner));
    } else {
        a.sub.push_back(sigp::Rect::empty_set(c.base.dim()));
    }
    out.push_back(a);
    sigp::CSet b = c;
    if (!c.sub.empty()) b.sub.push_back(c.sub[static_cast<std::size_t>(g.integer(0, static_cast<int>(c.sub.size()) - 1))]);
    out.push_back(b);
    sigp::CSet p = c;
    std::shuffle(p.sub.begin(), p.sub.end(), g.engine());
    out.push_back(p);
    return out;
}

} // namespace gen
