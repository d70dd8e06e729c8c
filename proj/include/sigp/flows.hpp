#pragma once

// Increasing paths through the rectangle collection and the m-standard
// projection X^{f,m}_t = Delta X_{f(theta^{-1}(t))}, theta(t) = m(f(t)).

#include "sigp/gaussian.hpp"
#include "sigp/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace sigp {

struct FlowBreakpoint {
    double t = 0.0;
    Point corner;
};

/// Piecewise-linear corner path t -> [0, corner(t)] with non-decreasing
/// coordinates.
class ElementaryFlow {
public:
    ElementaryFlow() = default;
    explicit ElementaryFlow(std::vector<FlowBreakpoint> breakpoints);

    const std::vector<FlowBreakpoint>& breakpoints() const noexcept { return bp_; }
    int dim() const noexcept { return bp_.front().corner.dim(); }
    double t_min() const noexcept { return bp_.front().t; }
    double t_max() const noexcept { return bp_.back().t; }

    Point corner_at(double t) const;
    Rect set_at(double t) const { return Rect(corner_at(t)); }
    double theta(double t) const;
    double theta_min() const { return theta(t_min()); }
    double theta_max() const { return theta(t_max()); }
    /// inf{t : theta(t) >= s}; flat stretches resolve to their left end.
    double theta_inverse(double s) const;

private:
    std::vector<FlowBreakpoint> bp_;
};

/// f(t) = f_i(t) ∪ f_1(t_1) ∪ ... ∪ f_{i-1}(t_{i-1}) on the i-th segment,
/// where t_j is the end time of segment j.
class SimpleFlow {
public:
    SimpleFlow() = default;
    explicit SimpleFlow(std::vector<ElementaryFlow> segments);

    const std::vector<ElementaryFlow>& segments() const noexcept { return seg_; }
    double t_min() const noexcept { return seg_.front().t_min(); }
    double t_max() const noexcept { return seg_.back().t_max(); }

    /// The rectangles whose union is f(t).
    std::vector<Rect> sets_at(double t) const;
    double theta(double t) const;
    double theta_max() const { return theta(t_max()); }
    double theta_inverse(double s) const;

private:
    std::size_t segment_for(double t) const;
    std::vector<ElementaryFlow> seg_;
};

double theta(const ElementaryFlow& flow, double t);
double theta_inverse(const ElementaryFlow& flow, double s);

/// f(theta^{-1}(s)) for each s.
std::vector<Rect> projected_sets(const ElementaryFlow& flow, std::span<const double> times);

/// Cov(X^{f,m}_s, X^{f,m}_t) from the set-indexed kernel.
double projected_cov(const CovModel& model, const ElementaryFlow& flow, double s, double t);

/// Delta X over f(theta^{-1}(s)) as a linear combination of X values.
std::vector<LinearTerm> projected_terms(const SimpleFlow& flow, double s);
double projected_cov(const CovModel& model, const SimpleFlow& flow, double s, double t);

/// Covariance of one-parameter fractional Brownian motion.
double fbm_cov(double H, double s, double t);

/// Random elementary flow on [0,1] starting at the origin, with `segments`
/// linear pieces and theta(1) > 0. Deterministic in (seed, index).
ElementaryFlow random_elementary_flow(int dim, int segments, std::uint64_t seed, std::uint64_t index);

/// f(t) = [0, (t, 1, ..., 1)].
ElementaryFlow linear_flow(int dim);

} // namespace sigp
