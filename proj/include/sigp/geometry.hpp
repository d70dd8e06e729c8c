#pragma once

// Exact geometry of the rectangle indexing collection {[0,u] : u in [0,1]^N}
// together with the dyadic approximation classes A_n and left neighbourhoods.
//
// All rectangles are anchored at the origin, so intersections are
// componentwise minima and every measure is a product of corner coordinates.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace sigp {

inline constexpr int kMaxDim = 8;

/// Absolute tolerance used only when comparing measures.
inline constexpr double kMeasureTol = 1e-12;

class Point {
public:
    Point() = default;
    explicit Point(int dim);
    Point(std::initializer_list<double> coords);
    explicit Point(std::span<const double> coords);

    int dim() const noexcept { return dim_; }
    double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const noexcept { return {c_.data(), static_cast<std::size_t>(dim_)}; }

    friend bool operator==(const Point& a, const Point& b) noexcept;

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 0;
};

/// The set [0, corner], or the empty set.
class Rect {
public:
    Rect() = default;
    explicit Rect(Point corner);
    Rect(std::initializer_list<double> corner) : Rect(Point(corner)) {}

    static Rect empty_set(int dim);

    bool empty() const noexcept { return empty_; }
    int dim() const noexcept { return corner_.dim(); }
    const Point& corner() const noexcept { return corner_; }
    double operator[](int i) const noexcept { return corner_[i]; }

    /// Point-set inclusion (this is a subset of other).
    bool subset_of(const Rect& other) const noexcept;

    friend bool operator==(const Rect& a, const Rect& b) noexcept;

private:
    Point corner_;
    bool empty_ = false;
};

/// Strict weak order: empty first, then lexicographic by corner.
bool rect_less(const Rect& a, const Rect& b) noexcept;

struct RectHash {
    std::size_t operator()(const Rect& r) const noexcept;
};

/// C = base \ (sub[0] u ... u sub[k-1]). The representation is not canonical.
struct CSet {
    Rect base;
    std::vector<Rect> sub;
};

struct DyadicLevel {
    int n = 0;
    int dim = 1;

    double step() const noexcept;
    /// (2^n + 1)^N non-empty rectangles of A_n.
    std::uint64_t cardinality() const;
};

double rect_measure(const Rect& u) noexcept;
Rect rect_intersect(const Rect& u, const Rect& v) noexcept;

/// Largest collection size accepted by the inclusion-exclusion path.
inline constexpr std::size_t kInclusionExclusionLimit = 24;

/// Lebesgue measure of a finite union. Uses inclusion-exclusion for up to
/// kInclusionExclusionLimit sets and the grid sweep beyond that.
double measure_union(std::span<const Rect> rects);
double measure_union_inclusion_exclusion(std::span<const Rect> rects);
double measure_union_sweep(std::span<const Rect> rects);

double measure_cset(const CSet& c);

/// m(U \triangle V).
double d_m(const Rect& u, const Rect& v) noexcept;
/// Hausdorff distance under the sup norm; throws on empty input.
double d_hausdorff(const Rect& u, const Rect& v);

/// Componentwise ceiling of the corner onto the 2^-n grid.
Rect g_n(const Rect& u, const DyadicLevel& level);

/// Default cap on (2^n+1)^N for enumerations.
inline constexpr std::uint64_t kEnumerationCap = std::uint64_t{1} << 22;

/// All non-empty rectangles of A_n in row-major corner order (the empty set
/// is not included).
std::vector<Rect> enumerate_An(const DyadicLevel& level, std::uint64_t cap = kEnumerationCap);

/// C_n(t) for t in the open unit cube.
CSet left_neighbourhood(const Point& t, int n);

/// True if x lies in the point set C (closed rectangles, so boundaries of
/// the subtracted sets are removed).
bool cset_contains(const CSet& c, const Point& x) noexcept;

/// Simplified equivalent representation: subtracted sets clipped to the base,
/// duplicates and dominated sets removed, sorted. Measure-preserving.
CSet canonical(const CSet& c);

// ---------------------------------------------------------------------------
// Lower layers of [0,1]^2 on a k x k cell grid.

class LowerLayerGrid {
public:
    LowerLayerGrid() = default;
    /// Column heights must be non-increasing and within [0, k].
    LowerLayerGrid(int gridSize, std::vector<int> heights);

    int grid_size() const noexcept { return k_; }
    const std::vector<int>& heights() const noexcept { return heights_; }
    bool contains(int col, int row) const noexcept;
    int cell_count() const noexcept;
    double measure() const noexcept;
    /// Cell bitmask (col * k + row), valid for k <= 8.
    std::uint64_t mask() const;

    friend bool operator==(const LowerLayerGrid&, const LowerLayerGrid&) = default;

private:
    int k_ = 0;
    std::vector<int> heights_;
};

inline constexpr int kLowerLayerGridCap = 8;

struct LowerLayerEnumeration {
    std::uint64_t coreCount = 0;            // downward-closed cell sets, including no cells
    std::uint64_t withConventionsCount = 0; // non-empty unions plus {0} and the empty set
    std::vector<LowerLayerGrid> sets;
};

LowerLayerEnumeration lower_layers_enumerate(int gridSize);

/// min over U in A_n of min over strict supersets V in A_n of d_lambda(U,V).
double lower_layers_min_gap(int n);

/// Smallest level-n lower layer containing a lower layer of the 2^(n+1) grid.
LowerLayerGrid lower_layers_coarsen(const LowerLayerGrid& fine);

} // namespace sigp
