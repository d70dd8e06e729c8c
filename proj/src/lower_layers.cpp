#include "sigp/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace sigp {

LowerLayerGrid::LowerLayerGrid(int gridSize, std::vector<int> heights) : k_(gridSize), heights_(std::move(heights)) {
    if (k_ < 1) throw std::invalid_argument("grid size must be positive");
    if (static_cast<int>(heights_.size()) != k_) throw std::invalid_argument("one height per column expected");
    for (int c = 0; c < k_; ++c) {
        const int h = heights_[static_cast<std::size_t>(c)];
        if (h < 0 || h > k_) throw std::invalid_argument("column height out of range");
        if (c > 0 && h > heights_[static_cast<std::size_t>(c - 1)])
            throw std::invalid_argument("column heights must be non-increasing (downward closure)");
    }
}

bool LowerLayerGrid::contains(int col, int row) const noexcept {
    if (col < 0 || col >= k_ || row < 0) return false;
    return row < heights_[static_cast<std::size_t>(col)];
}

int LowerLayerGrid::cell_count() const noexcept {
    int n = 0;
    for (int h : heights_) n += h;
    return n;
}

double LowerLayerGrid::measure() const noexcept {
    return static_cast<double>(cell_count()) / (static_cast<double>(k_) * static_cast<double>(k_));
}

std::uint64_t LowerLayerGrid::mask() const {
    if (k_ > 8) throw std::out_of_range("cell masks need grid size <= 8");
    std::uint64_t m = 0;
    for (int c = 0; c < k_; ++c)
        for (int r = 0; r < heights_[static_cast<std::size_t>(c)]; ++r) m |= std::uint64_t{1} << (c * k_ + r);
    return m;
}

namespace {

void staircases(int k, int col, int maxHeight, std::vector<int>& h, std::vector<LowerLayerGrid>& out) {
    if (col == k) {
        out.emplace_back(k, h);
        return;
    }
    for (int v = 0; v <= maxHeight; ++v) {
        h[static_cast<std::size_t>(col)] = v;
        staircases(k, col + 1, v, h, out);
    }
}

} // namespace

LowerLayerEnumeration lower_layers_enumerate(int gridSize) {
    if (gridSize < 1 || gridSize > kLowerLayerGridCap)
        throw std::out_of_range("lower-layer grid size must lie in [1, " + std::to_string(kLowerLayerGridCap) + "]");
    LowerLayerEnumeration e;
    std::vector<int> h(static_cast<std::size_t>(gridSize), 0);
    staircases(gridSize, 0, gridSize, h, e.sets);
    e.coreCount = e.sets.size();
    // The empty cell set is replaced by the two conventions {0} and the empty set.
    e.withConventionsCount = e.coreCount + 1;
    return e;
}

double lower_layers_min_gap(int n) {
    if (n < 0 || (1 << n) > kLowerLayerGridCap) throw std::out_of_range("lower-layer min gap needs 2^n <= 8");
    const int k = 1 << n;
    const auto sets = lower_layers_enumerate(k).sets;
    std::vector<std::uint64_t> masks;
    masks.reserve(sets.size());
    for (const auto& s : sets) masks.push_back(s.mask());

    int best = std::numeric_limits<int>::max();
    for (std::uint64_t u : masks) {
        for (std::uint64_t v : masks) {
            if (u == v || (u & ~v) != 0) continue;
            best = std::min(best, std::popcount(v) - std::popcount(u));
        }
    }
    return static_cast<double>(best) / (static_cast<double>(k) * static_cast<double>(k));
}

LowerLayerGrid lower_layers_coarsen(const LowerLayerGrid& fine) {
    const int k = fine.grid_size();
    if (k % 2 != 0) throw std::invalid_argument("coarsening needs an even grid size");
    std::vector<int> h(static_cast<std::size_t>(k / 2));
    for (int c = 0; c < k / 2; ++c) {
        // Columns are non-increasing, so the left fine column decides.
        const int fineH = fine.heights()[static_cast<std::size_t>(2 * c)];
        h[static_cast<std::size_t>(c)] = (fineH + 1) / 2;
    }
    return LowerLayerGrid(k / 2, std::move(h));
}

} // namespace sigp
