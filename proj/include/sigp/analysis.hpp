#pragma once

// Checks of the approximation assumption on an indexing collection: the
// discretization exponent, the gap and neighbour-count conditions, the
// admissibility of (k_n), covering numbers, and the lower-layers failure.

#include "sigp/geometry.hpp"
#include "sigp/regularity.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigp {

enum class CollectionKind { Rectangles, LowerLayers };

std::string collection_name(CollectionKind k);
CollectionKind parse_collection(const std::string& name);

struct CollectionDescriptor {
    CollectionKind kind = CollectionKind::Rectangles;
    int dim = 2; // rectangles only; lower layers live in [0,1]^2
    int nMin = 2;
    int nMax = 6;
    Metric metric = Metric::Dm;
    double M1 = 1.0;
    /// Rectangles only: restrict A_n to corners with every coordinate >= cornerFloor.
    double cornerFloor = 0.0;
    std::vector<double> deltas{0.1, 0.5, 1.0};
    std::uint64_t seed = 1;
    std::size_t gapSamples = 10000;
    int threads = 1;

    static CollectionDescriptor rectangles(int dim, int nMin, int nMax);
    static CollectionDescriptor lower_layers(int nMin = 0, int nMax = 6);

    void validate() const;
};

/// Largest level accepted for the lower-layers gap recursion.
inline constexpr int kLowerLayerMaxLevel = 6;
/// Largest level for anything that enumerates lower layers one by one.
inline constexpr int kLowerLayerEnumerationLevel = 3;

enum class Verdict { Satisfied, Violated, Inconclusive };

std::string verdict_name(Verdict v);

/// Terms a_n of a series observed at finitely many levels, for one delta.
struct SeriesTest {
    double delta = 0.0;
    std::vector<double> terms;
    std::vector<double> partialSums;
    std::vector<double> ratios; // terms[i+1] / terms[i]
    double threshold = 0.0;     // 0.9^delta
    bool geometric = false;
};

struct SummabilityDiagnostic {
    std::string series; // formula of the terms
    std::vector<int> levels;
    std::vector<SeriesTest> tests;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

struct Witness {
    int level = 0;
    std::string set;   // U in A_{n+1}
    std::string image; // g_n(U)
    double gap = 0.0;
};

struct H1Check {
    double q = 0.0;
    double M1 = 0.0; // fitted at the coarsest level
    std::vector<double> bound;
    std::vector<bool> pass;
    bool allPass = false;
};

struct LowerLayerCounts {
    std::vector<int> levels;
    std::vector<std::uint64_t> core;
    std::vector<std::uint64_t> withConventions;
    std::vector<double> lowerBound; // 2^(2^n)
    std::vector<bool> boundHolds;
    std::vector<double> minGap;
    std::vector<double> minGapExpected; // 2^(-2n)
};

struct AssumptionReport {
    CollectionDescriptor collection;
    std::vector<int> levels;
    std::vector<double> kSequence;
    std::vector<double> supGap;     // exact sup over A_{n+1}
    std::vector<double> sampledGap; // max over a random sample of A_{n+1}
    double qFit = 0.0;
    double qStderr = 0.0;
    double qR2 = 0.0;
    std::optional<H1Check> h1;
    std::vector<std::uint64_t> Nn;
    std::optional<SummabilityDiagnostic> h2;
    std::optional<SummabilityDiagnostic> admissible;
    std::optional<double> etaHat;
    std::optional<LowerLayerCounts> counts;
    std::vector<H1Check> h1Grid; // lower layers: H1 for each q of a grid
    Verdict verdict = Verdict::Inconclusive;
    std::optional<Witness> witness;
    std::vector<std::string> notes;
};

/// k_n of the collection: (2^n+1)^N for rectangles, C(2^(n+1), 2^n) for lower layers.
double collection_cardinality(const CollectionDescriptor& desc, int n);

/// sup over U in A_{n+1} of d(U, g_n(U)).
double sup_gap(const CollectionDescriptor& desc, int n, Witness* witness = nullptr);

/// Levels, k_n, supGap_n, sampled gaps and the least-squares q.
AssumptionReport fit_discretization_exponent(const CollectionDescriptor& desc);

H1Check check_H1(const CollectionDescriptor& desc, double q);
/// Same check from gaps that are already known.
H1Check check_H1(std::span<const double> k, std::span<const double> supGap, double q);

/// max over U in A_n of #{V in A_n : V strictly contains U, d(U,V) <= 3 M1 k_n^(-1/q)}.
std::uint64_t compute_Nn(const CollectionDescriptor& desc, int n, double q, double M1);

/// Ratio test on a_n for each delta: geometric if the last two ratios are
/// at most 0.9^delta.
SummabilityDiagnostic summability(std::string series, std::span<const int> levels,
                                  std::span<const std::vector<double>> termsPerDelta, std::span<const double> deltas);

SummabilityDiagnostic check_H2(std::span<const int> levels, std::span<const double> k,
                               std::span<const std::uint64_t> Nn, std::span<const double> deltas);
SummabilityDiagnostic check_H2(const CollectionDescriptor& desc, double q);

/// k holds k_n for levels[0] .. levels[0] + k.size() - 1.
SummabilityDiagnostic check_admissibility(int firstLevel, std::span<const double> k, std::span<const double> deltas);
SummabilityDiagnostic check_admissibility(const CollectionDescriptor& desc);

/// Smallest observed sup_n d(U, g_n(U)) / rho over sampled centres and
/// radii 2^-2 .. 2^-(2 + radii - 1).
double check_eqHypFin(const CollectionDescriptor& desc, std::size_t samples, int radii = 10);

/// Size of a greedy epsilon-net over A_n with 2^-n <= epsilon / 8.
std::size_t covering_number(const CollectionDescriptor& desc, double epsilon);

LowerLayerCounts lower_layer_counts(int nMax);
AssumptionReport lower_layers_report(int nMax = 2);

/// Full report: lower_layers_report for lower layers, every check for rectangles.
AssumptionReport check_collection(const CollectionDescriptor& desc);

} // namespace sigp
