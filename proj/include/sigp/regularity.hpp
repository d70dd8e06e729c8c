#pragma once

// Hölder exponent estimators on sampled paths, their deterministic twins
// computed from the incremental variance, and a Kolmogorov-criterion harness.

#include "sigp/gaussian.hpp"
#include "sigp/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sigp {

enum class Metric { Dm, Hausdorff };

std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);
double distance(Metric m, const Rect& u, const Rect& v);

struct ScalePlan {
    Rect center;
    std::vector<double> radii; // strictly decreasing
    int pairBudget = 32;       // sets drawn per radius, >= 16
    Metric metric = Metric::Dm;
    /// When positive, radii below 4 * gridStep are left out of regressions.
    double gridStep = 0.0;

    void validate() const;
};

/// rho_j = 2^-j for j = jmin..jmax.
ScalePlan dyadic_plan(const Rect& center, int jmin = 2, int jmax = 24, int pairBudget = 32, Metric metric = Metric::Dm);

/// `count` radii spaced geometrically from rhoMax down to rhoMin.
ScalePlan geometric_plan(const Rect& center, double rhoMax, double rhoMin, int count, Metric metric = Metric::Dm);

/// Sets around a centre, sorted by distance to it, so that every ball
/// B(center, rho) is a prefix.
struct LocalDesign {
    Rect center;
    Metric metric = Metric::Dm;
    std::vector<Rect> sets; // sets[0] == center
    std::vector<double> dist;

    /// Number of sets with distance <= rho.
    std::size_t ball_size(double rho) const;
};

inline constexpr std::size_t kLocalDesignCap = 2000;

/// For each radius: nested chain sets at distance rho, dyadic neighbours of
/// the centre and rejection-sampled random corners, up to pairBudget sets.
LocalDesign build_local_design(const ScalePlan& plan, std::uint64_t seed);

/// Only the nested chain sets (one shrunk and, when there is room, one grown
/// set per radius).
LocalDesign build_chain_design(const ScalePlan& plan);

/// Oscillation of each replicate over the sets of `path` inside B(U0, rho).
/// With ordered = true only pairs U ⊂ V count.
std::vector<double> oscillation(const SamplePath& path, const Rect& u0, double rho, Metric metric, bool ordered);

/// osc[r][j] for every replicate r and radius j, by prefix scans.
std::vector<std::vector<double>> oscillation_profile(const SamplePath& path, const Rect& u0,
                                                     std::span<const double> radii, Metric metric, bool ordered);

enum class ExponentKind { Pointwise, Local, PointwiseC, LocalC, Pc, DetPointwise, DetLocal, DetPc };

std::string kind_name(ExponentKind k);
ExponentKind parse_kind(const std::string& name);

struct ExponentReport {
    ExponentKind kind = ExponentKind::Pointwise;
    double estimate = 0.0;
    bool degenerate = false; // no usable data; estimate is +inf
    double rhoMin = 0.0;
    double rhoMax = 0.0;
    double regressionR2 = 1.0;
    std::size_t pairsUsed = 0;
    std::size_t zeroExcluded = 0;
    std::size_t replicatesUsed = 0;
    std::optional<double> target;
    std::vector<double> perReplicate; // NaN where a replicate had too little data
};

ExponentReport estimate_pointwise(const SamplePath& path, const Rect& u0, const ScalePlan& plan);
ExponentReport estimate_local(const SamplePath& path, const Rect& u0, const ScalePlan& plan);
/// (pointwise C-exponent, local C-exponent) from nested pairs only.
std::pair<ExponentReport, ExponentReport> estimate_C_exponents(const SamplePath& path, const Rect& u0,
                                                               const ScalePlan& plan);

struct PcOptions {
    std::size_t replicates = 50;
    std::uint64_t seed = 1;
    int threads = 1;
};

/// Sets needed to evaluate Delta X over C_n(t) for every level n.
std::vector<Rect> pc_family(const Point& t, std::span<const int> levels);

ExponentReport estimate_pc(const CovModel& model, const Point& t, std::span<const int> levels,
                           const PcOptions& options = {});
/// Same estimator on an existing path that contains pc_family(t, levels).
ExponentReport estimate_pc_on_path(const SamplePath& path, const Point& t, std::span<const int> levels);

std::pair<ExponentReport, ExponentReport> deterministic_exponents(const CovModel& model, const Rect& u0,
                                                                  const ScalePlan& plan);
ExponentReport deterministic_pc(const CovModel& model, const Point& t, std::span<const int> levels);

/// Value of the exponent the theory predicts, when known.
std::optional<double> theoretical_target(const CovModel& model, ExponentKind kind, int dim);

// ---------------------------------------------------------------------------
// Kolmogorov-type criterion.

/// (2p-1)!! = E[Z^(2p)] for a standard normal Z.
double gaussian_even_moment(int p);

struct KolmogorovOptions {
    int alpha = 4;            // even starting moment
    int maxAlpha = 64;        // escalation stops here
    double q = 1.0;           // discretization exponent of the collection
    double gammaFraction = 0.5;
    double L = 10.0;
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    int threads = 1;
    bool verifyPaths = true;
};

struct KolmogorovReport {
    std::vector<int> alphasTried;
    int alpha = 0;          // moment used for the verdict
    double s = 0.0;         // fitted exponent in E|dX|^alpha ~ K d^s
    double sR2 = 0.0;
    double logK = 0.0;
    double beta = 0.0;      // s - q
    bool applicable = false;
    std::string note;
    double gammaMax = 0.0;  // beta / alpha
    double gamma = 0.0;     // tested gamma
    double hFloor = 0.0;
    std::size_t pairs = 0;
    std::size_t replicates = 0;
    std::size_t passed = 0;
    double passRate = 0.0;
    std::vector<double> hStar; // per replicate, 0 if no threshold works
};

/// Fits s at a fixed alpha from the kernel over all pairs of the design with d > 0.
double fit_moment_exponent(const CovModel& model, std::span<const Rect> design, Metric metric, int alpha,
                           double* r2 = nullptr, double* logK = nullptr);

KolmogorovReport kolmogorov_harness(const CovModel& model, std::span<const Rect> design, Metric metric,
                                    const KolmogorovOptions& options);

} // namespace sigp
