#pragma once

// Covariance kernels of set-indexed Gaussian processes on the rectangle
// collection, joint sampling over finite families, and C-increments.

#include "sigp/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sigp {

enum class ModelKind { SIBM, SIFBM, SIOU };

struct CovModel {
    ModelKind kind = ModelKind::SIBM;
    double H = 0.5;     // SIFBM only
    double sigma = 1.0; // SIOU only
    double gamma = 1.0; // SIOU only

    static CovModel sibm() { return {}; }
    static CovModel sifbm(double H);
    static CovModel siou(double sigma, double gamma);

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate() const;
    /// Hurst-type index: H for SIFBM, 1/2 for SIBM and SIOU.
    double hurst() const noexcept;

    friend bool operator==(const CovModel&, const CovModel&) = default;
};

std::string model_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

double cov(const CovModel& model, const Rect& u, const Rect& v);

/// E|X_U - X_V|^2 as a function of d = d_m(U,V).
double increment_var_at(const CovModel& model, double d);
double increment_var(const CovModel& model, const Rect& u, const Rect& v);

inline constexpr std::size_t kDefaultCovCap = 4096;

Eigen::MatrixXd build_cov_matrix(const CovModel& model, std::span<const Rect> sets,
                                 std::size_t cap = kDefaultCovCap, int threads = 1);

enum class FactorMethod { Cholesky, JitteredCholesky, EigenClipped };

struct PSDFactor {
    /// factor * factor^T reproduces the (repaired) matrix. Lower triangular
    /// unless method == EigenClipped.
    Eigen::MatrixXd factor;
    double jitterApplied = 0.0;
    int clippedEigs = 0;
    FactorMethod method = FactorMethod::Cholesky;
};

PSDFactor psd_factorize(const Eigen::MatrixXd& a);

struct SamplePath {
    std::vector<Rect> sets;
    std::size_t replicates = 0;
    /// Replicate-major: values[r * sets.size() + i].
    std::vector<double> values;
    std::uint64_t seed = 0;
    CovModel model;
    PSDFactor factorInfo; // factor matrix is released after sampling

    double value(std::size_t replicate, std::size_t set) const { return values[replicate * sets.size() + set]; }
    std::span<const double> replicate(std::size_t r) const {
        return {values.data() + r * sets.size(), sets.size()};
    }
    std::optional<std::size_t> find(const Rect& u) const;
    void rebuild_index();

private:
    std::unordered_map<Rect, std::size_t, RectHash> index_;
};

struct SampleOptions {
    std::size_t cap = kDefaultCovCap;
    int threads = 1;
};

SamplePath sample_paths(const CovModel& model, std::vector<Rect> sets, std::uint64_t seed,
                        std::size_t replicates, const SampleOptions& options = {});

/// One term c * X_set of a linear combination.
struct LinearTerm {
    Rect set;
    double coef = 0.0;
};

/// Delta X_C = sum over subsets S of the subtracted sets of
/// (-1)^|S| X(base ∩ (∩S)), with equal sets merged and zero terms dropped.
std::vector<LinearTerm> cset_terms(const CSet& c);

/// Delta X over a finite union U_1 ∪ ... ∪ U_k.
std::vector<LinearTerm> union_terms(std::span<const Rect> sets);

/// Every set whose value Delta X_C depends on.
std::vector<Rect> closure_sets(const CSet& c);

/// Evaluates a linear combination on every replicate. Throws if a set is
/// not part of the path.
std::vector<double> evaluate_terms(const SamplePath& path, std::span<const LinearTerm> terms);

std::vector<double> delta_increment(const SamplePath& path, const CSet& c);

/// Var(sum c_i X_i) from the kernel. When the coefficients sum to zero the
/// variogram form -1/2 sum c_i c_j E|X_i - X_j|^2 is used, which avoids
/// cancellation between large covariances.
double terms_variance(const CovModel& model, std::span<const LinearTerm> terms);

double delta_variance(const CovModel& model, const CSet& c);

struct UnboundedDemoReport {
    double h = 0.0;
    int cells = 0;
    std::size_t replicates = 0;
    double meanWC = 0.0;
    double lambdaC = 0.0;      // mean of lambda(C(omega))
    double lambdaRatio = 0.0;  // mean of lambda(C(omega)) / h
    double theoreticalMean = 0.0;
};

/// Splits [0,1]x[0,h] into k vertical cells, draws independent N(0, h/k)
/// increments and keeps the cells with a positive increment.
UnboundedDemoReport demo_unbounded(double h, int cells, std::uint64_t seed, std::size_t replicates);

struct UnboundedGrowth {
    std::vector<UnboundedDemoReport> rows;
    double slope = 0.0;       // least-squares slope of meanWC against sqrt(k)
    double targetSlope = 0.0; // sqrt(h / (2 pi))
};

UnboundedGrowth demo_unbounded_growth(double h, int log2kMin, int log2kMax, std::uint64_t seed,
                                      std::size_t replicates);

bool is_power_of_two(long long k) noexcept;

} // namespace sigp
