#include "sigp/gaussian.hpp"

#include "sigp/rng.hpp"
#include "sigp/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace sigp {

CovModel CovModel::sifbm(double H) {
    CovModel m;
    m.kind = ModelKind::SIFBM;
    m.H = H;
    m.validate();
    return m;
}

CovModel CovModel::siou(double sigma, double gamma) {
    CovModel m;
    m.kind = ModelKind::SIOU;
    m.sigma = sigma;
    m.gamma = gamma;
    m.validate();
    return m;
}

void CovModel::validate() const {
    if (kind == ModelKind::SIFBM && !(H > 0.0 && H <= 0.5)) throw std::invalid_argument("H must lie in (0, 0.5]");
    if (kind == ModelKind::SIOU) {
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    }
}

double CovModel::hurst() const noexcept { return kind == ModelKind::SIFBM ? H : 0.5; }

std::string model_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::SIBM: return "sibm";
    case ModelKind::SIFBM: return "sifbm";
    case ModelKind::SIOU: return "siou";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "sibm") return ModelKind::SIBM;
    if (name == "sifbm") return ModelKind::SIFBM;
    if (name == "siou") return ModelKind::SIOU;
    throw std::invalid_argument("unknown model '" + name + "' (expected sibm, sifbm or siou)");
}

double cov(const CovModel& model, const Rect& u, const Rect& v) {
    switch (model.kind) {
    case ModelKind::SIBM: return rect_measure(rect_intersect(u, v));
    case ModelKind::SIFBM: {
        const double twoH = 2.0 * model.H;
        return 0.5 * (std::pow(rect_measure(u), twoH) + std::pow(rect_measure(v), twoH) - std::pow(d_m(u, v), twoH));
    }
    case ModelKind::SIOU:
        return model.sigma * model.sigma / (2.0 * model.gamma) * std::exp(-model.gamma * d_m(u, v));
    }
    return 0.0;
}

double increment_var_at(const CovModel& model, double d) {
    switch (model.kind) {
    case ModelKind::SIBM: return d;
    case ModelKind::SIFBM: return d > 0.0 ? std::pow(d, 2.0 * model.H) : 0.0;
    case ModelKind::SIOU: return -model.sigma * model.sigma / model.gamma * std::expm1(-model.gamma * d);
    }
    return 0.0;
}

double increment_var(const CovModel& model, const Rect& u, const Rect& v) {
    return increment_var_at(model, d_m(u, v));
}

Eigen::MatrixXd build_cov_matrix(const CovModel& model, std::span<const Rect> sets, std::size_t cap, int threads) {
    if (sets.size() > cap)
        throw std::length_error("covariance matrix of " + std::to_string(sets.size()) + " sets exceeds cap " +
                                std::to_string(cap));
    const auto n = static_cast<Eigen::Index>(sets.size());
    Eigen::MatrixXd a(n, n);
    parallel_for(sets.size(), threads, [&](std::size_t i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (Eigen::Index j = 0; j <= ii; ++j) a(ii, j) = cov(model, sets[i], sets[static_cast<std::size_t>(j)]);
    });
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i);
    return a;
}

PSDFactor psd_factorize(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("psd_factorize needs a square matrix");
    if (!a.allFinite()) throw std::domain_error("psd_factorize: matrix has non-finite entries");
    const double scaleAbs = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scaleAbs))
        throw std::invalid_argument("psd_factorize: matrix is not symmetric");

    PSDFactor out;
    const auto n = a.rows();
    if (n == 0) return out;

    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
        out.factor = llt.matrixL();
        return out;
    }

    const double meanDiag = a.diagonal().mean();
    const double scale = meanDiag > 0.0 ? meanDiag : 1.0;
    for (double eps = 1e-12; eps <= 1e-6 * (1.0 + 1e-9); eps *= 10.0) {
        Eigen::MatrixXd j = a;
        j.diagonal().array() += eps * scale;
        llt.compute(j);
        if (llt.info() == Eigen::Success) {
            out.factor = llt.matrixL();
            out.jitterApplied = eps * scale;
            out.method = FactorMethod::JitteredCholesky;
            return out;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw std::domain_error("psd_factorize: eigendecomposition failed");
    Eigen::VectorXd lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lambda(i) < 0.0) {
            lambda(i) = 0.0;
            ++out.clippedEigs;
        }
    }
    out.factor = es.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
    out.method = FactorMethod::EigenClipped;
    return out;
}

std::optional<std::size_t> SamplePath::find(const Rect& u) const {
    if (index_.size() != sets.size()) {
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (sets[i] == u) return i;
        return std::nullopt;
    }
    auto it = index_.find(u);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void SamplePath::rebuild_index() {
    index_.clear();
    index_.reserve(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) index_.emplace(sets[i], i);
}

SamplePath sample_paths(const CovModel& model, std::vector<Rect> sets, std::uint64_t seed, std::size_t replicates,
                        const SampleOptions& options) {
    model.validate();
    SamplePath path;
    path.sets = std::move(sets);
    path.replicates = replicates;
    path.seed = seed;
    path.model = model;
    const std::size_t n = path.sets.size();
    path.values.assign(n * replicates, 0.0);
    if (n == 0 || replicates == 0) {
        path.rebuild_index();
        return path;
    }

    const Eigen::MatrixXd a = build_cov_matrix(model, path.sets, options.cap, options.threads);
    PSDFactor f = psd_factorize(a);
    const CounterRng rng(seed, Stream::Normals);
    const bool lower = f.method != FactorMethod::EigenClipped;

    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (replicates + kBlock - 1) / kBlock;
    const auto ni = static_cast<Eigen::Index>(n);
    parallel_for(blocks, options.threads, [&](std::size_t b) {
        const std::size_t r0 = b * kBlock;
        const std::size_t cols = std::min(kBlock, replicates - r0);
        Eigen::MatrixXd z(ni, static_cast<Eigen::Index>(cols));
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t i = 0; i < n; ++i)
                z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rng.normal(r0 + c, i);
        Eigen::MatrixXd x(ni, static_cast<Eigen::Index>(cols));
        if (lower)
            x.noalias() = f.factor.triangularView<Eigen::Lower>() * z;
        else
            x.noalias() = f.factor * z;
        std::copy(x.data(), x.data() + x.size(), path.values.begin() + static_cast<std::ptrdiff_t>(r0 * n));
    });

    f.factor.resize(0, 0);
    path.factorInfo = std::move(f);
    path.rebuild_index();
    return path;
}

namespace {

std::vector<LinearTerm> merge_terms(const std::map<Rect, double, decltype(&rect_less)>& acc) {
    std::vector<LinearTerm> out;
    for (const auto& [r, c] : acc)
        if (c != 0.0) out.push_back({r, c});
    return out;
}

void expand(std::span<const Rect> sub, std::size_t next, const Rect& current, double sign,
            std::map<Rect, double, decltype(&rect_less)>& acc) {
    for (std::size_t i = next; i < sub.size(); ++i) {
        const Rect w = rect_intersect(current, sub[i]);
        acc[w] += -sign;
        expand(sub, i + 1, w, -sign, acc);
    }
}

} // namespace

std::vector<LinearTerm> cset_terms(const CSet& c) {
    const CSet k = canonical(c);
    if (k.base.empty()) return {};
    if (k.sub.size() > kInclusionExclusionLimit)
        throw std::length_error("C-increment with more than " + std::to_string(kInclusionExclusionLimit) +
                                " subtracted sets");
    std::map<Rect, double, decltype(&rect_less)> acc(rect_less);
    acc[k.base] += 1.0;
    expand(k.sub, 0, k.base, 1.0, acc);
    return merge_terms(acc);
}

std::vector<LinearTerm> union_terms(std::span<const Rect> sets) {
    std::vector<Rect> nonEmpty;
    for (const auto& s : sets)
        if (!s.empty()) nonEmpty.push_back(s);
    if (nonEmpty.size() > kInclusionExclusionLimit)
        throw std::length_error("union increment with more than " + std::to_string(kInclusionExclusionLimit) +
                                " sets");
    // Sets contained in another member do not change the union.
    std::vector<Rect> keep;
    for (std::size_t i = 0; i < nonEmpty.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < nonEmpty.size() && !dominated; ++j) {
            if (i == j) continue;
            if (nonEmpty[i].subset_of(nonEmpty[j]) && (!(nonEmpty[i] == nonEmpty[j]) || j < i)) dominated = true;
        }
        if (!dominated) keep.push_back(nonEmpty[i]);
    }
    std::map<Rect, double, decltype(&rect_less)> acc(rect_less);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        acc[keep[i]] += 1.0;
        expand(keep, i + 1, keep[i], 1.0, acc);
    }
    return merge_terms(acc);
}

std::vector<Rect> closure_sets(const CSet& c) {
    std::vector<Rect> out;
    for (const auto& t : cset_terms(c)) out.push_back(t.set);
    return out;
}

namespace {

std::string rect_label(const Rect& r) {
    if (r.empty()) return "empty";
    std::string s = "[0,(";
    for (int i = 0; i < r.dim(); ++i) {
        if (i) s += ",";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        s += buf;
    }
    return s + ")]";
}

} // namespace

std::vector<double> evaluate_terms(const SamplePath& path, std::span<const LinearTerm> terms) {
    std::vector<std::size_t> idx;
    idx.reserve(terms.size());
    for (const auto& t : terms) {
        auto i = path.find(t.set);
        if (!i) throw std::out_of_range("set " + rect_label(t.set) + " is not part of the sample path");
        idx.push_back(*i);
    }
    std::vector<double> out(path.replicates, 0.0);
    for (std::size_t r = 0; r < path.replicates; ++r) {
        double s = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) s += terms[j].coef * path.value(r, idx[j]);
        out[r] = s;
    }
    return out;
}

std::vector<double> delta_increment(const SamplePath& path, const CSet& c) {
    const auto terms = cset_terms(c);
    return evaluate_terms(path, terms);
}

double terms_variance(const CovModel& model, std::span<const LinearTerm> terms) {
    double total = 0.0, scale = 0.0;
    for (const auto& t : terms) {
        total += t.coef;
        scale += std::abs(t.coef);
    }
    double v = 0.0;
    if (std::abs(total) <= 1e-12 * std::max(1.0, scale)) {
        for (std::size_t i = 0; i < terms.size(); ++i)
            for (std::size_t j = i + 1; j < terms.size(); ++j)
                v -= terms[i].coef * terms[j].coef * increment_var(model, terms[i].set, terms[j].set);
    } else {
        for (std::size_t i = 0; i < terms.size(); ++i)
            for (std::size_t j = 0; j < terms.size(); ++j)
                v += terms[i].coef * terms[j].coef * cov(model, terms[i].set, terms[j].set);
    }
    return std::max(0.0, v);
}

double delta_variance(const CovModel& model, const CSet& c) {
    const auto terms = cset_terms(c);
    return terms_variance(model, terms);
}

bool is_power_of_two(long long k) noexcept { return k > 0 && (k & (k - 1)) == 0; }

UnboundedDemoReport demo_unbounded(double h, int cells, std::uint64_t seed, std::size_t replicates) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("h must lie in (0,1)");
    if (!is_power_of_two(cells)) throw std::invalid_argument("cell count must be a power of two");
    if (replicates == 0) throw std::invalid_argument("at least one replicate is needed");
    const CounterRng rng(seed, Stream::DemoCells);
    const double sd = std::sqrt(h / cells);
    const double cellArea = h / cells;
    UnboundedDemoReport rep;
    rep.h = h;
    rep.cells = cells;
    rep.replicates = replicates;
    double sumW = 0.0, sumLambda = 0.0;
    for (std::size_t r = 0; r < replicates; ++r) {
        double w = 0.0;
        std::size_t positive = 0;
        for (int c = 0; c < cells; ++c) {
            const double x = sd * rng.normal(r, static_cast<std::uint64_t>(c));
            if (x > 0.0) {
                w += x;
                ++positive;
            }
        }
        sumW += w;
        sumLambda += static_cast<double>(positive) * cellArea;
    }
    const auto R = static_cast<double>(replicates);
    rep.meanWC = sumW / R;
    rep.lambdaC = sumLambda / R;
    rep.lambdaRatio = rep.lambdaC / h;
    rep.theoreticalMean = std::sqrt(static_cast<double>(cells) * h / (2.0 * std::numbers::pi));
    return rep;
}

UnboundedGrowth demo_unbounded_growth(double h, int log2kMin, int log2kMax, std::uint64_t seed,
                                      std::size_t replicates) {
    if (log2kMin < 0 || log2kMax < log2kMin + 1 || log2kMax > 24)
        throw std::invalid_argument("growth table needs 0 <= log2 kmin < log2 kmax <= 24");
    UnboundedGrowth g;
    std::vector<double> x, y;
    for (int j = log2kMin; j <= log2kMax; ++j) {
        g.rows.push_back(demo_unbounded(h, 1 << j, seed, replicates));
        x.push_back(std::sqrt(static_cast<double>(1 << j)));
        y.push_back(g.rows.back().meanWC);
    }
    g.slope = least_squares(x, y).slope;
    g.targetSlope = std::sqrt(h / (2.0 * std::numbers::pi));
    return g;
}

} // namespace sigp
