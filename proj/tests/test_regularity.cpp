#include "sigp/regularity.hpp"

#include "sigp/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace sigp;

namespace {

const Rect kCenter{0.6, 0.6};

// X_U = m(U) on every replicate: Lipschitz in d_m, exponent 1.
SamplePath measure_path(std::vector<Rect> sets, std::size_t reps = 2) {
    SamplePath p;
    p.sets = std::move(sets);
    p.replicates = reps;
    for (std::size_t r = 0; r < reps; ++r)
        for (const Rect& s : p.sets) p.values.push_back(rect_measure(s));
    p.rebuild_index();
    return p;
}

SamplePath constant_path(std::vector<Rect> sets) {
    SamplePath p;
    p.sets = std::move(sets);
    p.replicates = 1;
    p.values.assign(p.sets.size(), 0.7);
    p.rebuild_index();
    return p;
}

} // namespace

TEST_CASE("metric names and distance") {
    CHECK(parse_metric(metric_name(Metric::Dm)) == Metric::Dm);
    CHECK(parse_metric(metric_name(Metric::Hausdorff)) == Metric::Hausdorff);
    CHECK_THROWS(parse_metric("l2"));
    CHECK(distance(Metric::Dm, Rect{0.5, 0.5}, Rect{1.0, 0.5}) == 0.25);
    CHECK(distance(Metric::Hausdorff, Rect{0.5, 0.5}, Rect{1.0, 0.5}) == 0.5);
    CHECK(parse_kind(kind_name(ExponentKind::LocalC)) == ExponentKind::LocalC);
}

TEST_CASE("scale plan validation") {
    ScalePlan p = dyadic_plan(kCenter, 2, 10);
    CHECK(p.radii.size() == 9);
    CHECK(p.radii.front() == 0.25);
    CHECK_NOTHROW(p.validate());
    p.pairBudget = 8;
    CHECK_THROWS(p.validate());
    p = dyadic_plan(kCenter, 2, 10);
    std::swap(p.radii[0], p.radii[1]);
    CHECK_THROWS(p.validate());
    const ScalePlan g = geometric_plan(kCenter, 1e-2, 1e-4, 5);
    CHECK(g.radii.front() == doctest::Approx(1e-2));
    CHECK(g.radii.back() == doctest::Approx(1e-4));
    CHECK(g.radii[2] == doctest::Approx(1e-3));
}

TEST_CASE("localized design is sorted by distance and deterministic") {
    for (Metric m : {Metric::Dm, Metric::Hausdorff}) {
        const ScalePlan plan = dyadic_plan(kCenter, 2, 16, 32, m);
        const LocalDesign d = build_local_design(plan, 11);
        REQUIRE(!d.sets.empty());
        CHECK(d.sets[0] == kCenter);
        CHECK(d.sets.size() <= kLocalDesignCap);
        for (std::size_t i = 0; i < d.sets.size(); ++i) {
            CHECK(d.dist[i] == distance(m, kCenter, d.sets[i]));
            if (i > 0) CHECK(d.dist[i - 1] <= d.dist[i]);
        }
        std::size_t prev = d.sets.size() + 1;
        for (double rho : plan.radii) {
            const std::size_t b = d.ball_size(rho);
            CHECK(b >= 2);
            CHECK(b <= prev);
            prev = b;
        }
        const LocalDesign again = build_local_design(plan, 11);
        CHECK(again.sets == d.sets);
    }
}

TEST_CASE("chain design attains the radius") {
    const ScalePlan plan = dyadic_plan(kCenter, 2, 12);
    const LocalDesign d = build_chain_design(plan);
    for (double rho : plan.radii) {
        bool hit = false;
        for (double x : d.dist) hit = hit || std::abs(x - rho) <= 1e-15;
        CHECK(hit);
    }
}

TEST_CASE("oscillation basics") {
    const ScalePlan plan = dyadic_plan(kCenter, 2, 12);
    const LocalDesign d = build_local_design(plan, 3);
    const auto c = constant_path(d.sets);
    CHECK(oscillation(c, kCenter, 0.25, Metric::Dm, false)[0] == 0.0);

    // Only the centre and one other set in the ball.
    std::vector<Rect> two{kCenter, Rect{0.6, 0.65}, Rect{1.0, 1.0}};
    SamplePath p = measure_path(two, 1);
    p.values = {1.0, -0.5, 9.0};
    CHECK(oscillation(p, kCenter, 0.05, Metric::Dm, false)[0] == 1.5);
    CHECK_THROWS(oscillation(p, kCenter, 0.001, Metric::Dm, false));

    const auto path = sample_paths(CovModel::sibm(), d.sets, 4, 20);
    const auto un = oscillation_profile(path, kCenter, plan.radii, Metric::Dm, false);
    const auto ord = oscillation_profile(path, kCenter, plan.radii, Metric::Dm, true);
    for (std::size_t r = 0; r < path.replicates; ++r) {
        for (std::size_t j = 0; j < plan.radii.size(); ++j) {
            CHECK(ord[r][j] <= un[r][j] + 1e-12);
            if (j > 0) CHECK(un[r][j] <= un[r][j - 1]);
        }
    }
    // The profile agrees with the direct computation.
    const auto direct = oscillation(path, kCenter, plan.radii[3], Metric::Dm, true);
    for (std::size_t r = 0; r < path.replicates; ++r) CHECK(direct[r] == ord[r][3]);
}

TEST_CASE("exponents of the measure itself are 1") {
    const ScalePlan plan = dyadic_plan(kCenter, 2, 16);
    const auto p = measure_path(build_local_design(plan, 5).sets);
    CHECK(estimate_pointwise(p, kCenter, plan).estimate == doctest::Approx(1.0).epsilon(0.05));
    CHECK(estimate_local(p, kCenter, plan).estimate == doctest::Approx(1.0).epsilon(0.05));
    const auto [pc, lc] = estimate_C_exponents(p, kCenter, plan);
    CHECK(pc.estimate == doctest::Approx(1.0).epsilon(0.05));
    CHECK(lc.estimate == doctest::Approx(1.0).epsilon(0.05));

    const Point t{0.37, 0.61};
    const std::vector<int> levels{3, 4, 5, 6, 7};
    const auto q = measure_path(pc_family(t, levels));
    CHECK(estimate_pc_on_path(q, t, levels).estimate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate input is flagged") {
    const ScalePlan plan = dyadic_plan(kCenter, 2, 12);
    const auto c = constant_path(build_local_design(plan, 5).sets);
    const auto r = estimate_pointwise(c, kCenter, plan);
    CHECK(r.degenerate);
    CHECK(std::isinf(r.estimate));
}

TEST_CASE("Brownian motion in one parameter") {
    const Rect c{0.5};
    const ScalePlan plan = dyadic_plan(c, 2, 10);
    const auto path = sample_paths(CovModel::sibm(), build_local_design(plan, 6).sets, 8, 50);
    const double e = estimate_pointwise(path, c, plan).estimate;
    CHECK(e >= 0.35);
    CHECK(e <= 0.65);
}

TEST_CASE("empirical exponents on a localized 2D design") {
    const ScalePlan plan = dyadic_plan(kCenter);
    const LocalDesign d = build_local_design(plan, 1);

    const auto fbm = sample_paths(CovModel::sifbm(0.3), d.sets, 21, 50);
    const auto pw = estimate_pointwise(fbm, kCenter, plan);
    const auto loc = estimate_local(fbm, kCenter, plan);
    const auto [pwC, locC] = estimate_C_exponents(fbm, kCenter, plan);
    CHECK(loc.estimate >= 0.2);
    CHECK(loc.estimate <= 0.45);
    CHECK(pw.target == doctest::Approx(0.3));
    for (std::size_t r = 0; r < fbm.replicates; ++r) {
        CHECK(loc.perReplicate[r] <= pw.perReplicate[r] + 0.05);
        CHECK(pwC.perReplicate[r] >= pw.perReplicate[r] - 0.05);
        CHECK(locC.perReplicate[r] >= loc.perReplicate[r] - 0.05);
    }
    CHECK(pw.regressionR2 >= 0.0);
    CHECK(pw.regressionR2 <= 1.0);

    const auto ou = sample_paths(CovModel::siou(1.0, 1.0), d.sets, 22, 50);
    const double ouPw = estimate_pointwise(ou, kCenter, plan).estimate;
    CHECK(ouPw >= 0.4);
    CHECK(ouPw <= 0.6);

    const auto bm = sample_paths(CovModel::sibm(), d.sets, 23, 50);
    const auto [bmPc, bmLc] = estimate_C_exponents(bm, kCenter, plan);
    CHECK(bmPc.estimate >= 0.4);
    CHECK(bmPc.estimate <= 0.6);
    CHECK(bmLc.estimate >= 0.4);
    CHECK(bmLc.estimate <= 0.6);
}

TEST_CASE("deterministic exponents") {
    const ScalePlan plan = dyadic_plan(kCenter, 2, 24);
    for (double H : {0.1, 0.2, 0.3, 0.35, 0.4, 0.5}) {
        const auto [pw, loc] = deterministic_exponents(CovModel::sifbm(H), kCenter, plan);
        CHECK(std::abs(pw.estimate - H) <= 1e-6);
        CHECK(std::abs(loc.estimate - H) <= 1e-6);
    }
    const auto [bp, bl] = deterministic_exponents(CovModel::sibm(), kCenter, plan);
    CHECK(std::abs(bp.estimate - 0.5) <= 1e-6);
    CHECK(std::abs(bl.estimate - 0.5) <= 1e-6);

    const auto [op, ol] = deterministic_exponents(CovModel::siou(1.0, 1.0), kCenter, geometric_plan(kCenter, 1e-2, 1e-4, 12));
    CHECK(std::abs(op.estimate - 0.5) <= 5e-3);
    CHECK(std::abs(ol.estimate - 0.5) <= 5e-3);
}

TEST_CASE("deterministic pc exponent") {
    const std::vector<int> levels{3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(std::abs(deterministic_pc(CovModel::sibm(), Point{0.37, 0.61}, levels).estimate - 0.5) <= 1e-9);

    const std::vector<int> deep{6, 7, 8, 9, 10, 11, 12};
    // One parameter: the exponent is H.
    CHECK(std::abs(deterministic_pc(CovModel::sifbm(0.3), Point{0.37}, deep).estimate - 0.3) <= 2e-2);
    // Two parameters: E[(dB^H)^2] ~ 2^{-2nH} while m(C_n) = 2^{-2n}, so H/2.
    const auto two = deterministic_pc(CovModel::sifbm(0.3), Point{0.37, 0.61}, deep);
    CHECK(std::abs(two.estimate - 0.15) <= 2e-2);
    CHECK(two.target == doctest::Approx(0.15));
    CHECK_THROWS(deterministic_pc(CovModel::sibm(), Point{0.37, 0.61}, std::vector<int>{3, 4}));
}

TEST_CASE("empirical pc exponent") {
    const std::vector<int> levels{3, 4, 5, 6, 7};
    const auto bm = estimate_pc(CovModel::sibm(), Point{0.37, 0.61}, levels, {50, 9, 1});
    CHECK(bm.estimate >= 0.35);
    CHECK(bm.estimate <= 0.65);
    CHECK(bm.target == doctest::Approx(0.5));

    const auto fbm = estimate_pc(CovModel::sifbm(0.3), Point{0.37}, levels, {50, 9, 1});
    CHECK(fbm.estimate >= 0.2);
    CHECK(fbm.estimate <= 0.45);

    const auto threaded = estimate_pc(CovModel::sibm(), Point{0.37, 0.61}, levels, {50, 9, 4});
    CHECK(threaded.perReplicate == bm.perReplicate);
}

TEST_CASE("theoretical targets") {
    CHECK(*theoretical_target(CovModel::sifbm(0.3), ExponentKind::Local, 2) == 0.3);
    CHECK(*theoretical_target(CovModel::siou(1, 1), ExponentKind::Pointwise, 2) == 0.5);
    CHECK(*theoretical_target(CovModel::sifbm(0.3), ExponentKind::Pc, 3) == doctest::Approx(0.1));
    CHECK(*theoretical_target(CovModel::siou(2, 0.5), ExponentKind::DetPc, 2) == 0.5);
}

TEST_CASE("Gaussian even moments") {
    CHECK(gaussian_even_moment(0) == 1.0);
    CHECK(gaussian_even_moment(1) == 1.0);
    CHECK(gaussian_even_moment(2) == 3.0);
    CHECK(gaussian_even_moment(3) == 15.0);
    CHECK(gaussian_even_moment(4) == 105.0);
}

TEST_CASE("moment exponent is alpha H") {
    const auto grid = enumerate_An({4, 2});
    for (int alpha : {2, 4, 8}) {
        double r2 = 0.0;
        const double s = fit_moment_exponent(CovModel::sifbm(0.35), grid, Metric::Dm, alpha, &r2);
        CHECK(std::abs(s - alpha * 0.35) <= 1e-6);
        CHECK(r2 == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("Kolmogorov harness") {
    const auto grid = enumerate_An({4, 2});
    KolmogorovOptions o;
    o.q = 2.0;
    const auto r = kolmogorov_harness(CovModel::sifbm(0.35), grid, Metric::Dm, o);
    CHECK(r.alphasTried == std::vector<int>{4, 8});
    CHECK(r.alpha == 8);
    CHECK(r.applicable);
    CHECK(std::abs(r.s - 2.8) <= 1e-6);
    CHECK(std::abs(r.beta - 0.8) <= 1e-6);
    CHECK(r.gammaMax == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(r.gamma == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(r.passRate >= 0.95);

    const auto line = enumerate_An({8, 1});
    KolmogorovOptions o1;
    o1.q = 1.0;
    const auto b = kolmogorov_harness(CovModel::sibm(), line, Metric::Dm, o1);
    CHECK(b.alpha == 4);
    CHECK(std::abs(b.s - 2.0) <= 1e-6);
    CHECK(std::abs(b.beta - 1.0) <= 1e-6);
    CHECK(b.gammaMax == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(b.passRate >= 0.95);

    KolmogorovOptions capped = o;
    capped.maxAlpha = 4;
    const auto na = kolmogorov_harness(CovModel::sifbm(0.35), grid, Metric::Dm, capped);
    CHECK_FALSE(na.applicable);
    CHECK(na.note == "criterion inapplicable at this q");

    const std::vector<Rect> narrow{Rect{0.5, 0.5}, Rect{0.51, 0.5}, Rect{0.5, 0.52}};
    CHECK_THROWS(kolmogorov_harness(CovModel::sibm(), narrow, Metric::Dm, o));
}
