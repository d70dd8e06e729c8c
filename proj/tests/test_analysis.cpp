#include "sigp/analysis.hpp"

#include <doctest.h>

#include <cmath>

using namespace sigp;

namespace {

// Closed form of sup over A_{n+1} of d_m(U, g_n(U)): the corner just below
// (1,...,1) at level n+1 loses a full slab in every coordinate.
double rect_gap_oracle(int N, int n) { return 1.0 - std::pow(1.0 - std::ldexp(1.0, -(n + 1)), N); }

double q_oracle(int N, int nMin, int nMax) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = nMax - nMin + 1;
    for (int n = nMin; n <= nMax; ++n) {
        const double x = N * std::log(std::ldexp(1.0, n) + 1.0);
        const double y = std::log(rect_gap_oracle(N, n));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return -1.0 / slope;
}

} // namespace

TEST_CASE("collection names") {
    CHECK(parse_collection("rectangles") == CollectionKind::Rectangles);
    CHECK(parse_collection("lower-layers") == CollectionKind::LowerLayers);
    CHECK_THROWS_AS(parse_collection("balls"), std::invalid_argument);
    CHECK(verdict_name(Verdict::Violated) == "VIOLATED");
}

TEST_CASE("descriptor validation") {
    CHECK_THROWS(CollectionDescriptor::lower_layers(0, kLowerLayerMaxLevel + 1).validate());
    CHECK_THROWS(CollectionDescriptor::rectangles(2, 4, 3).validate());
    auto d = CollectionDescriptor::rectangles(2, 2, 4);
    d.M1 = 0.0;
    CHECK_THROWS(d.validate());
    auto l = CollectionDescriptor::lower_layers();
    l.metric = Metric::Hausdorff;
    CHECK_THROWS(l.validate());
}

TEST_CASE("cardinalities") {
    const auto r = CollectionDescriptor::rectangles(2, 2, 6);
    CHECK(collection_cardinality(r, 3) == 81.0);
    const auto l = CollectionDescriptor::lower_layers();
    CHECK(collection_cardinality(l, 0) == 2.0);
    CHECK(collection_cardinality(l, 1) == 6.0);
    CHECK(collection_cardinality(l, 2) == 70.0);
    CHECK(collection_cardinality(l, 3) == 12870.0);
}

TEST_CASE("rectangle gaps match the closed form") {
    for (int N : {1, 2, 3}) {
        const auto d = CollectionDescriptor::rectangles(N, 1, 4);
        for (int n = 1; n <= 4; ++n) CHECK(sup_gap(d, n) == doctest::Approx(rect_gap_oracle(N, n)).epsilon(1e-14));
    }
    auto h = CollectionDescriptor::rectangles(2, 1, 4);
    h.metric = Metric::Hausdorff;
    for (int n = 1; n <= 4; ++n) CHECK(sup_gap(h, n) == std::ldexp(1.0, -(n + 1)));

    Witness w;
    const double g = sup_gap(CollectionDescriptor::rectangles(2, 1, 4), 3, &w);
    CHECK(w.gap == g);
    CHECK(w.level == 3);
    CHECK(w.set == "[0,(0.9375,0.9375)]");
    CHECK(w.image == "[0,(1,1)]");
}

TEST_CASE("discretization exponent of rectangles") {
    struct Case {
        int N, nMin, nMax;
        double tol;
    };
    for (const Case c : {Case{1, 2, 8, 0.05}, Case{2, 2, 6, 0.2}, Case{3, 2, 4, 0.2}}) {
        const auto rep = fit_discretization_exponent(CollectionDescriptor::rectangles(c.N, c.nMin, c.nMax));
        CAPTURE(c.N);
        CHECK(rep.qFit == doctest::Approx(q_oracle(c.N, c.nMin, c.nMax)).epsilon(1e-9));
        CHECK(std::abs(rep.qFit - c.N) <= c.tol);
        CHECK(std::abs(rep.qFit - c.N) <= 0.1 * c.N);
        CHECK(rep.qStderr > 0.0);
        for (std::size_t i = 0; i < rep.levels.size(); ++i) CHECK(rep.sampledGap[i] <= rep.supGap[i]);
    }
    CHECK_THROWS(fit_discretization_exponent(CollectionDescriptor::rectangles(2, 2, 3)));
}

TEST_CASE("H1 for rectangles") {
    const auto d = CollectionDescriptor::rectangles(2, 2, 6);
    const H1Check q2 = check_H1(d, 2.0);
    CHECK(q2.allPass);
    const H1Check q1 = check_H1(d, 1.0);
    CHECK(q1.pass.front());
    CHECK_FALSE(q1.pass.back());
    CHECK_FALSE(q1.allPass);
    CHECK_THROWS(check_H1(d, 0.0));
}

TEST_CASE("N_n by enumeration") {
    // N=1: V = [0, j/16] over U = [0, i/16] with (j - i)/16 <= 3/17.
    CHECK(compute_Nn(CollectionDescriptor::rectangles(1, 2, 8), 4, 1.0, 1.0) == 2);

    // Brute force over all pairs of A_n in two dimensions.
    const auto d = CollectionDescriptor::rectangles(2, 2, 6);
    for (int n : {2, 3}) {
        const auto sets = enumerate_An({n, 2});
        const double radius = 3.0 * std::pow(collection_cardinality(d, n), -0.5);
        std::uint64_t best = 0;
        for (const Rect& u : sets) {
            std::uint64_t c = 0;
            for (const Rect& v : sets)
                if (!(u == v) && u.subset_of(v) && d_m(u, v) <= radius) ++c;
            best = std::max(best, c);
        }
        CHECK(compute_Nn(d, n, 2.0, 1.0) == best);
        CHECK(best <= static_cast<std::uint64_t>(collection_cardinality(d, n)));
    }
}

TEST_CASE("summability diagnostics") {
    const std::vector<double> deltas{0.1, 0.5, 1.0};
    std::vector<int> levels;
    std::vector<double> geo;
    std::vector<std::uint64_t> ones;
    for (int n = 1; n <= 8; ++n) {
        levels.push_back(n);
        geo.push_back(std::ldexp(1.0, n));
        ones.push_back(1);
    }
    CHECK(check_H2(levels, geo, ones, deltas).verdict == Verdict::Satisfied);
    CHECK(check_admissibility(1, geo, deltas).verdict == Verdict::Satisfied);

    // k_n = 2^{2^n}: k_{n+1} / k_n^{1+delta} = 2^{(1-delta) 2^n} does not decay.
    std::vector<double> doubly;
    for (int n = 0; n <= 7; ++n) doubly.push_back(std::ldexp(1.0, 1 << n));
    const auto dd = check_admissibility(0, doubly, deltas);
    CHECK(dd.verdict == Verdict::Inconclusive);
    CHECK(dd.tests[2].terms.front() == doctest::Approx(1.0));

    const auto adm = check_admissibility(CollectionDescriptor::rectangles(2, 2, 6));
    CHECK(adm.verdict == Verdict::Satisfied);
    for (const auto& t : adm.tests) {
        CHECK(t.partialSums.size() == t.terms.size());
        CHECK(t.ratios.back() < 1.0);
    }
    CHECK_THROWS(check_H2(std::vector<int>{1, 2, 3}, std::vector<double>{2, 4, 8}, std::vector<std::uint64_t>{1, 1, 1}, deltas));
}

TEST_CASE("H2 for two-dimensional rectangles is inconclusive") {
    // N_n grows roughly like n 2^n on the full dyadic class, so the ratio
    // test cannot pass at small delta.
    const auto h2 = check_H2(CollectionDescriptor::rectangles(2, 2, 6), 2.0);
    CHECK(h2.verdict == Verdict::Inconclusive);
    CHECK_FALSE(h2.tests[0].geometric);
}

TEST_CASE("eta of the finite-approximation condition") {
    for (int N : {1, 2}) {
        const double eta = check_eqHypFin(CollectionDescriptor::rectangles(N, 2, 6), 16);
        CAPTURE(N);
        CHECK(eta >= 0.125);
        CHECK(eta <= 1.0);
    }
    CHECK_THROWS(check_eqHypFin(CollectionDescriptor::lower_layers(), 4));
}

TEST_CASE("covering numbers") {
    const auto one = CollectionDescriptor::rectangles(1, 2, 6);
    // Greedy net on a grid of step s = eps/8 places centres eps + s apart.
    for (int j = 1; j <= 6; ++j) {
        const double eps = std::ldexp(1.0, -j);
        const double s = eps / 8.0;
        CHECK(covering_number(one, eps) == static_cast<std::size_t>(std::floor(1.0 / (eps + s))) + 1);
    }
    CHECK(covering_number(one, 0.25) <= 4);
    CHECK(covering_number(one, 0.5) >= 1);

    for (int N : {1, 2}) {
        const auto d = CollectionDescriptor::rectangles(N, 2, 6);
        std::size_t prev = 0;
        for (double eps = 0.5; eps >= 1.0 / 40.0; eps *= std::pow(2.0, -0.25)) {
            const std::size_t c = covering_number(d, eps);
            CHECK(c >= prev);
            prev = c;
        }
        for (int j = 2; j <= 5; ++j) {
            const double eps = std::ldexp(1.0, -j);
            CHECK(static_cast<double>(covering_number(d, eps)) <= std::pow(eps, -N));
        }
    }
    CHECK_THROWS(covering_number(one, 0.0));
    CHECK_THROWS(covering_number(one, 0.75));
    CHECK_THROWS(covering_number(CollectionDescriptor::rectangles(3, 2, 4), 1.0 / 64));
}

TEST_CASE("lower-layer gaps: recursion against enumeration") {
    const auto d = CollectionDescriptor::lower_layers();
    for (int n = 0; n <= 2; ++n) {
        double best = 0.0;
        for (const auto& fine : lower_layers_enumerate(2 << n).sets)
            best = std::max(best, lower_layers_coarsen(fine).measure() - fine.measure());
        CHECK(sup_gap(d, n) == doctest::Approx(best).epsilon(1e-15));
    }
}

TEST_CASE("lower layers fail H1 for every q") {
    const auto d = CollectionDescriptor::lower_layers(0, 6);
    for (double q : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        CAPTURE(q);
        CHECK_FALSE(check_H1(d, q).allPass);
    }
}

TEST_CASE("lower layers report") {
    const auto rep = lower_layers_report(2);
    CHECK(rep.verdict == Verdict::Violated);
    REQUIRE(rep.witness);
    CHECK(rep.witness->gap > 0.0);
    REQUIRE(rep.counts);
    const auto& c = *rep.counts;
    CHECK(c.core == std::vector<std::uint64_t>{2, 6, 70});
    CHECK(c.withConventions == std::vector<std::uint64_t>{3, 7, 71});
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
        CHECK(c.boundHolds[i]);
        CHECK(c.minGap[i] == c.minGapExpected[i]);
    }
    CHECK(c.minGap[2] == 1.0 / 16);
    CHECK(rep.h1Grid.size() == 5);
    CHECK_THROWS(lower_layers_report(3));
}

TEST_CASE("rectangle reports are never violated") {
    const auto one = check_collection(CollectionDescriptor::rectangles(1, 2, 8));
    CHECK(one.verdict == Verdict::Satisfied);
    for (int N : {2, 3}) {
        const auto rep = check_collection(CollectionDescriptor::rectangles(N, 2, N == 2 ? 6 : 4));
        CAPTURE(N);
        CHECK(rep.verdict != Verdict::Violated);
        CHECK_FALSE(rep.witness);
        REQUIRE(rep.h1);
        CHECK(rep.h1->allPass);
    }
    CHECK(check_collection(CollectionDescriptor::lower_layers()).verdict == Verdict::Violated);
}
