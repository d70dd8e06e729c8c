#include "sigp/flows.hpp"

#include <doctest.h>

#include <cmath>

using namespace sigp;

namespace {

ElementaryFlow diagonal_flow() { return ElementaryFlow({{0.0, Point{0.0, 0.0}}, {1.0, Point{1.0, 1.0}}}); }

} // namespace

TEST_CASE("theta examples") {
    CHECK(theta(linear_flow(2), 0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(theta(diagonal_flow(), 0.5) == 0.25);
    CHECK_THROWS(theta(diagonal_flow(), 1.5));
}

TEST_CASE("theta is monotone on random flows") {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto f = random_elementary_flow(1 + static_cast<int>(i % 3), 1 + static_cast<int>(i % 5), 77, i);
        double prev = -1.0;
        for (int k = 0; k <= 32; ++k) {
            const double th = f.theta(f.t_min() + (f.t_max() - f.t_min()) * k / 32.0);
            CHECK(th >= prev);
            prev = th;
        }
    }
}

TEST_CASE("theta inverse") {
    CHECK(theta_inverse(linear_flow(2), 0.37) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(theta_inverse(diagonal_flow(), 0.3) == doctest::Approx(std::sqrt(0.3)).epsilon(1e-14));
    CHECK_THROWS(theta_inverse(diagonal_flow(), 1.2));

    // Flat stretch: theta is 0.25 on [1,2]; the inverse picks the left end.
    const ElementaryFlow flat({{0.0, Point{0.0, 0.5}}, {1.0, Point{0.5, 0.5}}, {2.0, Point{0.5, 0.5}}, {3.0, Point{1.0, 1.0}}});
    CHECK(flat.theta_inverse(0.25) == doctest::Approx(1.0).epsilon(1e-15));

    for (std::uint64_t i = 0; i < 1000; ++i) {
        const auto f = random_elementary_flow(2, 3, 78, i);
        const double s = f.theta_max() * (static_cast<double>(i % 97) + 0.5) / 97.0;
        CHECK(std::abs(f.theta(f.theta_inverse(s)) - s) <= 1e-10);
    }
}

TEST_CASE("projected sets") {
    const std::vector<double> times{0.25, 0.5};
    const auto sets = projected_sets(linear_flow(2), times);
    REQUIRE(sets.size() == 2);
    CHECK(sets[0] == Rect{0.25, 1.0});
    CHECK(sets[1] == Rect{0.5, 1.0});
    const auto f = random_elementary_flow(3, 4, 79, 0);
    std::vector<double> ts;
    for (int k = 1; k <= 16; ++k) ts.push_back(f.theta_max() * k / 16.0);
    const auto ps = projected_sets(f, ts);
    for (std::size_t k = 0; k < ps.size(); ++k) {
        CHECK(rect_measure(ps[k]) == doctest::Approx(ts[k]).epsilon(1e-12));
        if (k > 0) {
            CHECK(ps[k - 1].subset_of(ps[k]));
            CHECK_FALSE(ps[k - 1] == ps[k]);
        }
    }
}

TEST_CASE("fbm_cov") {
    CHECK(fbm_cov(0.5, 0.3, 0.7) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fbm_cov(0.3, 0.0, 0.7) == 0.0);
    CHECK(fbm_cov(0.3, 0.2, 0.9) == fbm_cov(0.3, 0.9, 0.2));
    CHECK_THROWS(fbm_cov(1.0, 0.2, 0.3));
}

TEST_CASE("projected covariance examples") {
    const auto f = linear_flow(2);
    const double expect = 0.5 * (std::pow(0.2, 0.7) + std::pow(0.7, 0.7) - std::pow(0.5, 0.7));
    CHECK(projected_cov(CovModel::sifbm(0.35), f, 0.2, 0.7) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(projected_cov(CovModel::sifbm(0.35), f, 0.4, 0.4) == doctest::Approx(std::pow(0.4, 0.7)).epsilon(1e-13));
    CHECK(projected_cov(CovModel::sibm(), f, 0.4, 0.9) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("projection identity on random flows") {
    for (double H : {0.2, 0.35, 0.5}) {
        for (std::uint64_t i = 0; i < 5; ++i) {
            const auto f = random_elementary_flow(2, 4, 80, i);
            double worst = 0.0;
            for (int a = 0; a < 64; ++a)
                for (int b = 0; b < 64; ++b) {
                    const double s = f.theta_max() * a / 63.0, t = f.theta_max() * b / 63.0;
                    worst = std::max(worst, std::abs(projected_cov(CovModel::sifbm(H), f, s, t) - fbm_cov(H, s, t)));
                }
            CHECK(worst <= 1e-12);
        }
    }
}

TEST_CASE("sampled projections have fBm covariance") {
    const double H = 0.35;
    const auto f = random_elementary_flow(2, 3, 81, 0);
    std::vector<double> ts;
    for (int k = 1; k <= 16; ++k) ts.push_back(f.theta_max() * k / 16.0);
    const auto p = sample_paths(CovModel::sifbm(H), projected_sets(f, ts), 5, 100000);
    for (std::size_t a = 0; a < ts.size(); ++a)
        for (std::size_t b = 0; b <= a; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < p.replicates; ++r) s += p.value(r, a) * p.value(r, b);
            s /= static_cast<double>(p.replicates);
            const double target = fbm_cov(H, ts[a], ts[b]);
            const double scale = std::sqrt(fbm_cov(H, ts[a], ts[a]) * fbm_cov(H, ts[b], ts[b]));
            CHECK(std::abs(s - target) <= 0.03 * scale);
        }
}

TEST_CASE("simple flows") {
    const ElementaryFlow first({{0.0, Point{0.0, 0.0}}, {1.0, Point{0.5, 1.0}}});
    const ElementaryFlow second({{1.0, Point{0.0, 0.0}}, {2.0, Point{1.0, 0.5}}});
    const SimpleFlow sf({first, second});
    CHECK(sf.theta(1.0) == 0.5);
    CHECK(sf.theta(2.0) == 0.75);
    CHECK(sf.theta(1.5) == 0.5);
    CHECK(sf.theta(1.75) == doctest::Approx(0.5 + 0.75 * 0.375 - 0.5 * 0.375).epsilon(1e-14));
    CHECK(sf.theta(sf.theta_inverse(0.6)) == doctest::Approx(0.6).epsilon(1e-12));

    // Beyond the first segment the projection is a union increment; for SIBM
    // it is still a Brownian motion in the measure parametrization.
    for (double s : {0.1, 0.5, 0.62})
        for (double t : {0.3, 0.55, 0.75})
            CHECK(projected_cov(CovModel::sibm(), sf, s, t) == doctest::Approx(std::min(s, t)).epsilon(1e-10));

    const ElementaryFlow detached({{1.0, Point{0.9, 0.9}}, {2.0, Point{1.0, 1.0}}});
    CHECK_THROWS(SimpleFlow({first, detached}));
}
