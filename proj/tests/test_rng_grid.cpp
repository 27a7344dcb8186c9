#include <doctest.h>

#include <cmath>
#include <set>

#include "teng/grid.hpp"
#include "teng/rng.hpp"

using namespace teng;

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kPi = 3.14159265358979323846264338;
} // namespace

TEST_CASE("rng streams are deterministic and seed-sensitive") {
    RngState a{7, 0}, b{7, 0}, c{8, 0};
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    bool differs = false;
    RngState a2{7, 0};
    for (int i = 0; i < 10; ++i) differs |= a2.next_u64() != c.next_u64();
    CHECK(differs);

    RngState f1 = fork_stream(RngState{7, 0}, 1);
    RngState f2 = fork_stream(RngState{7, 0}, 2);
    CHECK(f1.next_u64() != f2.next_u64());
}

TEST_CASE("rng uniform and normal moments") {
    RngState r{123, 0};
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 10000.0 - 0.5) < 0.02);

    double nsum = 0.0, nsq = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double z = r.next_normal();
        nsum += z;
        nsq += z * z;
    }
    CHECK(std::abs(nsum / 10000.0) < 0.05);
    CHECK(std::abs(nsq / 10000.0 - 1.0) < 0.1);
}

TEST_CASE("tensor_grid enumerates small cases exactly") {
    const CollocationGrid g = tensor_grid(2, 2);
    REQUIRE(g.point_count() == 4);
    CHECK(g.weight == doctest::Approx(kPi * kPi).epsilon(1e-14));
    // lexicographic: dim 0 slowest
    CHECK(g.points(0, 0) == 0.0);
    CHECK(g.points(0, 1) == 0.0);
    CHECK(g.points(1, 0) == 0.0);
    CHECK(g.points(1, 1) == doctest::Approx(kPi));
    CHECK(g.points(2, 0) == doctest::Approx(kPi));
    CHECK(g.points(3, 0) == doctest::Approx(kPi));
    CHECK(g.points(3, 1) == doctest::Approx(kPi));
}

TEST_CASE("tensor_grid volume identity in 3-D") {
    const CollocationGrid g = tensor_grid(3, 4);
    CHECK(g.point_count() == 64);
    CHECK(g.weight == doctest::Approx(std::pow(kPi / 2.0, 3)).epsilon(1e-14));
    CHECK(g.weight * static_cast<double>(g.point_count()) ==
          doctest::Approx(std::pow(kTwoPi, 3)).epsilon(1e-12));
}

TEST_CASE("tensor_grid supports unequal domain lengths") {
    Eigen::VectorXd lengths(2);
    lengths << 2.0, kTwoPi;
    const CollocationGrid g = tensor_grid(2, 64, lengths);
    CHECK(g.points(1, 1) == doctest::Approx(kTwoPi / 64.0));
    CHECK(g.points(64, 0) == doctest::Approx(2.0 / 64.0));
    CHECK(g.weight == doctest::Approx((2.0 * kTwoPi) / 4096.0).epsilon(1e-14));
}

TEST_CASE("tensor_grid rejects degenerate sizes") {
    CHECK_THROWS_AS(tensor_grid(2, 1), std::invalid_argument);
    CHECK_THROWS_AS(tensor_grid(0, 4), std::invalid_argument);
}

TEST_CASE("l2_inner volume, orthogonality, closed form") {
    const CollocationGrid g = tensor_grid(2, 64);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.point_count());
    CHECK(l2_inner(g, ones, ones) == doctest::Approx(kTwoPi * kTwoPi).epsilon(1e-13));

    Eigen::VectorXd s(g.point_count()), c(g.point_count());
    for (Eigen::Index p = 0; p < g.point_count(); ++p) {
        s[p] = std::sin(g.points(p, 0));
        c[p] = std::cos(g.points(p, 0));
    }
    CHECK(std::abs(l2_inner(g, s, c)) < 1e-12);
    // integral of sin(x1)^2 over the box = 2*pi^2
    CHECK(l2_inner(g, s, s) == doctest::Approx(19.739208802178716).epsilon(1e-10));

    CHECK_THROWS_AS(l2_inner(g, s.head(3), c), std::invalid_argument);
}

TEST_CASE("quadrature is exact for band-limited Fourier products") {
    const CollocationGrid g = tensor_grid(2, 64);
    RngState rng{42, 0};
    for (int trial = 0; trial < 40; ++trial) {
        const int k1 = static_cast<int>(rng.next_below(31)) - 15;
        const int k2 = static_cast<int>(rng.next_below(31)) - 15;
        if (k1 == 0 && k2 == 0) continue;
        const double ph1 = rng.next_uniform(0.0, kTwoPi);
        const double ph2 = rng.next_uniform(0.0, kTwoPi);
        Eigen::VectorXd f(g.point_count()), h(g.point_count());
        for (Eigen::Index p = 0; p < g.point_count(); ++p) {
            const double arg = k1 * g.points(p, 0) + k2 * g.points(p, 1);
            f[p] = std::cos(arg + ph1);
            h[p] = std::cos(arg + ph2);
        }
        // same wave vector: the integral is (2pi)^2/2 * cos(ph1 - ph2)
        const double expect = 0.5 * kTwoPi * kTwoPi * std::cos(ph1 - ph2);
        CHECK(std::abs(l2_inner(g, f, h) - expect) < 1e-10);
    }
}

TEST_CASE("subsample_params basic contracts") {
    RngState rng{9, 0};
    CHECK(subsample_params(10, 10, rng) == full_index_set(10));

    RngState r1{5, 0}, r2{5, 0};
    const IndexSet s1 = subsample_params(1000, 100, r1);
    const IndexSet s2 = subsample_params(1000, 100, r2);
    CHECK(s1 == s2);
    CHECK(r1.counter > 0); // state advanced

    std::set<Eigen::Index> uniq(s1.begin(), s1.end());
    CHECK(uniq.size() == 100);
    for (const auto i : s1) {
        CHECK(i >= 0);
        CHECK(i < 1000);
    }
    for (std::size_t i = 1; i < s1.size(); ++i) CHECK(s1[i] > s1[i - 1]);

    CHECK_THROWS_AS(subsample_params(10, 11, rng), std::invalid_argument);
    CHECK_THROWS_AS(subsample_params(10, 0, rng), std::invalid_argument);
}

TEST_CASE("subsample_params covers indices uniformly") {
    RngState rng{2024, 0};
    const Eigen::Index n = 50, k = 10;
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    const int draws = 20000;
    for (int d = 0; d < draws; ++d)
        for (const auto i : subsample_params(n, k, rng)) counts[static_cast<std::size_t>(i)]++;
    const double expected = static_cast<double>(k) / static_cast<double>(n);
    for (const int c : counts) {
        const double freq = static_cast<double>(c) / draws;
        CHECK(freq > expected * 0.95);
        CHECK(freq < expected * 1.05);
    }
}
