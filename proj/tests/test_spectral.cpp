#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "teng/grid.hpp"
#include "teng/spectral.hpp"

using namespace teng;
using namespace teng::testing;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

Eigen::VectorXd two_pi_lengths(int d) { return Eigen::VectorXd::Constant(d, kTwoPi); }

Eigen::VectorXd sample_2d(int n, double (*f)(double, double)) {
    const CollocationGrid g = tensor_grid(2, n);
    Eigen::VectorXd v(g.point_count());
    for (Eigen::Index p = 0; p < g.point_count(); ++p)
        v[p] = f(g.points(p, 0), g.points(p, 1));
    return v;
}

SpectrumField random_real_spectrum(int kmax, RngState& rng) {
    // random band-limited real field, transformed forward
    const int n = 2 * kmax + 1 + 6;
    const CollocationGrid g = tensor_grid(2, n);
    Eigen::VectorXd v(g.point_count());
    for (Eigen::Index p = 0; p < g.point_count(); ++p) v[p] = 0.0;
    for (int k1 = -kmax; k1 <= kmax; ++k1)
        for (int k2 = 0; k2 <= kmax; ++k2) {
            if (k2 == 0 && k1 < 0) continue;
            const double a = rng.next_normal() / (1.0 + k1 * k1 + k2 * k2);
            const double b = rng.next_normal() / (1.0 + k1 * k1 + k2 * k2);
            for (Eigen::Index p = 0; p < g.point_count(); ++p) {
                const double arg = k1 * g.points(p, 0) + k2 * g.points(p, 1);
                v[p] += a * std::cos(arg) + b * std::sin(arg);
            }
        }
    return dft_forward(v, 2, n, kmax, two_pi_lengths(2));
}

} // namespace

TEST_CASE("dft of a constant field is a single k = 0 coefficient") {
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(16 * 16, 3.75);
    const SpectrumField s = dft_forward(v, 2, 16, 4, two_pi_lengths(2));
    CHECK(std::abs(s.at({0, 0}) - std::complex<double>(3.75, 0.0)) < 1e-13);
    double off = 0.0;
    for (const auto& c : s.coeffs) off += std::abs(c);
    CHECK(off - std::abs(s.at({0, 0})) < 1e-12);
}

TEST_CASE("dft of cos(x1) puts 1/2 at k = (+-1, 0)") {
    const Eigen::VectorXd v = sample_2d(16, [](double x, double) { return std::cos(x); });
    const SpectrumField s = dft_forward(v, 2, 16, 3, two_pi_lengths(2));
    CHECK(std::abs(s.at({1, 0}) - std::complex<double>(0.5, 0.0)) < 1e-13);
    CHECK(std::abs(s.at({-1, 0}) - std::complex<double>(0.5, 0.0)) < 1e-13);
    CHECK(std::abs(s.at({0, 1})) < 1e-13);
    CHECK(std::abs(s.at({2, 2})) < 1e-13);
}

TEST_CASE("forward/inverse round trip is lossless on a critical grid") {
    RngState rng{5, 0};
    const int kmax = 7, n = 2 * kmax + 1;
    Eigen::VectorXd v(static_cast<Eigen::Index>(n) * n);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.next_normal();
    const SpectrumField s = dft_forward(v, 2, n, kmax, two_pi_lengths(2));
    const Eigen::VectorXd back = dft_inverse(s, n);
    CHECK((back - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward transform of a real field is Hermitian-symmetric") {
    RngState rng{6, 0};
    Eigen::VectorXd v(32 * 32);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.next_normal();
    const SpectrumField s = dft_forward(v, 2, 32, 10, two_pi_lengths(2));
    CHECK(s.hermitian_defect() < 1e-12);
}

TEST_CASE("dft_forward validates sizes") {
    Eigen::VectorXd v(9);
    CHECK_THROWS_AS(dft_forward(v, 2, 3, 4, two_pi_lengths(2)), std::invalid_argument);
    CHECK_THROWS_AS(dft_forward(v, 2, 4, 1, two_pi_lengths(2)), std::invalid_argument);
}

TEST_CASE("truncate_spectrum identity, mode-drop, energy monotonicity") {
    RngState rng{7, 0};
    const SpectrumField s = random_real_spectrum(6, rng);

    const SpectrumField same = truncate_spectrum(s, 6);
    CHECK(same.coeffs == s.coeffs);

    SpectrumField mode = s;
    for (auto& c : mode.coeffs) c = {0.0, 0.0};
    mode.at({5, 0}) = {0.5, 0.0};
    mode.at({-5, 0}) = {0.5, 0.0};
    const SpectrumField cut = truncate_spectrum(mode, 4);
    CHECK(cut.energy() == 0.0);

    CHECK(truncate_spectrum(s, 3).energy() <= s.energy() + 1e-15);
    CHECK_THROWS_AS(truncate_spectrum(s, 7), std::invalid_argument);
}

TEST_CASE("heat_exact at t = 0 reproduces the initial field") {
    RngState rng{8, 0};
    const SpectrumField s = random_real_spectrum(5, rng);
    const CollocationGrid g = tensor_grid(2, 2 * 5 + 1);
    const Eigen::VectorXd direct = dft_inverse(s, g.n_per_dim);
    const Eigen::VectorXd evald = heat_exact(s, 0.1, 0.0, g.points);
    CHECK((direct - evald).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heat_exact decays sin(x1) by exp(-nu t)") {
    const Eigen::VectorXd v = sample_2d(16, [](double x, double) { return std::sin(x); });
    const SpectrumField s = dft_forward(v, 2, 16, 3, two_pi_lengths(2));
    const CollocationGrid g = tensor_grid(2, 16);
    const Eigen::VectorXd ut = heat_exact(s, 0.1, 1.0, g.points);
    const double amp = std::exp(-0.1);
    for (Eigen::Index p = 0; p < g.point_count(); ++p)
        CHECK(ut[p] == doctest::Approx(amp * std::sin(g.points(p, 0))).epsilon(1e-10));
}

TEST_CASE("heat evolution fixes the mean and decays every mode monotonically") {
    RngState rng{9, 0};
    SpectrumField s = random_real_spectrum(4, rng);
    const std::complex<double> mean0 = s.at({0, 0});
    const SpectrumField s1 = heat_propagate(s, 0.2, 0.7);
    const SpectrumField s2 = heat_propagate(s, 0.2, 1.4);
    CHECK(std::abs(s1.at({0, 0}) - mean0) < 1e-15);
    for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
        CHECK(std::abs(s1.coeffs[i]) <= std::abs(s.coeffs[i]) + 1e-15);
        CHECK(std::abs(s2.coeffs[i]) <= std::abs(s1.coeffs[i]) + 1e-15);
    }
}

TEST_CASE("heat_exact agrees with the grid fast path") {
    RngState rng{10, 0};
    const SpectrumField s = random_real_spectrum(5, rng);
    const CollocationGrid g = tensor_grid(2, 24);
    const Eigen::VectorXd slow = heat_exact(s, 0.13, 0.4, g.points);
    const Eigen::VectorXd fast = heat_exact_grid(s, 0.13, 0.4, 24);
    CHECK((slow - fast).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral_rhs is the diagonal diffusion multiplier for heat") {
    RngState rng{11, 0};
    const SpectrumField s = random_real_spectrum(4, rng);
    const PdeSpec heat{PdeKind::Heat, 0.25, 2};
    const SpectrumField r = spectral_rhs(heat, s);
    for (int k1 = -4; k1 <= 4; ++k1)
        for (int k2 = -4; k2 <= 4; ++k2) {
            const double kap2 = k1 * k1 + k2 * k2;
            CHECK(std::abs(r.at({k1, k2}) - (-0.25 * kap2) * s.at({k1, k2})) < 1e-13);
        }
}

TEST_CASE("Allen-Cahn rhs vanishes on the u = 1 fixed point") {
    SpectrumField s;
    s.dims = 2;
    s.kmax = 4;
    s.lengths = two_pi_lengths(2);
    s.coeffs.assign(s.lattice_size(), {0.0, 0.0});
    s.at({0, 0}) = {1.0, 0.0};
    const PdeSpec ac{PdeKind::AllenCahn, 1.0 / 200.0, 2};
    const SpectrumField r = spectral_rhs(ac, s);
    double worst = 0.0;
    for (const auto& c : r.coeffs) worst = std::max(worst, std::abs(c));
    CHECK(worst < 1e-13);
}

TEST_CASE("pseudo-spectral cube of cos(x1) has the closed-form coefficients") {
    const Eigen::VectorXd v = sample_2d(32, [](double x, double) { return std::cos(x); });
    const SpectrumField s = dft_forward(v, 2, 32, 4, two_pi_lengths(2));
    const PdeSpec ac{PdeKind::AllenCahn, 1.0 / 200.0, 2};
    // rhs = -nu k^2 u + u - u^3; isolate u^3 via the k = (1,0) and (3,0) entries:
    const SpectrumField r = spectral_rhs(ac, s);
    // u^3 = (3 cos x + cos 3x)/4 -> coefficients 3/8 at k=+-1 and 1/8 at k=+-3
    const std::complex<double> cube_k1 =
        (-ac.nu * 1.0) * s.at({1, 0}) + s.at({1, 0}) - r.at({1, 0});
    const std::complex<double> cube_k3 =
        (-ac.nu * 9.0) * s.at({3, 0}) + s.at({3, 0}) - r.at({3, 0});
    CHECK(std::abs(cube_k1 - std::complex<double>(0.375, 0.0)) < 1e-12);
    CHECK(std::abs(cube_k3 - std::complex<double>(0.125, 0.0)) < 1e-12);
}

TEST_CASE("pseudo-spectral convolutions match brute-force sums at kmax = 4") {
    RngState rng{12, 0};
    const SpectrumField s = random_real_spectrum(4, rng);

    // cubic (Allen-Cahn) term
    const PdeSpec ac{PdeKind::AllenCahn, 0.01, 2};
    const SpectrumField rc = spectral_rhs(ac, s);
    const SpectrumField cube = brute_convolution(s, 3);
    for (int k1 = -4; k1 <= 4; ++k1)
        for (int k2 = -4; k2 <= 4; ++k2) {
            const double kap2 = k1 * k1 + k2 * k2;
            const std::complex<double> expect =
                -ac.nu * kap2 * s.at({k1, k2}) + s.at({k1, k2}) - cube.at({k1, k2});
            CHECK(std::abs(rc.at({k1, k2}) - expect) < 1e-12);
        }

    // quadratic (Burgers) term
    const PdeSpec b{PdeKind::Burgers, 0.01, 2};
    const SpectrumField rb = spectral_rhs(b, s);
    const SpectrumField sq = brute_convolution(s, 2);
    for (int k1 = -4; k1 <= 4; ++k1)
        for (int k2 = -4; k2 <= 4; ++k2) {
            const double kap2 = k1 * k1 + k2 * k2;
            const std::complex<double> expect =
                -b.nu * kap2 * s.at({k1, k2}) -
                std::complex<double>(0.0, 0.5) * static_cast<double>(k1 + k2) * sq.at({k1, k2});
            CHECK(std::abs(rb.at({k1, k2}) - expect) < 1e-12);
        }
}

TEST_CASE("spectral RK4 on heat matches the analytic evolution") {
    const Eigen::VectorXd v = sample_2d(24, [](double x, double y) {
        return std::cos(x) + 0.5 * std::sin(2 * y) + 0.25 * std::cos(3 * x + 2 * y);
    });
    const PdeSpec heat{PdeKind::Heat, 0.1, 2};
    const std::vector<double> times{0.5, 1.0};
    const ReferenceSolution ref =
        spectral_rk4_evolve(heat, v, 24, 4, 1e-3, times, 24, two_pi_lengths(2));
    REQUIRE(ref.times.size() == 2);
    const SpectrumField s0 = dft_forward(v, 2, 24, 4, two_pi_lengths(2));
    for (std::size_t i = 0; i < ref.times.size(); ++i) {
        const Eigen::VectorXd exact = heat_exact_grid(s0, 0.1, ref.times[i], 24);
        CHECK((ref.fields[i] - exact).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("spectral RK4 stores the initial state for T = 0") {
    const Eigen::VectorXd v = sample_2d(16, [](double x, double) { return std::sin(x); });
    const PdeSpec heat{PdeKind::Heat, 0.1, 2};
    const ReferenceSolution ref =
        spectral_rk4_evolve(heat, v, 16, 3, 1e-3, {0.0}, 16, two_pi_lengths(2));
    REQUIRE(ref.times.size() == 1);
    CHECK(ref.times[0] == 0.0);
    CHECK((ref.fields[0] - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Burgers reference is dissipative on the desk horizon") {
    const CollocationGrid g = tensor_grid(2, 96);
    const InitialCondition ic = InitialCondition::two_dim_exp();
    const Eigen::VectorXd u0 = ic.evaluate(g.points, 0).value;
    const PdeSpec b{PdeKind::Burgers, 0.01, 2};
    const std::vector<double> times{0.01, 0.02, 0.03, 0.04, 0.05};
    const ReferenceSolution ref =
        spectral_rk4_evolve(b, u0, 96, 24, 1e-3, times, 64, two_pi_lengths(2));
    const CollocationGrid eval = tensor_grid(2, 64);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& f : ref.fields) {
        const double norm = l2_inner(eval, f, f);
        CHECK(norm <= prev + 1e-8);
        prev = norm;
    }
}

TEST_CASE("RK4 blow-up detection aborts with a timestamp") {
    // anti-diffusive operator grows the field until the guard trips
    const Eigen::VectorXd v = sample_2d(16, [](double x, double) { return std::cos(x); });
    PdeSpec bad;
    bad.kind = PdeKind::Heat;
    bad.nu = -12.0;
    bad.dims = 2;
    CHECK_THROWS_WITH_AS(
        spectral_rk4_evolve(bad, v, 16, 3, 0.01, {5.0}, 16, two_pi_lengths(2)),
        doctest::Contains("blow-up"), std::runtime_error);
}

TEST_CASE("every spectral operation preserves Hermitian symmetry") {
    RngState rng{14, 0};
    const SpectrumField s = random_real_spectrum(5, rng);
    CHECK(s.hermitian_defect() < 1e-12);
    CHECK(truncate_spectrum(s, 3).hermitian_defect() < 1e-12);
    CHECK(heat_propagate(s, 0.1, 0.5).hermitian_defect() < 1e-12);
    for (const auto kind : {PdeKind::Heat, PdeKind::AllenCahn, PdeKind::Burgers}) {
        PdeSpec p;
        p.kind = kind;
        p.nu = 0.01;
        p.dims = 2;
        CHECK(spectral_rhs(p, s).hermitian_defect() < 1e-12);
    }
}
