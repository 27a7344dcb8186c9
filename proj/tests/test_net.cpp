#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "support/toy_models.hpp"
#include "teng/net.hpp"

using namespace teng;
using namespace teng::testing;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

NetworkArch small_arch(int dims) {
    NetworkArch a;
    a.input_dim = dims;
    a.embed_terms = 3;
    a.hidden_dim = 8;
    a.n_layers = 3;
    return a;
}

Eigen::MatrixXd random_points(Eigen::Index n, int d, RngState& rng) {
    Eigen::MatrixXd pts(n, d);
    for (Eigen::Index p = 0; p < n; ++p)
        for (int i = 0; i < d; ++i) pts(p, i) = rng.next_uniform(0.0, kTwoPi);
    return pts;
}

} // namespace

TEST_CASE("param_count matches the explicit layer sum") {
    const NetworkArch a = small_arch(2);
    const Eigen::Index de = 2 * 3;
    const Eigen::Index expect = 3 * de + (8 * de + 8) + (8 * 8 + 8) + (8 + 1);
    CHECK(a.param_count() == expect);

    NetworkArch full;
    full.input_dim = 2;
    full.embed_terms = 10;
    full.hidden_dim = 40;
    full.n_layers = 7;
    const Eigen::Index de2 = 20;
    CHECK(full.param_count() ==
          3 * de2 + (40 * de2 + 40) + 5 * (40 * 40 + 40) + (40 + 1));
}

TEST_CASE("arch validation rejects bad shapes") {
    NetworkArch a = small_arch(2);
    a.input_dim = 1;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a = small_arch(2);
    a.n_layers = 1;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
    a = small_arch(2);
    a.embed_terms = 0;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("init_params is deterministic, seed-sensitive, finite") {
    const NetworkArch a = small_arch(2);
    const ParamVector t1 = init_params(a, 7);
    const ParamVector t2 = init_params(a, 7);
    const ParamVector t3 = init_params(a, 8);
    CHECK(t1 == t2); // bitwise
    CHECK(t1 != t3);
    CHECK(t1.size() == a.param_count());
    CHECK(t1.allFinite());
}

TEST_CASE("network is periodic by construction") {
    for (int d : {2, 3}) {
        const NetworkArch a = small_arch(d);
        const MlpNet net(a);
        RngState rng{71, 0};
        const ParamVector theta = init_params(a, 5);
        const Eigen::MatrixXd pts = random_points(10, d, rng);
        const FieldBatch f0 = net.evaluate(theta, pts, 2);
        for (int i = 0; i < d; ++i) {
            Eigen::MatrixXd shifted = pts;
            shifted.col(i).array() += kTwoPi;
            const FieldBatch f1 = net.evaluate(theta, shifted, 2);
            CHECK((f0.value - f1.value).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((f0.grad - f1.grad).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((f0.laplacian - f1.laplacian).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("custom periods shift the embedding frequency") {
    NetworkArch a = small_arch(2);
    a.lengths = Eigen::VectorXd(2);
    a.lengths << 2.0, kTwoPi;
    const MlpNet net(a);
    const ParamVector theta = init_params(a, 5);
    RngState rng{72, 0};
    Eigen::MatrixXd pts = random_points(6, 2, rng);
    Eigen::MatrixXd shifted = pts;
    shifted.col(0).array() += 2.0;
    const FieldBatch f0 = net.evaluate(theta, pts, 2);
    const FieldBatch f1 = net.evaluate(theta, shifted, 2);
    CHECK((f0.value - f1.value).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f0.laplacian - f1.laplacian).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient and laplacian match finite differences") {
    for (int d : {2, 3}) {
        const NetworkArch a = small_arch(d);
        const MlpNet net(a);
        RngState rng{99, 0};
        for (int trial = 0; trial < 25; ++trial) {
            const ParamVector theta = init_params(a, 100 + static_cast<std::uint64_t>(trial));
            const Eigen::MatrixXd pts = random_points(4, d, rng);
            const FieldBatch fb = net.evaluate(theta, pts, 2);
            const double gscale = fb.grad.cwiseAbs().maxCoeff();
            // The second-difference oracle carries roundoff of order
            // eps*|u|/h^2, so its scale floor is the field magnitude.
            const double lscale = std::max(fb.laplacian.cwiseAbs().maxCoeff(),
                                           fb.value.cwiseAbs().maxCoeff());
            for (Eigen::Index p = 0; p < pts.rows(); ++p) {
                for (int i = 0; i < d; ++i) {
                    const double fd = fd_space_grad(net, theta, pts.row(p), i, 1e-5);
                    CHECK(rel_err(fb.grad(p, i), fd, gscale) < 1e-6);
                }
                const double fdl = fd_laplacian(net, theta, pts.row(p), 1e-4);
                CHECK(rel_err(fb.laplacian[p], fdl, lscale) < 1e-5);
            }
        }
    }
}

TEST_CASE("parameter jacobian matches finite differences") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    RngState rng{55, 0};
    for (int trial = 0; trial < 10; ++trial) {
        const ParamVector theta = init_params(a, 200 + static_cast<std::uint64_t>(trial));
        const Eigen::MatrixXd pts = random_points(3, 2, rng);
        // random strictly-increasing subset
        IndexSet subset = subsample_params(a.param_count(), 12, rng);
        const Eigen::MatrixXd J = net.jacobian(theta, pts, subset);
        const double scale = J.cwiseAbs().maxCoeff();
        for (Eigen::Index p = 0; p < pts.rows(); ++p)
            for (std::size_t s = 0; s < subset.size(); ++s) {
                const double fd = fd_param_grad(net, theta, pts.row(p), subset[s], 1e-6);
                CHECK(rel_err(J(p, static_cast<Eigen::Index>(s)), fd, scale) < 1e-5);
            }
    }
}

TEST_CASE("final-layer bias column of the jacobian is identically one") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    const ParamVector theta = init_params(a, 1);
    RngState rng{5, 0};
    const Eigen::MatrixXd pts = random_points(7, 2, rng);
    const IndexSet subset{a.param_count() - 1}; // last parameter is the output bias
    const Eigen::MatrixXd J = net.jacobian(theta, pts, subset);
    CHECK((J.array() - 1.0).abs().maxCoeff() < 1e-15);
}

TEST_CASE("jacobian rejects invalid subsets") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    const ParamVector theta = init_params(a, 1);
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_AS(net.jacobian(theta, pts, IndexSet{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(net.jacobian(theta, pts, IndexSet{a.param_count()}), std::invalid_argument);
    CHECK_THROWS_AS(net.jacobian(theta, pts, IndexSet{3, 1}), std::invalid_argument);
}

TEST_CASE("linear toy model: update is exactly linear in parameters") {
    const LinearFieldModel toy(1, {sin_basis(0), cos_basis(0)});
    Eigen::MatrixXd pts(5, 1);
    pts << 0.1, 0.9, 2.2, 4.0, 5.5;
    ParamVector theta(2), dtheta(2);
    theta << 0.3, -0.7;
    dtheta << 1.1, 0.25;
    const Eigen::MatrixXd J = toy.jacobian(theta, pts, full_index_set(2));
    const Eigen::VectorXd before = toy.evaluate(theta, pts, 0).value;
    const Eigen::VectorXd after = toy.evaluate(theta + dtheta, pts, 0).value;
    CHECK(((after - before) - J * dtheta).cwiseAbs().maxCoeff() < 1e-12);
    // J columns are the basis functions themselves
    for (Eigen::Index p = 0; p < pts.rows(); ++p) {
        CHECK(J(p, 0) == doctest::Approx(std::sin(pts(p, 0))).epsilon(1e-15));
        CHECK(J(p, 1) == doctest::Approx(std::cos(pts(p, 0))).epsilon(1e-15));
    }
}

TEST_CASE("stacked jacobian (value + gradient rows) matches finite differences") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    RngState rng{77, 0};
    const ParamVector theta = init_params(a, 42);
    const Eigen::MatrixXd pts = random_points(3, 2, rng);
    IndexSet subset = subsample_params(a.param_count(), 10, rng);
    const Eigen::MatrixXd J = net.jacobian_with_grad(theta, pts, subset);
    REQUIRE(J.rows() == 3 * pts.rows());
    const double scale = J.cwiseAbs().maxCoeff();

    const Eigen::MatrixXd Jv = net.jacobian(theta, pts, subset);
    CHECK((J.topRows(pts.rows()) - Jv).cwiseAbs().maxCoeff() < 1e-14);

    for (Eigen::Index p = 0; p < pts.rows(); ++p)
        for (int i = 0; i < 2; ++i)
            for (std::size_t s = 0; s < subset.size(); ++s) {
                const double fd =
                    fd_param_grad_of_grad(net, theta, pts.row(p), i, subset[s], 1e-6);
                const double an = J(pts.rows() * (1 + i) + p, static_cast<Eigen::Index>(s));
                CHECK(rel_err(an, fd, scale) < 1e-5);
            }
}

TEST_CASE("weighted_param_gradient equals J^T coeff") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    RngState rng{88, 0};
    const ParamVector theta = init_params(a, 3);
    const Eigen::MatrixXd pts = random_points(9, 2, rng);
    Eigen::VectorXd coeff(9);
    for (Eigen::Index i = 0; i < 9; ++i) coeff[i] = rng.next_normal();
    const Eigen::MatrixXd J = net.jacobian(theta, pts, full_index_set(a.param_count()));
    const Eigen::VectorXd direct = net.weighted_param_gradient(theta, pts, coeff);
    CHECK((direct - J.transpose() * coeff).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evaluate validates its inputs") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    const ParamVector theta = init_params(a, 1);
    Eigen::MatrixXd pts3 = Eigen::MatrixXd::Zero(1, 3);
    CHECK_THROWS_AS(net.evaluate(theta, pts3, 0), std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(1, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(net.evaluate(theta, bad, 0), std::invalid_argument);
    Eigen::MatrixXd ok = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_AS(net.evaluate(theta, ok, 3), std::invalid_argument);
    CHECK_THROWS_AS(net.evaluate(theta.head(3), ok, 0), std::invalid_argument);
}

TEST_CASE("non-finite parameters are reported with a layer index") {
    const NetworkArch a = small_arch(2);
    const MlpNet net(a);
    ParamVector theta = init_params(a, 1);
    theta[theta.size() - 1] = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(1, 2);
    CHECK_THROWS_WITH_AS(net.evaluate(theta, pts, 0),
                         doctest::Contains("layer"), std::runtime_error);
}
