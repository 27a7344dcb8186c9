#include "teng/pde.hpp"

#include <cmath>
#include <stdexcept>

namespace teng {

void PdeSpec::validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("PdeSpec: nu must be positive");
    if (dims != 2 && dims != 3) throw std::invalid_argument("PdeSpec: dims must be 2 or 3");
    if (kind != PdeKind::Heat && dims != 2)
        throw std::invalid_argument("PdeSpec: Allen-Cahn and Burgers are 2-D only");
}

Eigen::VectorXd apply_operator(const PdeSpec& pde, const FieldBatch& fb) {
    if (!fb.has_laplacian()) throw std::invalid_argument("apply_operator: laplacian missing");
    if (pde.needs_grad() && !fb.has_grad())
        throw std::invalid_argument("apply_operator: gradient missing (Burgers)");

    switch (pde.kind) {
    case PdeKind::Heat:
        return pde.nu * fb.laplacian;
    case PdeKind::AllenCahn:
        return pde.nu * fb.laplacian.array() + fb.value.array() - fb.value.array().cube();
    case PdeKind::Burgers:
        return pde.nu * fb.laplacian.array() -
               fb.value.array() * fb.grad.rowwise().sum().array();
    }
    throw std::logic_error("apply_operator: unknown PDE kind");
}

// ---------------------------------------------------------------------------

InitialCondition InitialCondition::two_dim_exp() {
    InitialCondition ic;
    ic.kind_ = IcKind::TwoDimExp;
    return ic;
}

InitialCondition InitialCondition::burgers_alt() {
    InitialCondition ic;
    ic.kind_ = IcKind::BurgersAlt;
    return ic;
}

InitialCondition InitialCondition::three_dim_trig() {
    // Benchmark coefficient table; flat index 4*(k1-1) + 2*(k2-1) + (k3-1).
    return three_dim_trig(0.043,
                          {0.047, -0.021, -0.021, -0.041, 0.034, 0.024, -0.02, 0.0},
                          {-0.075, 0.074, -0.056, -0.007, -0.027, 0.032, -0.008, 0.0});
}

InitialCondition InitialCondition::three_dim_trig(double a000,
                                                  const std::array<double, 8>& a_coeffs,
                                                  const std::array<double, 8>& b_coeffs) {
    InitialCondition ic;
    ic.kind_ = IcKind::ThreeDimTrig;
    ic.a000_ = a000;
    ic.a_ = a_coeffs;
    ic.b_ = b_coeffs;
    return ic;
}

namespace {

// u = (1/100) sum_s sign(s) exp(3 s1 sin(x1) + s2 sin(x2)) over the four sign
// combinations; each term is exp(a sin x1 + b sin x2) scaled by +-1/100.
void eval_two_dim_exp(const Eigen::MatrixXd& pts, int order, FieldBatch& fb) {
    const Eigen::Index n = pts.rows();
    const double coefs[4][3] = {
        {0.01, 3.0, 1.0}, {0.01, -3.0, 1.0}, {-0.01, 3.0, -1.0}, {-0.01, -3.0, -1.0}};
    for (Eigen::Index p = 0; p < n; ++p) {
        const double x1 = pts(p, 0), x2 = pts(p, 1);
        const double s1 = std::sin(x1), c1 = std::cos(x1);
        const double s2 = std::sin(x2), c2 = std::cos(x2);
        double u = 0.0, g1 = 0.0, g2 = 0.0, lap = 0.0;
        for (const auto& [w, a, b] : coefs) {
            const double t = w * std::exp(a * s1 + b * s2);
            u += t;
            g1 += t * a * c1;
            g2 += t * b * c2;
            lap += t * (a * c1 * a * c1 - a * s1) + t * (b * c2 * b * c2 - b * s2);
        }
        fb.value[p] = u;
        if (order >= 1) {
            fb.grad(p, 0) = g1;
            fb.grad(p, 1) = g2;
        }
        if (order >= 2) fb.laplacian[p] = lap;
    }
}

// u = (1/50) exp(g)^2 with g = cos(pi*x1 - 2) + sin(x2 - 1); native domain
// [0,2) x [0,2*pi).
void eval_burgers_alt(const Eigen::MatrixXd& pts, int order, FieldBatch& fb) {
    const double pi = 3.14159265358979323846264338;
    for (Eigen::Index p = 0; p < pts.rows(); ++p) {
        const double x1 = pts(p, 0), x2 = pts(p, 1);
        const double g = std::cos(pi * x1 - 2.0) + std::sin(x2 - 1.0);
        const double g1 = -pi * std::sin(pi * x1 - 2.0);
        const double g2 = std::cos(x2 - 1.0);
        const double g11 = -pi * pi * std::cos(pi * x1 - 2.0);
        const double g22 = -std::sin(x2 - 1.0);
        const double u = 0.02 * std::exp(2.0 * g);
        fb.value[p] = u;
        if (order >= 1) {
            fb.grad(p, 0) = 2.0 * u * g1;
            fb.grad(p, 1) = 2.0 * u * g2;
        }
        if (order >= 2)
            fb.laplacian[p] = u * (4.0 * g1 * g1 + 2.0 * g11) + u * (4.0 * g2 * g2 + 2.0 * g22);
    }
}

void eval_three_dim_trig(const InitialCondition& ic, const Eigen::MatrixXd& pts, int order,
                         FieldBatch& fb) {
    for (Eigen::Index p = 0; p < pts.rows(); ++p) {
        double u = ic.a000();
        double lap = 0.0;
        for (int k1 = 1; k1 <= 2; ++k1)
            for (int k2 = 1; k2 <= 2; ++k2)
                for (int k3 = 1; k3 <= 2; ++k3) {
                    const int idx = 4 * (k1 - 1) + 2 * (k2 - 1) + (k3 - 1);
                    const double A = ic.a_coeffs()[idx];
                    const double B = ic.b_coeffs()[idx];
                    const int k[3] = {k1, k2, k3};
                    double cs[3], sn[3];
                    for (int i = 0; i < 3; ++i) {
                        cs[i] = std::cos(k[i] * pts(p, i));
                        sn[i] = std::sin(k[i] * pts(p, i));
                    }
                    const double pc = cs[0] * cs[1] * cs[2];
                    const double ps = sn[0] * sn[1] * sn[2];
                    u += A * pc + B * ps;
                    const double k2sum = static_cast<double>(k1 * k1 + k2 * k2 + k3 * k3);
                    lap += -k2sum * (A * pc + B * ps);
                }
        fb.value[p] = u;
        if (order >= 2) fb.laplacian[p] = lap;
    }
    if (order >= 1) {
        for (Eigen::Index p = 0; p < pts.rows(); ++p) {
            for (int i = 0; i < 3; ++i) fb.grad(p, i) = 0.0;
            for (int k1 = 1; k1 <= 2; ++k1)
                for (int k2 = 1; k2 <= 2; ++k2)
                    for (int k3 = 1; k3 <= 2; ++k3) {
                        const int idx = 4 * (k1 - 1) + 2 * (k2 - 1) + (k3 - 1);
                        const double A = ic.a_coeffs()[idx];
                        const double B = ic.b_coeffs()[idx];
                        const int k[3] = {k1, k2, k3};
                        double cs[3], sn[3];
                        for (int i = 0; i < 3; ++i) {
                            cs[i] = std::cos(k[i] * pts(p, i));
                            sn[i] = std::sin(k[i] * pts(p, i));
                        }
                        for (int i = 0; i < 3; ++i) {
                            double dA = A, dB = B;
                            for (int m = 0; m < 3; ++m) {
                                if (m == i) {
                                    dA *= -k[m] * sn[m];
                                    dB *= k[m] * cs[m];
                                } else {
                                    dA *= cs[m];
                                    dB *= sn[m];
                                }
                            }
                            fb.grad(p, i) += dA + dB;
                        }
                    }
        }
    }
}

} // namespace

FieldBatch InitialCondition::evaluate(const Eigen::MatrixXd& points, int order) const {
    if (points.cols() != dims())
        throw std::invalid_argument("initial_condition: points dimensionality mismatch");
    if (order < 0 || order > 2)
        throw std::invalid_argument("initial_condition: order must be 0, 1 or 2");

    FieldBatch fb;
    fb.points = points;
    fb.value.resize(points.rows());
    if (order >= 1) fb.grad.resize(points.rows(), dims());
    if (order >= 2) fb.laplacian.resize(points.rows());

    switch (kind_) {
    case IcKind::TwoDimExp:
        eval_two_dim_exp(points, order, fb);
        break;
    case IcKind::BurgersAlt:
        eval_burgers_alt(points, order, fb);
        break;
    case IcKind::ThreeDimTrig:
        eval_three_dim_trig(*this, points, order, fb);
        break;
    }
    return fb;
}

InitialCondition initial_condition_by_name(const std::string& name) {
    if (name == "two-dim-exp") return InitialCondition::two_dim_exp();
    if (name == "three-dim-trig") return InitialCondition::three_dim_trig();
    if (name == "burgers-alt") return InitialCondition::burgers_alt();
    throw std::invalid_argument("unknown initial condition: " + name);
}

std::string to_string(IcKind kind) {
    switch (kind) {
    case IcKind::TwoDimExp: return "two-dim-exp";
    case IcKind::ThreeDimTrig: return "three-dim-trig";
    case IcKind::BurgersAlt: return "burgers-alt";
    }
    return "?";
}

} // namespace teng
