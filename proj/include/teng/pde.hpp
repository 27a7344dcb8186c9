#pragma once

#include <Eigen/Core>
#include <array>

#include "teng/net.hpp"

namespace teng {

enum class PdeKind { Heat, AllenCahn, Burgers };

struct PdeSpec {
    PdeKind kind = PdeKind::Heat;
    double nu = 0.1;
    int dims = 2;

    void validate() const;
    bool needs_grad() const { return kind == PdeKind::Burgers; }
};

// Pointwise right-hand side (L u)(x_p):
//   Heat:       nu * lap
//   AllenCahn:  nu * lap + u - u^3
//   Burgers:    nu * lap - u * sum_i du/dx_i
Eigen::VectorXd apply_operator(const PdeSpec& pde, const FieldBatch& fb);

enum class IcKind { TwoDimExp, ThreeDimTrig, BurgersAlt };

// Closed-form initial conditions with analytic first/second derivatives.
class InitialCondition {
public:
    // Named presets; ThreeDimTrig uses the built-in coefficient table.
    static InitialCondition two_dim_exp();
    static InitialCondition three_dim_trig();
    static InitialCondition burgers_alt();

    // ThreeDimTrig with user-supplied coefficients. a_coeffs/b_coeffs are
    // indexed [k1-1][k2-1][k3-1] flattened as 4*(k1-1) + 2*(k2-1) + (k3-1).
    static InitialCondition three_dim_trig(double a000, const std::array<double, 8>& a_coeffs,
                                           const std::array<double, 8>& b_coeffs);

    IcKind kind() const { return kind_; }
    int dims() const { return kind_ == IcKind::ThreeDimTrig ? 3 : 2; }

    FieldBatch evaluate(const Eigen::MatrixXd& points, int order) const;

    double a000() const { return a000_; }
    const std::array<double, 8>& a_coeffs() const { return a_; }
    const std::array<double, 8>& b_coeffs() const { return b_; }

private:
    IcKind kind_ = IcKind::TwoDimExp;
    double a000_ = 0.0;
    std::array<double, 8> a_{};
    std::array<double, 8> b_{};
};

InitialCondition initial_condition_by_name(const std::string& name);
std::string to_string(IcKind kind);

} // namespace teng
