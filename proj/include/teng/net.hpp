#pragma once

#include <Eigen/Core>
#include <memory>
#include <span>

#include "teng/grid.hpp"
#include "teng/rng.hpp"

namespace teng {

using ParamVector = Eigen::VectorXd;

// Values and spatial derivatives of a scalar field at a batch of points.
// grad/laplacian are filled only when requested (order >= 1 / order == 2).
struct FieldBatch {
    Eigen::MatrixXd points;    // n x d
    Eigen::VectorXd value;     // n
    Eigen::MatrixXd grad;      // n x d
    Eigen::VectorXd laplacian; // n

    bool has_grad() const { return grad.size() > 0; }
    bool has_laplacian() const { return laplacian.size() > 0; }
};

// Fixed tanh MLP with a learnable periodic input embedding.
//
//   u(x) = W_L tanh( ... tanh(W_1 e(x) + b_1) ... ) + b_L
//   e(x)[i*E + j] = a_ij cos(w_i x_i + phi_ij) + c_ij,   w_i = 2*pi / lengths_i
//
// The embedding makes the network exactly periodic in each coordinate.
struct NetworkArch {
    int input_dim = 2;
    int embed_terms = 8; // cosine terms per input coordinate
    int hidden_dim = 16;
    int n_layers = 3;                 // number of weight matrices (>= 2)
    Eigen::VectorXd lengths;          // per-dimension period; empty -> 2*pi each

    Eigen::Index param_count() const;
    Eigen::VectorXd periods() const;  // lengths with the 2*pi default applied
    void validate() const;

    bool operator==(const NetworkArch& o) const {
        return input_dim == o.input_dim && embed_terms == o.embed_terms &&
               hidden_dim == o.hidden_dim && n_layers == o.n_layers &&
               periods() == o.periods();
    }
};

// Minimal surface the time steppers need from a parametric field. The MLP is
// the production model; tests plug in degenerate architectures through the
// same interface.
class FieldModel {
public:
    virtual ~FieldModel() = default;

    virtual Eigen::Index param_count() const = 0;
    virtual int dims() const = 0;

    // order: 0 value, 1 +gradient, 2 +laplacian
    virtual FieldBatch evaluate(const ParamVector& theta, const Eigen::MatrixXd& points,
                                int order) const = 0;

    // d u(x_p) / d theta_{subset[s]}, one row per point
    virtual Eigen::MatrixXd jacobian(const ParamVector& theta, const Eigen::MatrixXd& points,
                                     const IndexSet& subset) const = 0;

    // sum_p coeff_p * d u(x_p)/d theta  (full-length gradient accumulation)
    virtual Eigen::VectorXd weighted_param_gradient(const ParamVector& theta,
                                                    const Eigen::MatrixXd& points,
                                                    const Eigen::VectorXd& coeff) const;

    // Stacked Jacobian of [value; du/dx_1; ...; du/dx_d] used by the Sobolev
    // initial fit. Row layout: all value rows, then all rows of du/dx_1, ...
    virtual Eigen::MatrixXd jacobian_with_grad(const ParamVector& theta,
                                               const Eigen::MatrixXd& points,
                                               const IndexSet& subset) const;
};

class MlpNet final : public FieldModel {
public:
    explicit MlpNet(NetworkArch arch);

    const NetworkArch& arch() const { return arch_; }
    Eigen::Index param_count() const override { return arch_.param_count(); }
    int dims() const override { return arch_.input_dim; }

    FieldBatch evaluate(const ParamVector& theta, const Eigen::MatrixXd& points,
                        int order) const override;
    Eigen::MatrixXd jacobian(const ParamVector& theta, const Eigen::MatrixXd& points,
                             const IndexSet& subset) const override;
    Eigen::VectorXd weighted_param_gradient(const ParamVector& theta,
                                            const Eigen::MatrixXd& points,
                                            const Eigen::VectorXd& coeff) const override;
    Eigen::MatrixXd jacobian_with_grad(const ParamVector& theta, const Eigen::MatrixXd& points,
                                       const IndexSet& subset) const override;

private:
    NetworkArch arch_;
    Eigen::VectorXd omega_; // 2*pi / period per input dim

    struct Workspace;
    void forward(const ParamVector& theta, const Eigen::VectorXd& x, int order,
                 Workspace& ws) const;
    void backward_value(const ParamVector& theta, Workspace& ws, Eigen::VectorXd& grad_out) const;
    void backward_spatial_grad(const ParamVector& theta, int grad_dim, Workspace& ws,
                               Eigen::VectorXd& grad_out) const;
};

// Deterministic initialization: weights uniform with 1/sqrt(fan_in) scale,
// biases zero, embedding phases uniform in [0, 2*pi).
ParamVector init_params(const NetworkArch& arch, std::uint64_t seed);

} // namespace teng
