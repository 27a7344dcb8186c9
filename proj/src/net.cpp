#include "teng/net.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace teng {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Flat parameter layout:
//   [ a (d*E) | phi (d*E) | c (d*E) | W_1, b_1 | ... | W_L, b_L ]
// with W_l stored row-major.
struct Layout {
    int d, E, h, L;
    Eigen::Index a_off, phi_off, c_off;
    std::vector<Eigen::Index> w_off, b_off; // index l-1 for layer l
    std::vector<Eigen::Index> in_dim, out_dim;
    Eigen::Index total;
};

Layout make_layout(const NetworkArch& arch) {
    Layout lo;
    lo.d = arch.input_dim;
    lo.E = arch.embed_terms;
    lo.h = arch.hidden_dim;
    lo.L = arch.n_layers;
    const Eigen::Index de = static_cast<Eigen::Index>(lo.d) * lo.E;
    lo.a_off = 0;
    lo.phi_off = de;
    lo.c_off = 2 * de;
    Eigen::Index off = 3 * de;
    for (int l = 1; l <= lo.L; ++l) {
        const Eigen::Index in = (l == 1) ? de : lo.h;
        const Eigen::Index out = (l == lo.L) ? 1 : lo.h;
        lo.in_dim.push_back(in);
        lo.out_dim.push_back(out);
        lo.w_off.push_back(off);
        off += in * out;
        lo.b_off.push_back(off);
        off += out;
    }
    lo.total = off;
    return lo;
}

inline Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
weight_view(const ParamVector& theta, const Layout& lo, int l) {
    return {theta.data() + lo.w_off[l - 1], lo.out_dim[l - 1], lo.in_dim[l - 1]};
}

inline Eigen::Map<const Eigen::VectorXd> bias_view(const ParamVector& theta, const Layout& lo,
                                                   int l) {
    return {theta.data() + lo.b_off[l - 1], lo.out_dim[l - 1]};
}

} // namespace

Eigen::Index NetworkArch::param_count() const {
    const Eigen::Index de = static_cast<Eigen::Index>(input_dim) * embed_terms;
    Eigen::Index n = 3 * de;                         // a, phi, c
    n += hidden_dim * de + hidden_dim;               // first layer
    n += static_cast<Eigen::Index>(n_layers - 2) *
         (static_cast<Eigen::Index>(hidden_dim) * hidden_dim + hidden_dim);
    n += hidden_dim + 1;                             // output layer
    return n;
}

Eigen::VectorXd NetworkArch::periods() const {
    if (lengths.size() == 0) return Eigen::VectorXd::Constant(input_dim, kTwoPi);
    return lengths;
}

void NetworkArch::validate() const {
    if (input_dim != 2 && input_dim != 3)
        throw std::invalid_argument("NetworkArch: input_dim must be 2 or 3");
    if (n_layers < 2) throw std::invalid_argument("NetworkArch: n_layers must be >= 2");
    if (hidden_dim < 1) throw std::invalid_argument("NetworkArch: hidden_dim must be >= 1");
    if (embed_terms < 1) throw std::invalid_argument("NetworkArch: embed_terms must be >= 1");
    if (lengths.size() != 0 && lengths.size() != input_dim)
        throw std::invalid_argument("NetworkArch: lengths size != input_dim");
    if (lengths.size() != 0 && (lengths.array() <= 0.0).any())
        throw std::invalid_argument("NetworkArch: lengths must be positive");
}

// ---------------------------------------------------------------------------

struct MlpNet::Workspace {
    Layout lo;

    Eigen::VectorXd emb, emb_cos, emb_sin; // d*E
    Eigen::MatrixXd emb_g, emb_h;          // d*E x d, diagonal-block structure

    std::vector<Eigen::VectorXd> act;      // act[l-1]: post-tanh values, l = 1..L-1
    std::vector<Eigen::MatrixXd> gz, gu;   // spatial grads pre/post activation
    std::vector<Eigen::MatrixXd> hz, hu;   // spatial diagonal second derivatives

    double out_value = 0.0;
    Eigen::RowVectorXd out_grad;
    double out_lap = 0.0;

    Eigen::VectorXd vbar, gbar, zbar, gzbar; // backprop scratch

    explicit Workspace(const Layout& layout) : lo(layout) {
        const Eigen::Index de = static_cast<Eigen::Index>(lo.d) * lo.E;
        emb.resize(de);
        emb_cos.resize(de);
        emb_sin.resize(de);
        emb_g.setZero(de, lo.d);
        emb_h.setZero(de, lo.d);
        for (int l = 1; l <= lo.L; ++l) {
            act.emplace_back(lo.out_dim[l - 1]);
            gz.emplace_back(lo.out_dim[l - 1], lo.d);
            gu.emplace_back(lo.out_dim[l - 1], lo.d);
            hz.emplace_back(lo.out_dim[l - 1], lo.d);
            hu.emplace_back(lo.out_dim[l - 1], lo.d);
        }
        out_grad.resize(lo.d);
    }
};

MlpNet::MlpNet(NetworkArch arch) : arch_(std::move(arch)) {
    arch_.validate();
    const Eigen::VectorXd periods = arch_.periods();
    omega_ = kTwoPi / periods.array();
}

void MlpNet::forward(const ParamVector& theta, const Eigen::VectorXd& x, int order,
                     Workspace& ws) const {
    const Layout& lo = ws.lo;
    const Eigen::Index de = static_cast<Eigen::Index>(lo.d) * lo.E;

    // embedding
    for (int i = 0; i < lo.d; ++i) {
        const double w = omega_[i];
        for (int j = 0; j < lo.E; ++j) {
            const Eigen::Index idx = static_cast<Eigen::Index>(i) * lo.E + j;
            const double a = theta[lo.a_off + idx];
            const double phi = theta[lo.phi_off + idx];
            const double cc = theta[lo.c_off + idx];
            const double cz = std::cos(w * x[i] + phi);
            const double sz = std::sin(w * x[i] + phi);
            ws.emb_cos[idx] = cz;
            ws.emb_sin[idx] = sz;
            ws.emb[idx] = a * cz + cc;
            if (order >= 1) ws.emb_g(idx, i) = -a * w * sz;
            if (order >= 2) ws.emb_h(idx, i) = -a * w * w * cz;
        }
    }
    if (!ws.emb.allFinite())
        throw std::runtime_error("evaluate_field: non-finite value in embedding layer");

    const Eigen::VectorXd* in_v = &ws.emb;
    const Eigen::MatrixXd* in_g = &ws.emb_g;
    const Eigen::MatrixXd* in_h = &ws.emb_h;
    (void)de;

    for (int l = 1; l <= lo.L; ++l) {
        const auto W = weight_view(theta, lo, l);
        const auto b = bias_view(theta, lo, l);
        Eigen::VectorXd& z = ws.act[l - 1];
        z.noalias() = W * (*in_v);
        z += b;
        if (order >= 1) ws.gz[l - 1].noalias() = W * (*in_g);
        if (order >= 2) ws.hz[l - 1].noalias() = W * (*in_h);

        if (!z.allFinite())
            throw std::runtime_error("evaluate_field: non-finite value at layer " +
                                     std::to_string(l));

        if (l == lo.L) {
            ws.out_value = z[0];
            if (order >= 1) ws.out_grad = ws.gz[l - 1].row(0);
            if (order >= 2) ws.out_lap = ws.hz[l - 1].row(0).sum();
            return;
        }

        // tanh and its chain rule for first/diagonal-second derivatives
        z = z.array().tanh();
        if (order >= 1) {
            const auto tp = (1.0 - z.array().square()).matrix().asDiagonal();
            ws.gu[l - 1].noalias() = tp * ws.gz[l - 1];
        }
        if (order >= 2) {
            Eigen::MatrixXd& hu = ws.hu[l - 1];
            hu = ws.hz[l - 1];
            for (Eigen::Index m = 0; m < z.size(); ++m) {
                const double t = z[m];
                const double tp = 1.0 - t * t;
                hu.row(m) = tp * hu.row(m) -
                            2.0 * t * tp * ws.gz[l - 1].row(m).array().square().matrix();
            }
        }
        in_v = &ws.act[l - 1];
        in_g = &ws.gu[l - 1];
        in_h = &ws.hu[l - 1];
    }
}

FieldBatch MlpNet::evaluate(const ParamVector& theta, const Eigen::MatrixXd& points,
                            int order) const {
    if (theta.size() != param_count())
        throw std::invalid_argument("evaluate: parameter vector has wrong length");
    if (points.cols() != arch_.input_dim)
        throw std::invalid_argument("evaluate: points dimensionality mismatch");
    if (!points.allFinite()) throw std::invalid_argument("evaluate: non-finite points");
    if (order < 0 || order > 2) throw std::invalid_argument("evaluate: order must be 0, 1 or 2");

    const Eigen::Index n = points.rows();
    FieldBatch fb;
    fb.points = points;
    fb.value.resize(n);
    if (order >= 1) fb.grad.resize(n, arch_.input_dim);
    if (order >= 2) fb.laplacian.resize(n);

    Workspace ws(make_layout(arch_));
    for (Eigen::Index p = 0; p < n; ++p) {
        forward(theta, points.row(p).transpose(), order, ws);
        fb.value[p] = ws.out_value;
        if (order >= 1) fb.grad.row(p) = ws.out_grad;
        if (order >= 2) fb.laplacian[p] = ws.out_lap;
    }
    return fb;
}

void MlpNet::backward_value(const ParamVector& theta, Workspace& ws,
                            Eigen::VectorXd& grad_out) const {
    const Layout& lo = ws.lo;

    // output layer: u = W_L act[L-2] + b_L
    {
        const Eigen::VectorXd& in = lo.L >= 2 ? ws.act[lo.L - 2] : ws.emb;
        grad_out.segment(lo.w_off[lo.L - 1], lo.in_dim[lo.L - 1]) += in;
        grad_out[lo.b_off[lo.L - 1]] += 1.0;
        ws.vbar = weight_view(theta, lo, lo.L).row(0).transpose();
    }

    for (int l = lo.L - 1; l >= 1; --l) {
        const Eigen::VectorXd& u = ws.act[l - 1];
        ws.zbar = (ws.vbar.array() * (1.0 - u.array().square())).matrix();
        const Eigen::VectorXd& in = (l >= 2) ? ws.act[l - 2] : ws.emb;

        auto wgrad = Eigen::Map<
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            grad_out.data() + lo.w_off[l - 1], lo.out_dim[l - 1], lo.in_dim[l - 1]);
        wgrad.noalias() += ws.zbar * in.transpose();
        grad_out.segment(lo.b_off[l - 1], lo.out_dim[l - 1]) += ws.zbar;
        ws.vbar.noalias() = weight_view(theta, lo, l).transpose() * ws.zbar;
    }

    // ws.vbar is now the adjoint of the embedding vector
    for (int i = 0; i < lo.d; ++i) {
        for (int j = 0; j < lo.E; ++j) {
            const Eigen::Index idx = static_cast<Eigen::Index>(i) * lo.E + j;
            const double eb = ws.vbar[idx];
            const double a = theta[lo.a_off + idx];
            grad_out[lo.a_off + idx] += eb * ws.emb_cos[idx];
            grad_out[lo.phi_off + idx] += eb * (-a * ws.emb_sin[idx]);
            grad_out[lo.c_off + idx] += eb;
        }
    }
}

void MlpNet::backward_spatial_grad(const ParamVector& theta, int grad_dim, Workspace& ws,
                                   Eigen::VectorXd& grad_out) const {
    const Layout& lo = ws.lo;
    const int gd = grad_dim;

    // output layer: out_grad[gd] = (W_L * gu[L-2])(0, gd); no bias dependence
    {
        const Eigen::MatrixXd& gin = lo.L >= 2 ? ws.gu[lo.L - 2] : ws.emb_g;
        grad_out.segment(lo.w_off[lo.L - 1], lo.in_dim[lo.L - 1]) += gin.col(gd);
        ws.vbar = Eigen::VectorXd::Zero(lo.in_dim[lo.L - 1]);
        ws.gbar = weight_view(theta, lo, lo.L).row(0).transpose();
    }

    for (int l = lo.L - 1; l >= 1; --l) {
        const Eigen::VectorXd& u = ws.act[l - 1];
        const auto gz_col = ws.gz[l - 1].col(gd);
        // u = tanh(z), gu = (1-u^2) .* gz
        ws.zbar.resize(u.size());
        ws.gzbar.resize(u.size());
        for (Eigen::Index m = 0; m < u.size(); ++m) {
            const double t = u[m];
            const double tp = 1.0 - t * t;
            ws.zbar[m] = ws.vbar[m] * tp - ws.gbar[m] * 2.0 * t * tp * gz_col[m];
            ws.gzbar[m] = ws.gbar[m] * tp;
        }

        const Eigen::VectorXd& in = (l >= 2) ? ws.act[l - 2] : ws.emb;
        const Eigen::MatrixXd& gin = (l >= 2) ? ws.gu[l - 2] : ws.emb_g;

        auto wgrad = Eigen::Map<
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            grad_out.data() + lo.w_off[l - 1], lo.out_dim[l - 1], lo.in_dim[l - 1]);
        wgrad.noalias() += ws.zbar * in.transpose();
        wgrad.noalias() += ws.gzbar * gin.col(gd).transpose();
        grad_out.segment(lo.b_off[l - 1], lo.out_dim[l - 1]) += ws.zbar;

        const auto W = weight_view(theta, lo, l);
        ws.vbar.noalias() = W.transpose() * ws.zbar;
        ws.gbar.noalias() = W.transpose() * ws.gzbar;
    }

    for (int i = 0; i < lo.d; ++i) {
        const double w = omega_[i];
        for (int j = 0; j < lo.E; ++j) {
            const Eigen::Index idx = static_cast<Eigen::Index>(i) * lo.E + j;
            const double a = theta[lo.a_off + idx];
            const double vb = ws.vbar[idx];
            grad_out[lo.a_off + idx] += vb * ws.emb_cos[idx];
            grad_out[lo.phi_off + idx] += vb * (-a * ws.emb_sin[idx]);
            grad_out[lo.c_off + idx] += vb;
            if (i == gd) {
                const double gb = ws.gbar[idx];
                grad_out[lo.a_off + idx] += gb * (-w * ws.emb_sin[idx]);
                grad_out[lo.phi_off + idx] += gb * (-a * w * ws.emb_cos[idx]);
            }
        }
    }
}

Eigen::MatrixXd MlpNet::jacobian(const ParamVector& theta, const Eigen::MatrixXd& points,
                                 const IndexSet& subset) const {
    if (theta.size() != param_count())
        throw std::invalid_argument("jacobian: parameter vector has wrong length");
    Eigen::Index prev = -1;
    for (const auto s : subset) {
        if (s <= prev || s >= param_count())
            throw std::invalid_argument("jacobian: subset indices must be strictly increasing and valid");
        prev = s;
    }

    const Eigen::Index n = points.rows();
    Eigen::MatrixXd J(n, static_cast<Eigen::Index>(subset.size()));
    Workspace ws(make_layout(arch_));
    Eigen::VectorXd row(param_count());
    for (Eigen::Index p = 0; p < n; ++p) {
        forward(theta, points.row(p).transpose(), 0, ws);
        row.setZero();
        backward_value(theta, ws, row);
        for (std::size_t s = 0; s < subset.size(); ++s)
            J(p, static_cast<Eigen::Index>(s)) = row[subset[s]];
    }
    return J;
}

Eigen::VectorXd MlpNet::weighted_param_gradient(const ParamVector& theta,
                                                const Eigen::MatrixXd& points,
                                                const Eigen::VectorXd& coeff) const {
    if (coeff.size() != points.rows())
        throw std::invalid_argument("weighted_param_gradient: coeff length != point count");
    Workspace ws(make_layout(arch_));
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(param_count());
    Eigen::VectorXd row(param_count());
    for (Eigen::Index p = 0; p < points.rows(); ++p) {
        if (coeff[p] == 0.0) continue;
        forward(theta, points.row(p).transpose(), 0, ws);
        row.setZero();
        backward_value(theta, ws, row);
        acc += coeff[p] * row;
    }
    return acc;
}

Eigen::MatrixXd MlpNet::jacobian_with_grad(const ParamVector& theta,
                                           const Eigen::MatrixXd& points,
                                           const IndexSet& subset) const {
    const Eigen::Index n = points.rows();
    const int d = arch_.input_dim;
    Eigen::MatrixXd J((1 + d) * n, static_cast<Eigen::Index>(subset.size()));
    Workspace ws(make_layout(arch_));
    Eigen::VectorXd row(param_count());
    for (Eigen::Index p = 0; p < n; ++p) {
        forward(theta, points.row(p).transpose(), 1, ws);
        row.setZero();
        backward_value(theta, ws, row);
        for (std::size_t s = 0; s < subset.size(); ++s)
            J(p, static_cast<Eigen::Index>(s)) = row[subset[s]];
        for (int i = 0; i < d; ++i) {
            row.setZero();
            backward_spatial_grad(theta, i, ws, row);
            for (std::size_t s = 0; s < subset.size(); ++s)
                J(n * (1 + i) + p, static_cast<Eigen::Index>(s)) = row[subset[s]];
        }
    }
    return J;
}

Eigen::VectorXd FieldModel::weighted_param_gradient(const ParamVector& theta,
                                                    const Eigen::MatrixXd& points,
                                                    const Eigen::VectorXd& coeff) const {
    const Eigen::MatrixXd J = jacobian(theta, points, full_index_set(param_count()));
    return J.transpose() * coeff;
}

Eigen::MatrixXd FieldModel::jacobian_with_grad(const ParamVector&, const Eigen::MatrixXd&,
                                               const IndexSet&) const {
    throw std::logic_error("jacobian_with_grad: not supported by this model");
}

ParamVector init_params(const NetworkArch& arch, std::uint64_t seed) {
    arch.validate();
    const Layout lo = make_layout(arch);
    ParamVector theta = ParamVector::Zero(lo.total);
    RngState rng{seed, 0};

    // amplitudes kept moderate so the first tanh layer starts unsaturated
    const Eigen::Index de = static_cast<Eigen::Index>(lo.d) * lo.E;
    for (Eigen::Index i = 0; i < de; ++i) theta[lo.a_off + i] = rng.next_uniform(-0.5, 0.5);
    for (Eigen::Index i = 0; i < de; ++i) theta[lo.phi_off + i] = rng.next_uniform(0.0, kTwoPi);
    for (Eigen::Index i = 0; i < de; ++i) theta[lo.c_off + i] = rng.next_uniform(-0.5, 0.5);

    for (int l = 1; l <= lo.L; ++l) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(lo.in_dim[l - 1]));
        const Eigen::Index nw = lo.in_dim[l - 1] * lo.out_dim[l - 1];
        for (Eigen::Index i = 0; i < nw; ++i)
            theta[lo.w_off[l - 1] + i] = rng.next_uniform(-scale, scale);
        // biases stay zero
    }
    return theta;
}

} // namespace teng
