#include "teng/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace teng {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Shared FFTW machinery: one cached plan (and buffer pair) per (shape, sign).
// FFTW planning is not thread safe, so the cache is mutex-protected; execution
// happens on the cached buffers under the same lock, which keeps results
// deterministic.
class FftCache {
public:
    static FftCache& instance() {
        static FftCache c;
        return c;
    }

    void transform(const std::vector<int>& shape, int sign,
                   std::vector<std::complex<double>>& data) {
        std::lock_guard<std::mutex> lock(mu_);
        const Key key{shape, sign};
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            Entry e;
            std::size_t n = 1;
            for (int s : shape) n *= static_cast<std::size_t>(s);
            e.buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
            e.n = n;
            e.plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), e.buf, e.buf,
                                   sign, FFTW_ESTIMATE);
            if (!e.plan) throw std::runtime_error("fftw: plan creation failed");
            it = plans_.emplace(key, e).first;
        }
        Entry& e = it->second;
        if (data.size() != e.n) throw std::logic_error("fftw: buffer size mismatch");
        std::memcpy(e.buf, data.data(), sizeof(fftw_complex) * e.n);
        fftw_execute(e.plan);
        std::memcpy(data.data(), e.buf, sizeof(fftw_complex) * e.n);
    }

private:
    using Key = std::pair<std::vector<int>, int>;
    struct Entry {
        fftw_plan plan = nullptr;
        fftw_complex* buf = nullptr;
        std::size_t n = 0;
    };
    std::mutex mu_;
    std::map<Key, Entry> plans_;
};

// smallest 7-smooth integer >= n (keeps FFTW fast on padded grids)
int next_fast_size(int n) {
    for (int m = n;; ++m) {
        int r = m;
        for (int p : {2, 3, 5, 7})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

} // namespace

std::size_t SpectrumField::lattice_size() const {
    return ipow(static_cast<std::size_t>(side()), dims);
}

std::complex<double>& SpectrumField::at(const std::vector<int>& k) {
    std::size_t idx = 0;
    for (int i = 0; i < dims; ++i) idx = idx * side() + static_cast<std::size_t>(k[i] + kmax);
    return coeffs[idx];
}

const std::complex<double>& SpectrumField::at(const std::vector<int>& k) const {
    return const_cast<SpectrumField*>(this)->at(k);
}

double SpectrumField::hermitian_defect() const {
    const int K = side();
    double worst = 0.0;
    std::vector<int> k(dims), kn(dims);
    for (std::size_t flat = 0; flat < coeffs.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - kmax;
            rem /= K;
        }
        for (int i = 0; i < dims; ++i) kn[i] = -k[i];
        const auto d = std::abs(at(kn) - std::conj(coeffs[flat]));
        worst = std::max(worst, d);
    }
    return worst;
}

double SpectrumField::energy() const {
    double e = 0.0;
    for (const auto& c : coeffs) e += std::norm(c);
    return e;
}

SpectrumField dft_forward(const Eigen::VectorXd& values, int dims, int n_per_dim, int kmax,
                          const Eigen::VectorXd& lengths) {
    if (n_per_dim < 2 * kmax + 1)
        throw std::invalid_argument("dft_forward: grid must have >= 2*kmax+1 points per dim");
    if (values.size() != static_cast<Eigen::Index>(ipow(n_per_dim, dims)))
        throw std::invalid_argument("dft_forward: value count != n_per_dim^dims");
    if (lengths.size() != dims) throw std::invalid_argument("dft_forward: lengths size != dims");

    std::vector<std::complex<double>> buf(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) buf[static_cast<std::size_t>(i)] = values[i];
    FftCache::instance().transform(std::vector<int>(dims, n_per_dim), FFTW_FORWARD, buf);

    SpectrumField s;
    s.dims = dims;
    s.kmax = kmax;
    s.lengths = lengths;
    s.coeffs.assign(ipow(static_cast<std::size_t>(s.side()), dims), {0.0, 0.0});

    const double norm = 1.0 / static_cast<double>(values.size());
    const int K = s.side();
    std::vector<int> k(dims);
    for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - kmax;
            rem /= K;
        }
        std::size_t src = 0;
        for (int i = 0; i < dims; ++i) {
            const int f = k[i] >= 0 ? k[i] : k[i] + n_per_dim;
            src = src * static_cast<std::size_t>(n_per_dim) + static_cast<std::size_t>(f);
        }
        s.coeffs[flat] = buf[src] * norm;
    }
    return s;
}

Eigen::VectorXd dft_inverse(const SpectrumField& s, int n_per_dim) {
    if (n_per_dim < s.side())
        throw std::invalid_argument("dft_inverse: grid must have >= 2*kmax+1 points per dim");

    std::vector<std::complex<double>> buf(ipow(static_cast<std::size_t>(n_per_dim), s.dims),
                                          {0.0, 0.0});
    const int K = s.side();
    std::vector<int> k(s.dims);
    for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = s.dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - s.kmax;
            rem /= K;
        }
        std::size_t dst = 0;
        for (int i = 0; i < s.dims; ++i) {
            const int f = k[i] >= 0 ? k[i] : k[i] + n_per_dim;
            dst = dst * static_cast<std::size_t>(n_per_dim) + static_cast<std::size_t>(f);
        }
        buf[dst] = s.coeffs[flat];
    }
    FftCache::instance().transform(std::vector<int>(s.dims, n_per_dim), FFTW_BACKWARD, buf);

    Eigen::VectorXd out(static_cast<Eigen::Index>(buf.size()));
    for (std::size_t i = 0; i < buf.size(); ++i) out[static_cast<Eigen::Index>(i)] = buf[i].real();
    return out;
}

SpectrumField truncate_spectrum(const SpectrumField& s, int kmax_new) {
    if (kmax_new > s.kmax)
        throw std::invalid_argument("truncate_spectrum: kmax_new exceeds current kmax");
    SpectrumField out;
    out.dims = s.dims;
    out.kmax = kmax_new;
    out.lengths = s.lengths;
    out.coeffs.assign(ipow(static_cast<std::size_t>(out.side()), out.dims), {0.0, 0.0});

    const int K = out.side();
    std::vector<int> k(out.dims);
    for (std::size_t flat = 0; flat < out.coeffs.size(); ++flat) {
        std::size_t rem = flat;
        for (int i = out.dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - kmax_new;
            rem /= K;
        }
        out.coeffs[flat] = s.at(k);
    }
    return out;
}

SpectrumField heat_propagate(const SpectrumField& u0, double nu, double t) {
    SpectrumField s = u0;
    const int K = s.side();
    std::vector<int> k(s.dims);
    for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
        std::size_t rem = flat;
        double kap2 = 0.0;
        for (int i = s.dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - s.kmax;
            rem /= K;
            const double kap = kTwoPi * k[i] / s.lengths[i];
            kap2 += kap * kap;
        }
        s.coeffs[flat] *= std::exp(-nu * kap2 * t);
    }
    return s;
}

Eigen::VectorXd heat_exact(const SpectrumField& u0, double nu, double t,
                           const Eigen::MatrixXd& eval_points) {
    if (t < 0.0) throw std::invalid_argument("heat_exact: t must be >= 0");
    if (eval_points.cols() != u0.dims)
        throw std::invalid_argument("heat_exact: point dimensionality mismatch");

    const SpectrumField s = heat_propagate(u0, nu, t);
    const int K = s.side();
    const int d = s.dims;

    Eigen::VectorXd out(eval_points.rows());
    std::vector<std::vector<std::complex<double>>> phase(
        static_cast<std::size_t>(d), std::vector<std::complex<double>>(static_cast<std::size_t>(K)));

    for (Eigen::Index p = 0; p < eval_points.rows(); ++p) {
        for (int i = 0; i < d; ++i) {
            const double ang = kTwoPi * eval_points(p, i) / s.lengths[i];
            const std::complex<double> step(std::cos(ang), std::sin(ang));
            std::complex<double> cur(std::cos(-s.kmax * ang), std::sin(-s.kmax * ang));
            for (int a = 0; a < K; ++a) {
                phase[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)] = cur;
                cur *= step;
            }
        }
        std::complex<double> acc(0.0, 0.0);
        if (d == 2) {
            std::size_t flat = 0;
            for (int a0 = 0; a0 < K; ++a0) {
                std::complex<double> inner(0.0, 0.0);
                for (int a1 = 0; a1 < K; ++a1, ++flat)
                    inner += s.coeffs[flat] * phase[1][static_cast<std::size_t>(a1)];
                acc += inner * phase[0][static_cast<std::size_t>(a0)];
            }
        } else {
            std::size_t flat = 0;
            for (int a0 = 0; a0 < K; ++a0) {
                std::complex<double> mid(0.0, 0.0);
                for (int a1 = 0; a1 < K; ++a1) {
                    std::complex<double> inner(0.0, 0.0);
                    for (int a2 = 0; a2 < K; ++a2, ++flat)
                        inner += s.coeffs[flat] * phase[2][static_cast<std::size_t>(a2)];
                    mid += inner * phase[1][static_cast<std::size_t>(a1)];
                }
                acc += mid * phase[0][static_cast<std::size_t>(a0)];
            }
        }
        out[p] = acc.real();
    }
    return out;
}

Eigen::VectorXd heat_exact_grid(const SpectrumField& u0, double nu, double t, int n_per_dim) {
    return dft_inverse(heat_propagate(u0, nu, t), n_per_dim);
}

namespace {

// Pseudo-spectral power: inverse transform onto a padded grid, pointwise
// power, forward transform truncated back to kmax. Padding rule: quadratic
// terms need M > 3*kmax, cubic terms M > 4*kmax.
SpectrumField conv_power(const SpectrumField& s, int power) {
    const int K = s.side();
    const int min_m = power == 2 ? (3 * K + 1) / 2 : 2 * K;
    const int m = next_fast_size(min_m);
    Eigen::VectorXd w = dft_inverse(s, m);
    if (power == 2)
        w = w.array().square();
    else
        w = w.array().cube();
    return dft_forward(w, s.dims, m, s.kmax, s.lengths);
}

} // namespace

SpectrumField spectral_rhs(const PdeSpec& pde, const SpectrumField& s) {
    SpectrumField out = s;
    const int K = s.side();

    // linear diffusion part, diagonal in k
    std::vector<int> k(s.dims);
    std::vector<double> kappa(static_cast<std::size_t>(s.dims));
    std::vector<std::complex<double>>* nl = nullptr;
    SpectrumField nl_field;
    if (pde.kind == PdeKind::AllenCahn) {
        nl_field = conv_power(s, 3);
        nl = &nl_field.coeffs;
    } else if (pde.kind == PdeKind::Burgers) {
        nl_field = conv_power(s, 2);
        nl = &nl_field.coeffs;
    }

    for (std::size_t flat = 0; flat < s.coeffs.size(); ++flat) {
        std::size_t rem = flat;
        double kap2 = 0.0;
        double kap_sum = 0.0;
        for (int i = s.dims - 1; i >= 0; --i) {
            k[i] = static_cast<int>(rem % K) - s.kmax;
            rem /= K;
            kappa[static_cast<std::size_t>(i)] = kTwoPi * k[i] / s.lengths[i];
            kap2 += kappa[static_cast<std::size_t>(i)] * kappa[static_cast<std::size_t>(i)];
            kap_sum += kappa[static_cast<std::size_t>(i)];
        }
        switch (pde.kind) {
        case PdeKind::Heat:
            out.coeffs[flat] = -pde.nu * kap2 * s.coeffs[flat];
            break;
        case PdeKind::AllenCahn:
            out.coeffs[flat] = -pde.nu * kap2 * s.coeffs[flat] + s.coeffs[flat] - (*nl)[flat];
            break;
        case PdeKind::Burgers:
            out.coeffs[flat] = -pde.nu * kap2 * s.coeffs[flat] -
                               std::complex<double>(0.0, 0.5) * kap_sum * (*nl)[flat];
            break;
        }
    }
    return out;
}

ReferenceSolution spectral_rk4_evolve(const PdeSpec& pde, const Eigen::VectorXd& u0_values,
                                      int ic_grid_n, int kmax, double dt_ref,
                                      const std::vector<double>& store_times, int eval_grid_n,
                                      const Eigen::VectorXd& lengths) {
    if (!(dt_ref > 0.0)) throw std::invalid_argument("spectral_rk4_evolve: dt_ref must be > 0");

    ReferenceSolution ref;
    ref.kmax = kmax;
    ref.dt_ref = dt_ref;
    ref.grid_n = eval_grid_n;

    SpectrumField u = dft_forward(u0_values, pde.dims, ic_grid_n, kmax, lengths);

    double t_end = 0.0;
    for (double t : store_times) t_end = std::max(t_end, t);
    const long n_steps = std::lround(t_end / dt_ref);
    if (std::abs(n_steps * dt_ref - t_end) > 1e-9 * std::max(t_end, dt_ref))
        throw std::invalid_argument(
            "spectral_rk4_evolve: store times must be multiples of dt_ref");

    auto maybe_store = [&](long step) {
        const double t = step * dt_ref;
        for (double want : store_times) {
            if (std::abs(want - t) <= 1e-9 * std::max({std::abs(want), dt_ref, 1e-30})) {
                ref.times.push_back(t);
                ref.fields.push_back(dft_inverse(u, eval_grid_n));
                return;
            }
        }
    };

    auto check_blowup = [&](double t) {
        for (const auto& c : u.coeffs)
            if (!(std::abs(c) <= 1e10))
                throw std::runtime_error("spectral_rk4_evolve: blow-up at t = " +
                                         std::to_string(t));
    };

    maybe_store(0);
    for (long i = 0; i < n_steps; ++i) {
        const SpectrumField s1 = spectral_rhs(pde, u);
        SpectrumField tmp = u;
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            tmp.coeffs[j] = u.coeffs[j] + 0.5 * dt_ref * s1.coeffs[j];
        const SpectrumField s2 = spectral_rhs(pde, tmp);
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            tmp.coeffs[j] = u.coeffs[j] + 0.5 * dt_ref * s2.coeffs[j];
        const SpectrumField s3 = spectral_rhs(pde, tmp);
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            tmp.coeffs[j] = u.coeffs[j] + dt_ref * s3.coeffs[j];
        const SpectrumField s4 = spectral_rhs(pde, tmp);
        for (std::size_t j = 0; j < u.coeffs.size(); ++j)
            u.coeffs[j] += dt_ref / 6.0 *
                           (s1.coeffs[j] + 2.0 * s2.coeffs[j] + 2.0 * s3.coeffs[j] + s4.coeffs[j]);
        check_blowup((i + 1) * dt_ref);
        maybe_store(i + 1);
    }
    return ref;
}

} // namespace teng
