#include "magnus/oracle.hpp"

#include <cmath>
#include <numbers>

#include "magnus/errors.hpp"
#include "magnus/fconv.hpp"
#include "magnus/quadrature.hpp"

namespace magnus {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Exponent of F without the -eps tau / sigma prefactor; entire in all arguments.
template <class T>
cplx f_exponent(const GaussianConfig& c, T x, T y, T t) {
    const double sig2 = c.s_p * c.s_p + c.tau * c.tau;
    const cplx X = c.s_a * cplx(x) + c.s_b * cplx(y);
    const cplx a = -2.0 * c.s_p * X + I * cplx(t);
    return a * a / (4.0 * sig2) + I * cplx(t) * (cplx(x) + cplx(y)) - X * X;
}

using Vec3 = Eigen::Matrix<cplx, 3, 1>;
using Mat3 = Eigen::Matrix<cplx, 3, 3>;

// log of the F triple product (minus the constant prefactor) at complex (q, w_c, w_d).
struct TripleExponent {
    const GaussianConfig& c;
    double a, b, r, s;

    cplx operator()(const Vec3& z) const {
        const cplx q = z(0), wc = z(1), wd = z(2);
        return f_exponent<cplx>(c, a, wd, q + 2.0 * r + s) +
               f_exponent<cplx>(c, wc, b, q - r - 2.0 * s) +
               f_exponent<cplx>(c, wc, wd, -q + r - s);
    }
};

// int d^3z exp(phi(z)) for one (r, s) node. phi is an exact quadratic, so central
// differences with unit steps recover its gradient and Hessian; the contour is shifted
// to the complex saddle and scaled by the real part of the Hessian before Gauss-Hermite.
cplx inner_integral(const TripleExponent& phi, const Rule& gh) {
    const Vec3 zero = Vec3::Zero();
    const cplx f0 = phi(zero);
    Vec3 g;
    Mat3 H;
    Vec3 e[3];
    for (int k = 0; k < 3; ++k) {
        e[k] = Vec3::Zero();
        e[k](k) = 1.0;
    }
    cplx fp[3], fm[3];
    for (int k = 0; k < 3; ++k) {
        fp[k] = phi(e[k]);
        fm[k] = phi(-e[k]);
        g(k) = 0.5 * (fp[k] - fm[k]);
        H(k, k) = fp[k] + fm[k] - 2.0 * f0;
    }
    for (int k = 0; k < 3; ++k)
        for (int l = k + 1; l < 3; ++l) {
            const cplx v = 0.25 * (phi(e[k] + e[l]) - phi(e[k] - e[l]) - phi(-e[k] + e[l]) +
                                   phi(-e[k] - e[l]));
            H(k, l) = v;
            H(l, k) = v;
        }
    const Vec3 zs = -H.partialPivLu().solve(g);
    const Eigen::Matrix3d A = -0.5 * H.real();
    Eigen::LLT<Eigen::Matrix3d> llt(A);
    if (llt.info() != Eigen::Success)
        throw QuadratureFailure("oracle integrand is not Gaussian in (q, w_c, w_d)", "q,w_c,w_d");
    // z = zs + L^{-T} x gives Re part exp(-x^T x).
    const Eigen::Matrix3d Linv_T = llt.matrixL().solve(Eigen::Matrix3d::Identity()).transpose();
    const double jac = Linv_T.determinant();
    const int n = static_cast<int>(gh.size());
    cplx sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Eigen::Vector3d x(gh.x[i], gh.x[j], gh.x[k]);
                const Vec3 z = zs + (Linv_T * x).cast<cplx>();
                sum += gh.w[i] * gh.w[j] * gh.w[k] * std::exp(phi(z) + x.squaredNorm());
            }
    return sum * jac;
}

// (int_0^inf dr int_-inf^0 ds - 2 int_0^inf dr int_0^inf ds) of the inner integral.
cplx outer_integral(const GaussianConfig& c, Detuning u, const Rule& half, const Rule& gh) {
    cplx total = 0.0;
    for (std::size_t i = 0; i < half.size(); ++i) {
        const double r = half.x[i];
        cplx row = 0.0;
        for (std::size_t j = 0; j < half.size(); ++j) {
            const double s = half.x[j];
            const TripleExponent neg{c, u.d_omega_a, u.d_omega_b, r, -s};
            const TripleExponent pos{c, u.d_omega_a, u.d_omega_b, r, s};
            row += half.w[j] * (inner_integral(neg, gh) - 2.0 * inner_integral(pos, gh));
        }
        total += half.w[i] * row;
    }
    return total;
}

}  // namespace

cplx f_function(const GaussianConfig& c, double d_omega_a, double d_omega_b, double t) {
    const double sigma = std::sqrt(c.s_p * c.s_p + c.tau * c.tau);
    return -(c.epsilon * c.tau / sigma) * std::exp(f_exponent<double>(c, d_omega_a, d_omega_b, t));
}

OracleResult oracle_j3_detail(const GaussianConfig& c, Detuning u, const OracleQuadSpec& quad) {
    c.validate();
    const DerivedParams p = derive_params(c);
    const double sigma = std::sqrt(c.s_p * c.s_p + c.tau * c.tau);
    const double pref = std::pow(c.epsilon * c.tau / sigma, 3);  // |(-eps tau / sigma)^3|
    const double abs_tol = quad.abs_tol > 0 ? quad.abs_tol : 1e-12 * j3_bound(p, c.epsilon, c.tau);
    OracleResult res;
    if (c.epsilon == 0.0) return res;

    const Rule gh = gauss_hermite(quad.gh_nodes);
    const double T = quad.extent * sigma;
    double prev = 0.0;
    bool have_prev = false;
    for (int panels = quad.min_panels; panels <= quad.max_panels; panels *= 2) {
        const Rule half = composite_gauss_legendre(0.0, T, panels, quad.gl_order);
        const cplx integral = -pref * outer_integral(c, u, half, gh);
        const double value = -(3.0 / (4.0 * kPi)) * 2.0 * integral.real();
        res.value = value;
        res.panels = panels;
        if (have_prev) {
            res.change = std::abs(value - prev);
            if (res.change <= std::max(abs_tol, quad.rel_tol * std::abs(value))) return res;
        }
        prev = value;
        have_prev = true;
    }
    throw QuadratureFailure("oracle J3 half-line quadrature did not converge (change " +
                                std::to_string(res.change) + ")",
                            "r,s");
}

double oracle_j3(const GaussianConfig& c, Detuning u, const OracleQuadSpec& quad) {
    return oracle_j3_detail(c, u, quad).value;
}

Generators build_generators(const DerivedParams& p, double eps, double tau, const FockBasis& basis,
                            const GeneratorOptions& opt) {
    const double h = basis.width();
    const int na = basis.n_a(), nb = basis.n_b();
    Eigen::MatrixXcd J(na, nb);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            const Detuning u{basis.bins_a()[i], basis.bins_b()[j]};
            double re = j1(p, eps, tau, u);
            double im = 0.0;
            if (opt.include_j3 && eps != 0.0) re += j3(p, eps, tau, u);
            if (opt.include_k3) im = -k3(p, eps, tau, u);
            J(i, j) = cplx(re, im);
        }
    Generators g;
    g.squeeze = (-2.0 * kPi * I) * basis.pair_operator(h * J);

    Eigen::MatrixXcd Ga = Eigen::MatrixXcd::Zero(na, na);
    Eigen::MatrixXcd Gb = Eigen::MatrixXcd::Zero(nb, nb);
    if (opt.include_g2) {
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < na; ++j) Ga(i, j) = g2(p, eps, tau, basis.bins_a()[i], basis.bins_a()[j]);
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j) Gb(i, j) = g2b(p, eps, tau, basis.bins_b()[i], basis.bins_b()[j]);
    }
    g.fc = (-2.0 * kPi * I) * (basis.number_operator(0, h * Ga) + basis.number_operator(1, h * Gb));
    return g;
}

double default_t_span(const GaussianConfig& c) {
    const double sigma = std::sqrt(c.s_p * c.s_p + c.tau * c.tau);
    return 2.0 * sigma * std::sqrt(std::log(1e12));
}

FockState make_state(const FockBasis& basis, Eigen::VectorXcd amp) {
    if (amp.size() != basis.dim()) throw BasisMismatch("amplitude vector does not match basis");
    return FockState{std::move(amp), basis.signature()};
}

FockState propagate_fixed(const GaussianConfig& c, const FockBasis& basis, double t_span, int n_steps,
                          int seed_bin) {
    if (n_steps < 1) throw ConfigError("n_steps must be positive");
    Eigen::VectorXcd psi = basis.initial_state(seed_bin);
    if (c.epsilon == 0.0) return make_state(basis, psi);
    const double dt = 2.0 * t_span / n_steps;
    const double h = basis.width();
    const int na = basis.n_a(), nb = basis.n_b();
    Eigen::MatrixXcd C(na, nb);
    for (int k = 0; k < n_steps; ++k) {
        const double t = -t_span + (k + 0.5) * dt;
        for (int i = 0; i < na; ++i)
            for (int j = 0; j < nb; ++j) C(i, j) = h * f_function(c, basis.bins_a()[i], basis.bins_b()[j], t);
        const SparseC A = (-I * dt) * basis.pair_operator(C);
        psi = expm_apply(A, psi);
    }
    return make_state(basis, psi);
}

PropagationResult propagate_time_ordered(const GaussianConfig& c, const FockBasis& basis,
                                         const PropagationOptions& opt) {
    const double T = opt.t_span > 0 ? opt.t_span : default_t_span(c);
    PropagationResult res;
    FockState prev = propagate_fixed(c, basis, T, opt.n_steps, opt.seed_bin);
    double prev_change = 0.0;
    for (int n = 2 * opt.n_steps; n <= opt.max_steps; n *= 2) {
        FockState cur = propagate_fixed(c, basis, T, n, opt.seed_bin);
        const double change = compare_states(cur, prev);
        res.ratio = change > 0 ? prev_change / change : 0.0;
        res.state = cur;
        res.n_steps = n;
        res.last_change = change;
        if (change < opt.tol) return res;
        prev = std::move(cur);
        prev_change = change;
    }
    throw NotConverged("time-ordered propagation did not converge (last change " +
                           std::to_string(res.last_change) + ")",
                       res.ratio);
}

FockState apply_analytic_factorization(const DerivedParams& p, double eps, double tau,
                                       const FockBasis& basis, const FockState& initial,
                                       const GeneratorOptions& opt) {
    if (initial.basis_signature != basis.signature()) throw BasisMismatch("state belongs to another basis");
    const Generators g = build_generators(p, eps, tau, basis, opt);
    Eigen::VectorXcd v = expm_apply(g.fc, initial.amp);
    v = expm_apply(g.squeeze, v);
    return make_state(basis, v);
}

double compare_states(const FockState& x, const FockState& y) {
    if (x.basis_signature != y.basis_signature || x.amp.size() != y.amp.size())
        throw BasisMismatch("states live on different bases");
    return (x.amp - y.amp).norm();
}

double compare_states_aligned(const FockState& x, const FockState& y) {
    if (x.basis_signature != y.basis_signature || x.amp.size() != y.amp.size())
        throw BasisMismatch("states live on different bases");
    const cplx ov = y.amp.dot(x.amp);  // <y|x>
    const cplx phase = std::abs(ov) > 0 ? ov / std::abs(ov) : cplx(1.0);
    return (x.amp - phase * y.amp).norm();
}

}  // namespace magnus
