#include "magnus/jsa.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "magnus/errors.hpp"
#include "magnus/quadrature.hpp"
#include "magnus/specfun.hpp"

namespace magnus {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrtPi = std::sqrt(kPi);
const double kPi32 = kPi * std::sqrt(kPi);

// e^{-lambda_min(M) rho^2} at the edge of the truncated V domain.
constexpr double kVTailExponent = 40.0;
// Z(u) v_center below this fraction of the W(0) scale is dropped.
constexpr double kZNegligible = 1e-17;

void check_tau(const DerivedParams& p, double tau) {
    if (std::abs(tau - p.tau) > 1e-12 * p.tau)
        throw ConfigError("tau argument does not match the derived parameters");
}

double phase_coeff(const DerivedParams& p) { return 4.0 * p.tau * p.eta_ab / std::sqrt(3.0); }

double v_domain(const DerivedParams& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p.M);
    return std::sqrt(kVTailExponent / es.eigenvalues()(0));
}

double w_scale(const DerivedParams& p, double tau) {
    return 2.0 * kPi32 * tau * tau * tau / (3.0 * p.R2);
}

// True when |Z V| is provably negligible against the W scale.
bool z_negligible(const DerivedParams& p, double tau, Detuning u) {
    const double zv = 4.0 * kSqrtPi * tau * tau * tau * std::exp(-form_N(p, u) / 3.0) * v_center(p);
    return zv < kZNegligible * w_scale(p, tau);
}

std::string where(double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << " at (" << a << ", " << b << ")";
    return os.str();
}

// Fixed tensor Gauss-Legendre rule for V on a whole grid. The Gaussian factor is tabulated
// once; the cosine splits into a row phase (q axis, d_omega_a) and a column phase
// (p axis, d_omega_b), so each row costs one matrix-vector product.
class VTensor {
public:
    static constexpr int kOrder = 16;
    static constexpr int kMaxNodes = 2048;

    VTensor(const DerivedParams& p, double kmax_p, double kmax_q) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p.M);
        const double P = v_domain(p);
        const double lam_max = es.eigenvalues()(1);
        pr_ = axis_rule(P, lam_max, kmax_p);
        qr_ = axis_rule(P, lam_max, kmax_q);
        E_.resize(pr_.size(), qr_.size());
        for (std::size_t i = 0; i < pr_.size(); ++i)
            for (std::size_t j = 0; j < qr_.size(); ++j) {
                const double x = pr_.x[i], y = qr_.x[j];
                E_(i, j) = pr_.w[i] * qr_.w[j] *
                           std::exp(-(p.M(0, 0) * x * x + 2.0 * p.M(0, 1) * x * y +
                                      p.M(1, 1) * y * y));
            }
    }

    // Largest wavenumber the axis resolves with kMaxNodes.
    static double k_capacity(const DerivedParams& p) {
        const double P = v_domain(p);
        return 10.0 * (kMaxNodes / kOrder) / P;
    }

    Eigen::VectorXcd row(double kq) const {
        Eigen::VectorXcd y(qr_.size());
        for (std::size_t j = 0; j < qr_.size(); ++j)
            y(j) = std::polar(1.0, kq * qr_.x[j]);
        return E_.cast<std::complex<double>>() * y;
    }

    Eigen::VectorXcd col_phase(double kp) const {
        Eigen::VectorXcd x(pr_.size());
        for (std::size_t i = 0; i < pr_.size(); ++i) x(i) = std::polar(1.0, kp * pr_.x[i]);
        return x;
    }

private:
    static Rule axis_rule(double P, double lam_max, double kmax) {
        double h = 1.0 / std::sqrt(lam_max);
        if (kmax > 0) h = std::min(h, 10.0 / kmax);
        int panels = std::max(2, static_cast<int>(std::ceil(P / h)));
        panels = std::min(panels, kMaxNodes / kOrder);
        return composite_gauss_legendre(0.0, P, panels, kOrder);
    }

    Rule pr_, qr_;
    Eigen::MatrixXd E_;
};

}  // namespace

void ComplexKernel::validate() const {
    if (values.rows() != static_cast<Eigen::Index>(grid_a.size()) ||
        values.cols() != static_cast<Eigen::Index>(grid_b.size()))
        throw ConfigError("kernel dimensions do not match its grids");
    if (!values.allFinite()) throw ConfigError("kernel contains non-finite values");
}

double form_N(const DerivedParams& p, Detuning u) {
    const double a = u.d_omega_a, b = u.d_omega_b;
    // Sum of squares, so no cancellation along the null direction when eta_a = eta_b.
    const double s = a + b, e = p.eta_a * a + p.eta_b * b;
    return p.tau * p.tau * s * s + e * e;
}

double form_Q(const DerivedParams& p, Detuning u) {
    const double a = u.d_omega_a, b = u.d_omega_b;
    // uQu = M^4 uNu - 2 mu^2 ab (M^4 - mu^4), with M^4 - mu^4 = 4 tau^2 eta_ab^2.
    const double t2 = p.tau * p.tau;
    return std::max(0.0, p.M4 * form_N(p, u) - 8.0 * p.mu2 * t2 * p.eta_ab * p.eta_ab * a * b);
}

double j1(const DerivedParams& p, double eps, double tau, Detuning u) {
    check_tau(p, tau);
    return -(eps * tau / kSqrtPi) * std::exp(-form_N(p, u));
}

double v_center(const DerivedParams& p) {
    if (p.mu2 == 0.0) return kPi / (4.0 * p.R2);
    const double at = std::atan(p.R2 / p.mu2);
    if (p.mu2 > 0) return at / (2.0 * p.R2);
    return (kPi + at) / (2.0 * p.R2);
}

double v_integral(const DerivedParams& p, Detuning u, const QuadratureSpec& quad) {
    const double P = v_domain(p);
    const double c = phase_coeff(p);
    const double kq = c * u.d_omega_a;
    const double kp = c * u.d_omega_b;
    const double abs_tol = quad.abs_tol > 0 ? quad.abs_tol : 1e-12 / p.R2;
    const double a11 = p.M(0, 0), a12 = p.M(0, 1), a22 = p.M(1, 1);

    auto inner = [&](double x) {
        auto g = [&](double y) {
            return std::exp(-(a11 * x * x + 2.0 * a12 * x * y + a22 * y * y)) *
                   std::cos(kq * y + kp * x);
        };
        QuadResult r = integrate_adaptive(g, 0.0, P, 0.1 * abs_tol / P, 0.1 * quad.rel_tol,
                                          quad.max_intervals);
        if (!r.converged)
            throw QuadratureFailure("V inner integral did not converge", "q");
        return r.value;
    };
    QuadResult r = integrate_adaptive(inner, 0.0, P, abs_tol, quad.rel_tol, quad.max_intervals);
    if (!r.converged) throw QuadratureFailure("V outer integral did not converge", "p");
    return r.value;
}

double w_term(const DerivedParams& p, double eps, double tau, Detuning u) {
    check_tau(p, tau);
    return eps * eps * eps * w_scale(p, tau) * std::exp(-form_Q(p, u) / p.R4);
}

double z_term(const DerivedParams& p, double eps, double tau, Detuning u) {
    check_tau(p, tau);
    return 4.0 * kSqrtPi * std::pow(tau * eps, 3) * std::exp(-form_N(p, u) / 3.0);
}

double j3(const DerivedParams& p, double eps, double tau, Detuning u, const QuadratureSpec& quad) {
    const double w = w_term(p, eps, tau, u);
    if (z_negligible(p, tau, u)) return w;
    return w - z_term(p, eps, tau, u) * v_integral(p, u, quad);
}

double k3(const DerivedParams& p, double eps, double tau, Detuning u) {
    check_tau(p, tau);
    const double a = u.d_omega_a, b = u.d_omega_b;
    const double k = std::sqrt(2.0 / 3.0) * tau / p.R2;
    const double y_ab = -k * p.eta_ab * (2.0 * a * p.mua2 - b * p.mu2) / p.mua();
    const double y_ba = k * p.eta_ab * (2.0 * b * p.mub2 - a * p.mu2) / p.mub();
    const double E = form_Q(p, u) / p.R4;
    return -std::pow(eps, 3) * kPi32 * (tau * tau * tau / p.R2) *
           (gauss_erfi(E, y_ab) + gauss_erfi(E, y_ba));
}

std::complex<double> jsa_total(const DerivedParams& p, double eps, double tau, Detuning u,
                               const QuadratureSpec& quad) {
    return {j1(p, eps, tau, u) + j3(p, eps, tau, u, quad), -k3(p, eps, tau, u)};
}

JsaTerms jsa_terms_grid(const DerivedParams& p, double eps, double tau,
                        const std::vector<double>& grid_a, const std::vector<double>& grid_b,
                        const QuadratureSpec& quad) {
    check_tau(p, tau);
    for (const auto* g : {&grid_a, &grid_b}) {
        if (g->empty()) throw ConfigError("grid must not be empty");
        for (std::size_t i = 1; i < g->size(); ++i)
            if (!((*g)[i] > (*g)[i - 1])) throw ConfigError("grid must be strictly increasing");
    }
    const Eigen::Index na = grid_a.size(), nb = grid_b.size();
    JsaTerms t;
    t.grid_a = grid_a;
    t.grid_b = grid_b;
    t.j1.resize(na, nb);
    t.j3.resize(na, nb);
    t.k3.resize(na, nb);

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> needV(na, nb);
    double amax = 0.0, bmax = 0.0;
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j) {
            const Detuning u{grid_a[i], grid_b[j]};
            try {
                t.j1(i, j) = j1(p, eps, tau, u);
                t.k3(i, j) = k3(p, eps, tau, u);
                t.j3(i, j) = w_term(p, eps, tau, u);
            } catch (const Error& e) {
                throw OverflowError(std::string(e.what()) + where(u.d_omega_a, u.d_omega_b));
            }
            needV(i, j) = eps != 0.0 && p.eta_ab != 0.0 && !z_negligible(p, tau, u);
            if (eps != 0.0 && p.eta_ab == 0.0) {
                // No oscillation: V is the centre value everywhere.
                t.j3(i, j) -= z_term(p, eps, tau, u) * v_center(p);
            }
            if (needV(i, j)) {
                amax = std::max(amax, std::abs(u.d_omega_a));
                bmax = std::max(bmax, std::abs(u.d_omega_b));
            }
        }
    if (!needV.any()) return t;

    const double c = phase_coeff(p);
    const double kcap = VTensor::k_capacity(p);
    const double ka = std::min(std::abs(c) * amax, kcap);
    const double kb = std::min(std::abs(c) * bmax, kcap);
    const VTensor rule(p, kb, ka);

    std::vector<Eigen::VectorXcd> cols(nb);
    for (Eigen::Index j = 0; j < nb; ++j)
        if (std::abs(c * grid_b[j]) <= kb) cols[j] = rule.col_phase(c * grid_b[j]);

    for (Eigen::Index i = 0; i < na; ++i) {
        if (!needV.row(i).any()) continue;
        const bool row_ok = std::abs(c * grid_a[i]) <= ka;
        Eigen::VectorXcd r;
        if (row_ok) r = rule.row(c * grid_a[i]);
        for (Eigen::Index j = 0; j < nb; ++j) {
            if (!needV(i, j)) continue;
            const Detuning u{grid_a[i], grid_b[j]};
            double V;
            if (row_ok && cols[j].size() > 0) {
                V = cols[j].cwiseProduct(r).sum().real();
            } else {
                try {
                    V = v_integral(p, u, quad);
                } catch (const QuadratureFailure& e) {
                    throw QuadratureFailure(std::string(e.what()) + where(u.d_omega_a, u.d_omega_b),
                                            e.axis());
                }
            }
            t.j3(i, j) -= z_term(p, eps, tau, u) * V;
        }
    }
    return t;
}

ComplexKernel jsa_grid(const DerivedParams& p, double eps, double tau,
                       const std::vector<double>& grid_a, const std::vector<double>& grid_b,
                       const QuadratureSpec& quad) {
    const JsaTerms t = jsa_terms_grid(p, eps, tau, grid_a, grid_b, quad);
    ComplexKernel k;
    k.grid_a = grid_a;
    k.grid_b = grid_b;
    k.values.resize(t.j1.rows(), t.j1.cols());
    k.values.real() = t.j1 + t.j3;
    k.values.imag() = -t.k3;
    k.normalization_note = "J1 + J3 - i K3, absolute (includes eps and tau prefactors)";
    k.validate();
    return k;
}

double j3_bound(const DerivedParams& p, double eps, double tau) {
    check_tau(p, tau);
    return 2.0 * kPi32 * std::pow(eps * tau, 3) / p.R2;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw ConfigError("linspace needs at least one point");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (a + b);
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    // Exact symmetry for symmetric ranges.
    if (a == -b)
        for (int i = 0; i < n / 2; ++i) v[i] = -v[n - 1 - i];
    if (a == -b && n % 2 == 1) v[n / 2] = 0.0;
    return v;
}

double default_half_width(const DerivedParams& p, double span) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p.N);
    const double lmax = es.eigenvalues()(1);
    const double lmin = std::max(es.eigenvalues()(0), 1e-2 * lmax);
    return span / std::sqrt(lmin);
}

}  // namespace magnus
