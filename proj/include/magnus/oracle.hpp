#pragma once

#include <complex>

#include "magnus/fock.hpp"
#include "magnus/jsa.hpp"
#include "magnus/model.hpp"

namespace magnus {

// Pump-integrated interaction kernel F(d_omega_a, d_omega_b, t).
cplx f_function(const GaussianConfig& c, double d_omega_a, double d_omega_b, double t);

struct OracleQuadSpec {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;   // <= 0 selects 1e-12 of the |J3| bound
    int gh_nodes = 6;       // per complete axis after recentring
    int gl_order = 16;      // per half-line panel
    int min_panels = 8;
    int max_panels = 32;
    double extent = 8.0;    // half-line cut-off in units of sqrt(s_p^2 + tau^2)
};

struct OracleResult {
    double value = 0.0;
    double change = 0.0;  // |last - previous| in the panel-doubling sequence
    int panels = 0;
};

OracleResult oracle_j3_detail(const GaussianConfig& c, Detuning u, const OracleQuadSpec& quad = {});
double oracle_j3(const GaussianConfig& c, Detuning u, const OracleQuadSpec& quad = {});

struct GeneratorOptions {
    bool include_j3 = true;
    bool include_k3 = true;
    bool include_g2 = true;
};

struct Generators {
    SparseC squeeze;  // -2 pi i (sum h J a^dag b^dag + h.c.)
    SparseC fc;       // -2 pi i sum_c sum h G^c c^dag c
};

Generators build_generators(const DerivedParams& p, double eps, double tau, const FockBasis& basis,
                            const GeneratorOptions& opt = {});

// Half-width beyond which |F| < 1e-12 of its peak for every frequency.
double default_t_span(const GaussianConfig& c);

struct PropagationOptions {
    double t_span = 0.0;   // <= 0 selects default_t_span
    int n_steps = 256;     // starting count for the doubling loop
    int max_steps = 1 << 16;
    double tol = 1e-8;
    int seed_bin = -1;
};

struct PropagationResult {
    FockState state;
    int n_steps = 0;
    double last_change = 0.0;
    double ratio = 0.0;  // previous change / last change
};

// One pass of midpoint exponentials over [-t_span, t_span].
FockState propagate_fixed(const GaussianConfig& c, const FockBasis& basis, double t_span, int n_steps,
                          int seed_bin = -1);
// Doubles n_steps until successive states differ by less than tol; throws NotConverged.
PropagationResult propagate_time_ordered(const GaussianConfig& c, const FockBasis& basis,
                                         const PropagationOptions& opt = {});

FockState apply_analytic_factorization(const DerivedParams& p, double eps, double tau,
                                       const FockBasis& basis, const FockState& initial,
                                       const GeneratorOptions& opt = {});

FockState make_state(const FockBasis& basis, Eigen::VectorXcd amp);

double compare_states(const FockState& x, const FockState& y);
// Distance after removing the best global phase, min_phi |x - e^{i phi} y|.
double compare_states_aligned(const FockState& x, const FockState& y);

}  // namespace magnus
