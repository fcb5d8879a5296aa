#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace magnus {

using cplx = std::complex<double>;
using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Occupations are stored as sorted bin lists per mode family.
struct FockKey {
    std::vector<int> a;
    std::vector<int> b;
    bool operator<(const FockKey& o) const { return a != o.a ? a < o.a : b < o.b; }
    bool operator==(const FockKey& o) const { return a == o.a && b == o.b; }
};

class FockBasis {
public:
    // Bins are equally spaced with width h. seed_bin >= 0 adds one a-photon to every sector.
    FockBasis(std::vector<double> bins_a, std::vector<double> bins_b, double h, int max_pairs,
              bool seeded = false);

    static FockBasis centered(int n_a, int n_b, double h, int max_pairs, bool seeded = false);

    int dim() const { return static_cast<int>(keys_.size()); }
    int n_a() const { return static_cast<int>(bins_a_.size()); }
    int n_b() const { return static_cast<int>(bins_b_.size()); }
    double width() const { return h_; }
    int max_pairs() const { return max_pairs_; }
    bool seeded() const { return seeded_; }
    const std::vector<double>& bins_a() const { return bins_a_; }
    const std::vector<double>& bins_b() const { return bins_b_; }

    const FockKey& key(int i) const { return keys_[i]; }
    // -1 when the configuration lies outside the truncation.
    int index(const FockKey& k) const;

    // Vacuum (or the seed photon in bin seed_bin when seeded).
    Eigen::VectorXcd initial_state(int seed_bin = -1) const;

    // Identity used to reject comparisons across bases.
    std::uint64_t signature() const { return signature_; }

    // Sum_ij C_ij a_i^dag b_j^dag + h.c.
    SparseC pair_operator(const Eigen::MatrixXcd& C) const;
    // Sum_ij G_ij c_i^dag c_j for the a (side 0) or b (side 1) family.
    SparseC number_operator(int side, const Eigen::MatrixXcd& G) const;

private:
    struct Transition {
        int to, from, i, j;
        double amp;
    };

    void enumerate();
    void build_transitions();

    std::vector<double> bins_a_, bins_b_;
    double h_;
    int max_pairs_;
    bool seeded_;
    std::vector<FockKey> keys_;
    std::map<FockKey, int> lookup_;
    std::vector<Transition> pair_;
    std::vector<Transition> number_[2];
    std::uint64_t signature_ = 0;
};

struct FockState {
    Eigen::VectorXcd amp;
    std::uint64_t basis_signature = 0;

    double norm() const { return amp.norm(); }
};

// exp(A) v by scaled Taylor series; A is given through its sparse matrix.
Eigen::VectorXcd expm_apply(const SparseC& A, const Eigen::VectorXcd& v, double tol = 1e-16);

double one_norm(const SparseC& A);

}  // namespace magnus
