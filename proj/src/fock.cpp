#include "magnus/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "magnus/errors.hpp"

namespace magnus {

namespace {

void multisets(int n_bins, int size, int start, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == size) {
        out.push_back(cur);
        return;
    }
    for (int b = start; b < n_bins; ++b) {
        cur.push_back(b);
        multisets(n_bins, size, b, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> multisets(int n_bins, int size) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    multisets(n_bins, size, 0, cur, out);
    return out;
}

int count(const std::vector<int>& v, int bin) {
    return static_cast<int>(std::count(v.begin(), v.end(), bin));
}

void add(std::vector<int>& v, int bin) { v.insert(std::upper_bound(v.begin(), v.end(), bin), bin); }

void remove_one(std::vector<int>& v, int bin) { v.erase(std::find(v.begin(), v.end(), bin)); }

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::uint64_t bits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    return u;
}

}  // namespace

FockBasis::FockBasis(std::vector<double> bins_a, std::vector<double> bins_b, double h,
                     int max_pairs, bool seeded)
    : bins_a_(std::move(bins_a)), bins_b_(std::move(bins_b)), h_(h), max_pairs_(max_pairs),
      seeded_(seeded) {
    if (bins_a_.empty() || bins_b_.empty()) throw ConfigError("Fock basis needs bins");
    if (!(h > 0)) throw ConfigError("bin width must be positive");
    if (max_pairs < 0 || max_pairs > 2) throw ConfigError("max_pairs must be 0, 1 or 2");
    enumerate();
    build_transitions();
    std::uint64_t s = mix(0, keys_.size());
    for (double x : bins_a_) s = mix(s, bits(x));
    for (double x : bins_b_) s = mix(s, bits(x));
    s = mix(s, bits(h_));
    s = mix(s, static_cast<std::uint64_t>(max_pairs_ * 2 + (seeded_ ? 1 : 0)));
    signature_ = s;
}

FockBasis FockBasis::centered(int n_a, int n_b, double h, int max_pairs, bool seeded) {
    auto grid = [h](int n) {
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) g[i] = (i - 0.5 * (n - 1)) * h;
        return g;
    };
    return FockBasis(grid(n_a), grid(n_b), h, max_pairs, seeded);
}

void FockBasis::enumerate() {
    const int extra = seeded_ ? 1 : 0;
    for (int k = 0; k <= max_pairs_; ++k) {
        const auto as = multisets(n_a(), k + extra);
        const auto bs = multisets(n_b(), k);
        for (const auto& a : as)
            for (const auto& b : bs) {
                lookup_.emplace(FockKey{a, b}, static_cast<int>(keys_.size()));
                keys_.push_back(FockKey{a, b});
            }
    }
}

int FockBasis::index(const FockKey& k) const {
    auto it = lookup_.find(k);
    return it == lookup_.end() ? -1 : it->second;
}

void FockBasis::build_transitions() {
    for (int from = 0; from < dim(); ++from) {
        const FockKey& src = keys_[from];
        for (int i = 0; i < n_a(); ++i)
            for (int j = 0; j < n_b(); ++j) {
                FockKey dst = src;
                const double amp = std::sqrt((count(src.a, i) + 1.0) * (count(src.b, j) + 1.0));
                add(dst.a, i);
                add(dst.b, j);
                const int to = index(dst);
                if (to >= 0) pair_.push_back({to, from, i, j, amp});
            }
        for (int side = 0; side < 2; ++side) {
            const auto& occ = side == 0 ? src.a : src.b;
            const int n = side == 0 ? n_a() : n_b();
            for (int j = 0; j < n; ++j) {
                const int nj = count(occ, j);
                if (nj == 0) continue;
                for (int i = 0; i < n; ++i) {
                    FockKey dst = src;
                    auto& d = side == 0 ? dst.a : dst.b;
                    remove_one(d, j);
                    const double amp = std::sqrt(nj * (count(d, i) + 1.0));
                    add(d, i);
                    number_[side].push_back({index(dst), from, i, j, amp});
                }
            }
        }
    }
}

Eigen::VectorXcd FockBasis::initial_state(int seed_bin) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim());
    FockKey k;
    if (seeded_) {
        if (seed_bin < 0 || seed_bin >= n_a()) throw ConfigError("seed bin outside the a grid");
        k.a.push_back(seed_bin);
    }
    v(index(k)) = 1.0;
    return v;
}

SparseC FockBasis::pair_operator(const Eigen::MatrixXcd& C) const {
    if (C.rows() != n_a() || C.cols() != n_b()) throw BasisMismatch("pair coefficients do not match bins");
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(2 * pair_.size());
    for (const auto& tr : pair_) {
        const cplx c = C(tr.i, tr.j) * tr.amp;
        t.emplace_back(tr.to, tr.from, c);
        t.emplace_back(tr.from, tr.to, std::conj(c));
    }
    SparseC m(dim(), dim());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseC FockBasis::number_operator(int side, const Eigen::MatrixXcd& G) const {
    const int n = side == 0 ? n_a() : n_b();
    if (G.rows() != n || G.cols() != n) throw BasisMismatch("number coefficients do not match bins");
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(number_[side].size());
    for (const auto& tr : number_[side]) t.emplace_back(tr.to, tr.from, G(tr.i, tr.j) * tr.amp);
    SparseC m(dim(), dim());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

double one_norm(const SparseC& A) {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(A.cols());
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseC::InnerIterator it(A, k); it; ++it) col(it.col()) += std::abs(it.value());
    return A.cols() ? col.maxCoeff() : 0.0;
}

Eigen::VectorXcd expm_apply(const SparseC& A, const Eigen::VectorXcd& v, double tol) {
    const double nrm = one_norm(A);
    const int substeps = std::max(1, static_cast<int>(std::ceil(nrm / 0.5)));
    const double scale = 1.0 / substeps;
    Eigen::VectorXcd x = v;
    for (int s = 0; s < substeps; ++s) {
        Eigen::VectorXcd term = x;
        Eigen::VectorXcd acc = x;
        for (int k = 1; k < 60; ++k) {
            term = (A * term) * (scale / k);
            acc += term;
            if (term.norm() <= tol * acc.norm()) break;
        }
        x = acc;
    }
    return x;
}

}  // namespace magnus
