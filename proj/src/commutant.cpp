#include "aclab/commutant.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numeric>
#include <string>

namespace aclab {

long long gram_row_sum(Ensemble e, long q, int k) {
    long long prod = 1;
    for (int m = 0; m < k; ++m) prod *= q + ensemble_shift(e, m);
    return prod;
}

PermutationElement PermutationElement::identity(int k) {
    PermutationElement p;
    p.mapping.resize(k);
    std::iota(p.mapping.begin(), p.mapping.end(), 0);
    return p;
}

PermutationElement PermutationElement::inverse() const {
    PermutationElement inv;
    inv.mapping.resize(mapping.size());
    for (int i = 0; i < order(); ++i) inv.mapping[mapping[i]] = i;
    return inv;
}

PermutationElement PermutationElement::compose(const PermutationElement& rhs) const {
    PermutationElement out;
    out.mapping.resize(mapping.size());
    for (int i = 0; i < order(); ++i) out.mapping[i] = mapping[rhs.mapping[i]];
    return out;
}

int cycle_count(const PermutationElement& p) {
    const int k = p.order();
    std::vector<bool> seen(k, false);
    int cycles = 0;
    for (int i = 0; i < k; ++i) {
        if (seen[i]) continue;
        ++cycles;
        for (int j = i; !seen[j]; j = p.mapping[j]) seen[j] = true;
    }
    return cycles;
}

int fixed_point_count(const PermutationElement& p) {
    int n = 0;
    for (int i = 0; i < p.order(); ++i)
        if (p.mapping[i] == i) ++n;
    return n;
}

PermStats perm_stats(const PermutationElement& sigma, const PermutationElement& tau) {
    if (sigma.order() != tau.order())
        throw std::invalid_argument("perm_stats: permutations act on different replica counts");
    const int k = sigma.order();
    const int cycles = cycle_count(sigma.inverse().compose(tau));
    const int fixed = fixed_point_count(sigma.compose(tau.inverse()));
    return PermStats{cycles, k - cycles, fixed};
}

PairingElement pairing_from_permutation(const PermutationElement& sigma) {
    const int k = sigma.order();
    PairingElement p;
    p.pairs.reserve(k);
    for (int i = 0; i < k; ++i) p.pairs.emplace_back(i, k + sigma.mapping[i]);
    return p;
}

int loop_count(const PairingElement& a, const PairingElement& b) {
    if (a.order() != b.order())
        throw std::invalid_argument("loop_count: pairings act on different point counts");
    const int n = 2 * a.order();
    std::vector<int> pa(n), pb(n);
    for (const auto& [x, y] : a.pairs) pa[x] = y, pa[y] = x;
    for (const auto& [x, y] : b.pairs) pb[x] = y, pb[y] = x;
    std::vector<bool> seen(n, false);
    int loops = 0;
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        ++loops;
        int v = start;
        bool use_a = true;
        while (!seen[v]) {
            seen[v] = true;
            v = use_a ? pa[v] : pb[v];
            use_a = !use_a;
        }
    }
    return loops;
}

namespace {

void enumerate_pairings(std::vector<int>& free_points, std::vector<std::pair<int, int>>& current,
                        std::vector<PairingElement>& out) {
    if (free_points.empty()) {
        out.push_back(PairingElement{current});
        return;
    }
    const int lo = free_points.front();
    for (std::size_t j = 1; j < free_points.size(); ++j) {
        const int hi = free_points[j];
        std::vector<int> rest;
        rest.reserve(free_points.size() - 2);
        for (std::size_t m = 1; m < free_points.size(); ++m)
            if (m != j) rest.push_back(free_points[m]);
        current.emplace_back(lo, hi);
        enumerate_pairings(rest, current, out);
        current.pop_back();
    }
}

}  // namespace

CommutantBasis enumerate_commutant(Ensemble ensemble, int k, int max_k) {
    if (k < 1) throw std::invalid_argument("enumerate_commutant: k must be >= 1");
    if (k > max_k)
        throw capacity_error("enumerate_commutant: k = " + std::to_string(k) +
                             " exceeds the configured maximum " + std::to_string(max_k));
    CommutantBasis basis{ensemble, k, {}, {}};
    if (ensemble == Ensemble::Unitary) {
        auto p = PermutationElement::identity(k);
        do {
            basis.permutations.push_back(p);
        } while (std::next_permutation(p.mapping.begin(), p.mapping.end()));
    } else {
        std::vector<int> points(2 * k);
        std::iota(points.begin(), points.end(), 0);
        std::vector<std::pair<int, int>> current;
        enumerate_pairings(points, current, basis.pairings);
    }
    return basis;
}

GramMatrix gram_matrix(const CommutantBasis& basis, long q) {
    if (q < 1) throw std::invalid_argument("gram_matrix: q must be >= 1");
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd g(n, n);
    if (basis.ensemble == Ensemble::Unitary) {
        std::vector<PermutationElement> inverses;
        inverses.reserve(basis.permutations.size());
        for (const auto& p : basis.permutations) inverses.push_back(p.inverse());
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) {
                const int c = cycle_count(inverses[i].compose(basis.permutations[j]));
                g(i, j) = g(j, i) = std::pow(static_cast<double>(q), c);
            }
    } else {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i; j < n; ++j) {
                const int c = loop_count(basis.pairings[i], basis.pairings[j]);
                g(i, j) = g(j, i) = std::pow(static_cast<double>(q), c);
            }
    }
    return GramMatrix{basis, q, std::move(g)};
}

WeingartenMatrix weingarten_matrix(const GramMatrix& gram) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram.entries,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(0) > 0.0))
        throw numerical_error("weingarten_matrix: SVD produced no positive singular values");
    const double cutoff = 1e-12 * sv(0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    if (rank == 0)
        throw numerical_error("weingarten_matrix: numerical rank collapsed to zero",
                              sv(0) / cutoff);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < rank; ++i) inv(i) = 1.0 / sv(i);
    Eigen::MatrixXd w =
        svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    const double condition = sv(0) / sv(rank - 1);
    return WeingartenMatrix{gram.basis, gram.q, std::move(w), condition, rank};
}

WeingartenMatrix weingarten_matrix(const CommutantBasis& basis, long q) {
    return weingarten_matrix(gram_matrix(basis, q));
}

}  // namespace aclab
