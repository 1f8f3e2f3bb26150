#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "aclab/errors.hpp"

namespace aclab {

enum class Ensemble { Unitary, Orthogonal };

inline const char* ensemble_name(Ensemble e) {
    return e == Ensemble::Unitary ? "unitary" : "orthogonal";
}

// f_E(m): shift appearing in all Gram/Weingarten row-sum products,
// m for the unitary group and 2m for the orthogonal group.
inline long ensemble_shift(Ensemble e, long m) { return e == Ensemble::Unitary ? m : 2 * m; }

// prod_{m=0}^{k-1} (q + f_E(m)); the common row-sum normalization.
long long gram_row_sum(Ensemble e, long q, int k);

// Unitary commutant element: a permutation of {0,...,k-1} in one-line notation.
struct PermutationElement {
    std::vector<int> mapping;

    int order() const { return static_cast<int>(mapping.size()); }
    static PermutationElement identity(int k);
    PermutationElement inverse() const;
    PermutationElement compose(const PermutationElement& rhs) const;  // this after rhs
    bool operator==(const PermutationElement&) const = default;
};

// Orthogonal commutant element: a perfect matching of {0,...,2k-1}, stored as
// k pairs (lo, hi) sorted by lo.
struct PairingElement {
    std::vector<std::pair<int, int>> pairs;

    int order() const { return static_cast<int>(pairs.size()); }
    bool operator==(const PairingElement&) const = default;
};

// Permutations embed in the pairing set by matching slot i with slot k + sigma(i).
PairingElement pairing_from_permutation(const PermutationElement& sigma);

struct PermStats {
    int cycles;
    int distance;      // transposition distance, k - cycles
    int fixed_points;  // fixed points of sigma * tau^{-1}
};

// cycles(sigma^{-1} tau), k - cycles, and the fixed points of sigma tau^{-1}.
PermStats perm_stats(const PermutationElement& sigma, const PermutationElement& tau);

int cycle_count(const PermutationElement& p);
int fixed_point_count(const PermutationElement& p);

// Closed loops in the union multigraph of two perfect matchings.
int loop_count(const PairingElement& a, const PairingElement& b);

inline constexpr int kDefaultMaxReplicas = 6;

struct CommutantBasis {
    Ensemble ensemble;
    int k;
    std::vector<PermutationElement> permutations;  // Unitary only
    std::vector<PairingElement> pairings;          // Orthogonal only

    std::size_t size() const {
        return ensemble == Ensemble::Unitary ? permutations.size() : pairings.size();
    }
};

// All elements of Comm_k(E) in lexicographic order (one-line notation for
// permutations, pair lists for pairings). |S_k| = k!, |H_2k| = (2k-1)!!.
CommutantBasis enumerate_commutant(Ensemble ensemble, int k, int max_k = kDefaultMaxReplicas);

struct GramMatrix {
    CommutantBasis basis;
    long q;
    Eigen::MatrixXd entries;
};

struct WeingartenMatrix {
    CommutantBasis basis;
    long q;
    Eigen::MatrixXd entries;
    double condition_estimate;  // sigma_max / smallest retained singular value
    int numerical_rank;
};

// Unitary entries q^{#cycles(sigma^{-1} tau)}; orthogonal entries q^{#loops}.
GramMatrix gram_matrix(const CommutantBasis& basis, long q);

// Moore-Penrose pseudo-inverse via SVD with relative cutoff 1e-12 * sigma_max.
// The Gram matrix is genuinely rank-deficient for q < k.
WeingartenMatrix weingarten_matrix(const GramMatrix& gram);
WeingartenMatrix weingarten_matrix(const CommutantBasis& basis, long q);

}  // namespace aclab
