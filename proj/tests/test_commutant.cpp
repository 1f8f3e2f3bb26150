#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "aclab/commutant.hpp"
#include "aclab/errors.hpp"

using namespace aclab;

TEST_CASE("commutant sizes: k! permutations and (2k-1)!! pairings") {
    CHECK(enumerate_commutant(Ensemble::Unitary, 1).size() == 1);
    CHECK(enumerate_commutant(Ensemble::Unitary, 3).size() == 6);
    CHECK(enumerate_commutant(Ensemble::Unitary, 5).size() == 120);
    CHECK(enumerate_commutant(Ensemble::Orthogonal, 1).size() == 1);
    CHECK(enumerate_commutant(Ensemble::Orthogonal, 2).size() == 3);
    CHECK(enumerate_commutant(Ensemble::Orthogonal, 3).size() == 15);
    CHECK(enumerate_commutant(Ensemble::Orthogonal, 4).size() == 105);
}

TEST_CASE("commutant enumeration is lexicographic and capped") {
    const auto basis = enumerate_commutant(Ensemble::Unitary, 3);
    CHECK(basis.permutations.front() == PermutationElement::identity(3));
    for (std::size_t i = 1; i < basis.permutations.size(); ++i)
        CHECK(basis.permutations[i - 1].mapping < basis.permutations[i].mapping);

    const auto pair_basis = enumerate_commutant(Ensemble::Orthogonal, 3);
    for (std::size_t i = 1; i < pair_basis.pairings.size(); ++i)
        CHECK(pair_basis.pairings[i - 1].pairs < pair_basis.pairings[i].pairs);

    CHECK_THROWS_AS(enumerate_commutant(Ensemble::Unitary, 7), capacity_error);
    CHECK_THROWS_AS(enumerate_commutant(Ensemble::Orthogonal, 7), capacity_error);
    CHECK_NOTHROW(enumerate_commutant(Ensemble::Unitary, 7, 8));
}

TEST_CASE("perm_stats on S3") {
    const auto id3 = PermutationElement::identity(3);
    PermutationElement swap01;
    swap01.mapping = {1, 0, 2};

    const auto same = perm_stats(id3, id3);
    CHECK(same.cycles == 3);
    CHECK(same.distance == 0);
    CHECK(same.fixed_points == 3);

    const auto tr = perm_stats(id3, swap01);
    CHECK(tr.cycles == 2);
    CHECK(tr.distance == 1);
    CHECK(tr.fixed_points == 1);

    PermutationElement two;
    two.mapping = {1, 0};
    CHECK_THROWS_AS(perm_stats(id3, two), std::invalid_argument);
}

TEST_CASE("permutations at distance 2 from a fixed element in S_k") {
    // (3k-1)/4 * C(k,3) counts them; cross-checked by enumeration
    for (int k = 3; k <= 5; ++k) {
        const auto basis = enumerate_commutant(Ensemble::Unitary, k);
        const auto ref = basis.permutations[1];  // arbitrary non-identity reference
        int count = 0;
        for (const auto& p : basis.permutations)
            if (perm_stats(ref, p).distance == 2) ++count;
        const double c_k3 = k * (k - 1) * (k - 2) / 6.0;
        CHECK(count == static_cast<int>((3.0 * k - 1.0) / 4.0 * c_k3));
    }
    // the spec's S3 instance: exactly the two 3-cycles
    const auto basis = enumerate_commutant(Ensemble::Unitary, 3);
    const auto id3 = PermutationElement::identity(3);
    int count = 0;
    for (const auto& p : basis.permutations)
        if (perm_stats(id3, p).distance == 2) ++count;
    CHECK(count == 2);
}

TEST_CASE("transposition distance is a metric (enumeration, k <= 4)") {
    for (int k = 2; k <= 4; ++k) {
        const auto basis = enumerate_commutant(Ensemble::Unitary, k);
        const int n = static_cast<int>(basis.size());
        std::vector<std::vector<int>> d(n, std::vector<int>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d[i][j] = perm_stats(basis.permutations[i], basis.permutations[j]).distance;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK((d[i][j] == 0) == (i == j));
                CHECK(d[i][j] == d[j][i]);
                for (int l = 0; l < n; ++l) CHECK(d[i][l] <= d[i][j] + d[j][l]);
            }
    }
}

TEST_CASE("gram matrix examples") {
    const auto basis = enumerate_commutant(Ensemble::Unitary, 2);
    const auto g = gram_matrix(basis, 2);
    CHECK(g.entries(0, 0) == 4.0);
    CHECK(g.entries(0, 1) == 2.0);
    CHECK(g.entries(1, 0) == 2.0);
    CHECK(g.entries(1, 1) == 4.0);
    CHECK(g.entries.row(0).sum() == 6.0);  // q(q+1)

    const auto g1 = gram_matrix(enumerate_commutant(Ensemble::Unitary, 1), 5);
    CHECK(g1.entries(0, 0) == 5.0);
}

TEST_CASE("gram row sums are exact integers matching the product identity") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (int k = 1; k <= 4; ++k) {
            for (long q : {2L, 3L, 4L}) {
                const auto g = gram_matrix(enumerate_commutant(ensemble, k), q);
                const long long expected = gram_row_sum(ensemble, q, k);
                for (Eigen::Index r = 0; r < g.entries.rows(); ++r) {
                    long long sum = 0;
                    for (Eigen::Index c = 0; c < g.entries.cols(); ++c)
                        sum += static_cast<long long>(g.entries(r, c));
                    CHECK(sum == expected);
                }
            }
        }
    }
}

TEST_CASE("weingarten examples and row sums") {
    const auto w = weingarten_matrix(enumerate_commutant(Ensemble::Unitary, 2), 2);
    CHECK(w.entries(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(w.entries(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
    CHECK(w.entries.row(0).sum() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

    const auto w1 = weingarten_matrix(enumerate_commutant(Ensemble::Unitary, 1), 7);
    CHECK(w1.entries(0, 0) == doctest::Approx(1.0 / 7.0).epsilon(1e-14));

    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (int k = 1; k <= 4; ++k) {
            for (long q : {2L, 3L, 4L}) {
                const auto wg = weingarten_matrix(enumerate_commutant(ensemble, k), q);
                const double expected = 1.0 / static_cast<double>(gram_row_sum(ensemble, q, k));
                for (Eigen::Index r = 0; r < wg.entries.rows(); ++r)
                    CHECK(wg.entries.row(r).sum() == doctest::Approx(expected).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("pseudo-inverse property G W G = G, including rank-deficient q < k") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (int k = 2; k <= 4; ++k) {
            for (long q : {2L, 3L, 5L}) {
                const auto g = gram_matrix(enumerate_commutant(ensemble, k), q);
                const auto w = weingarten_matrix(g);
                const Eigen::MatrixXd gwg = g.entries * w.entries * g.entries;
                const double scale = g.entries.cwiseAbs().maxCoeff();
                CHECK((gwg - g.entries).cwiseAbs().maxCoeff() / scale < 1e-9);
                if (q < k) CHECK(w.numerical_rank < static_cast<int>(g.basis.size()));
            }
        }
    }
}

TEST_CASE("orthogonal loop counting") {
    // union of a pairing with itself has k loops; distinct pairings of 4
    // points always form a single loop
    const auto basis = enumerate_commutant(Ensemble::Orthogonal, 2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(loop_count(basis.pairings[i], basis.pairings[j]) == (i == j ? 2 : 1));

    // permutation embedding reproduces cycle counting through loops
    const auto perms = enumerate_commutant(Ensemble::Unitary, 4);
    for (const auto& a : perms.permutations)
        for (const auto& b : perms.permutations)
            CHECK(loop_count(pairing_from_permutation(a), pairing_from_permutation(b)) ==
                  perm_stats(a, b).cycles);
}
