#include <doctest.h>

#include <cmath>

#include "aclab/closed_forms.hpp"
#include "aclab/errors.hpp"
#include "aclab/parallel.hpp"
#include "aclab/rtn.hpp"
#include "aclab/statevector.hpp"
#include "support/numeric_utils.hpp"

using namespace aclab;

TEST_CASE("replica space dimensions per site") {
    CHECK(make_replica_tensors(Ensemble::Unitary, 2).nc == 2);
    CHECK(make_replica_tensors(Ensemble::Orthogonal, 2).nc == 3);
}

TEST_CASE("single-gate values reproduce the Haar results") {
    CHECK(contract_annealed_ipr2(2, 1, Ensemble::Unitary).value ==
          doctest::Approx(0.4).epsilon(1e-10));
    CHECK(contract_annealed_ipr2(2, 1, Ensemble::Orthogonal).value ==
          doctest::Approx(0.5).epsilon(1e-10));
    CHECK(annealed_half_chain_purity(2, 1, Ensemble::Unitary).value ==
          doctest::Approx(0.8).epsilon(1e-10));
    CHECK(annealed_half_chain_purity(4, 0, Ensemble::Unitary).value == 1.0);
    // stacking a second gate on the same pair leaves a Haar state
    CHECK(contract_annealed_ipr2(2, 3, Ensemble::Unitary).value ==
          doctest::Approx(0.4).epsilon(1e-10));
}

TEST_CASE("independent pairs multiply at depth one") {
    CHECK(contract_annealed_ipr2(4, 1, Ensemble::Unitary).value ==
          doctest::Approx(0.16).epsilon(1e-10));
}

TEST_CASE("rtn agrees with statevector monte carlo on small brickwork circuits") {
    for (const int t : {2, 4}) {
        const int n = 6;
        const int n_real = 6000;
        std::vector<double> i2(n_real), pur(n_real);
        parallel_for(n_real, 0, [&](std::size_t r) {
            CircuitSpec spec;
            spec.architecture = Architecture::Brickwork;
            spec.n_sites = n;
            spec.depth = t;
            spec.seed = Rng::derive_stream_seed(1000 + t, r);
            const auto state = run_circuit(spec);
            double acc = 0.0;
            for (const auto& a : state.amplitudes()) acc += std::norm(a) * std::norm(a);
            i2[r] = acc;
            pur[r] = half_chain_purity(state);
        });
        const auto mi = testutil::mean_and_se(i2);
        const auto mp = testutil::mean_and_se(pur);
        CHECK(std::abs(mi.mean - contract_annealed_ipr2(n, t, Ensemble::Unitary).value) <
              3.0 * mi.std_error);
        CHECK(std::abs(mp.mean - annealed_half_chain_purity(n, t, Ensemble::Unitary).value) <
              3.0 * mp.std_error);
    }
}

TEST_CASE("exact contraction is reflection invariant") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (int t : {3, 5, 8}) {
            const RtnMethod exact{RtnMode::Exact};
            const auto a = detail::contract_rtn(8, t, ensemble, exact, 2, false, false);
            const auto b = detail::contract_rtn(8, t, ensemble, exact, 2, false, true);
            CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
        }
    }
}

TEST_CASE("tensor train converges to the exact contraction") {
    RtnMethod tt;
    tt.mode = RtnMode::TensorTrain;
    tt.tt_tol = 1e-13;
    const RtnMethod exact{RtnMode::Exact};
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        const int n = ensemble == Ensemble::Unitary ? 12 : 8;
        for (int t : {3, 6, 9}) {
            const auto e = contract_annealed_ipr2(n, t, ensemble, exact);
            const auto a = contract_annealed_ipr2(n, t, ensemble, tt);
            CHECK(a.value == doctest::Approx(e.value).epsilon(1e-8));
            const auto ep = annealed_half_chain_purity(n, t, ensemble, exact);
            const auto ap = annealed_half_chain_purity(n, t, ensemble, tt);
            CHECK(ap.value == doctest::Approx(ep.value).epsilon(1e-8));
            CHECK(a.method == "tensor_train");
            CHECK(a.trunc_error < 1e-6);
        }
    }
}

TEST_CASE("annealed I2 decreases with depth towards the Haar floor") {
    const int n = 10;
    const double haar = haar_ipr(Ensemble::Unitary, std::pow(2.0, n), 2);
    double prev = std::numeric_limits<double>::infinity();
    for (int t = 2; t <= 12; ++t) {
        const double v = contract_annealed_ipr2(n, t, Ensemble::Unitary).value;
        CHECK(v <= prev * (1.0 + 1e-12));
        CHECK(v >= haar - 1e-12);
        prev = v;
    }
}

TEST_CASE("delta S2 series matches pointwise contractions and decays") {
    const auto series = delta_s2_series({6, 8}, 10, Ensemble::Unitary);
    CHECK(series.points.size() == 2 * 10);
    for (const auto& pt : series.points) {
        CHECK(pt.delta_s2 >= -1e-12);
        const auto direct = contract_annealed_ipr2(pt.n_sites, pt.t, Ensemble::Unitary);
        CHECK(pt.annealed_i2 == doctest::Approx(direct.value).epsilon(1e-11));
    }
    // successive differences negative at late times
    double prev = 1e300;
    for (const auto& pt : series.points) {
        if (pt.n_sites != 8 || pt.t < 4) continue;
        CHECK(pt.delta_s2 < prev);
        prev = pt.delta_s2;
    }
}

TEST_CASE("exact capacity errors instruct the tensor-train path") {
    const RtnMethod exact{RtnMode::Exact};
    CHECK_THROWS_AS(contract_annealed_ipr2(26, 2, Ensemble::Unitary, exact), capacity_error);
    try {
        contract_annealed_ipr2(16, 2, Ensemble::Orthogonal, exact);
        CHECK(false);
    } catch (const capacity_error& e) {
        CHECK(std::string(e.what()).find("tensor_train") != std::string::npos);
    }
    // auto mode silently switches over
    const auto v = contract_annealed_ipr2(16, 2, Ensemble::Orthogonal);
    CHECK(v.method == "tensor_train");
    CHECK_THROWS_AS(contract_annealed_ipr2(7, 2, Ensemble::Unitary), std::invalid_argument);
}
