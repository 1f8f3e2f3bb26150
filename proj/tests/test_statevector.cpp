#include <doctest.h>

#include <cmath>
#include <complex>

#include "aclab/closed_forms.hpp"
#include "aclab/errors.hpp"
#include "aclab/parallel.hpp"
#include "aclab/statevector.hpp"
#include "support/numeric_utils.hpp"

using namespace aclab;

TEST_CASE("haar gates are exact isometries") {
    Rng rng(11);
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (int dim : {2, 4, 8}) {
            const auto u = sample_haar_gate(ensemble, dim, rng);
            const Eigen::MatrixXcd err =
                u.adjoint() * u - Eigen::MatrixXcd::Identity(dim, dim);
            CHECK(err.cwiseAbs().maxCoeff() < 1e-12);
            if (ensemble == Ensemble::Orthogonal)
                CHECK(u.imag().cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("haar gate first moment: E|U00|^2 = 1/dim") {
    Rng rng(212);
    const int dim = 4, n = 100000;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        const auto u = sample_haar_gate(Ensemble::Unitary, dim, rng);
        vals[i] = std::norm(u(0, 0));
    }
    const auto [mean, se] = testutil::mean_and_se(vals);
    CHECK(std::abs(mean - 0.25) < 3.0 * se);
}

TEST_CASE("depth zero leaves the input state untouched") {
    CircuitSpec spec;
    spec.architecture = Architecture::Brickwork;
    spec.n_sites = 4;
    spec.depth = 0;
    spec.seed = 5;
    const auto state = run_circuit(spec);
    CHECK(std::abs(state.amplitudes()[0] - cdouble(1.0, 0.0)) == 0.0);
    Rng rng(0);
    SamplingMode full;
    const auto stats = overlap_statistics(state, full, rng);
    // omega at x = 0 equals D for the all-zeros input
    CHECK(stats.set.samples[0] == doctest::Approx(16.0));
    for (std::size_t x = 1; x < stats.set.samples.size(); ++x)
        CHECK(stats.set.samples[x] == 0.0);
}

TEST_CASE("norm is preserved and runs are deterministic") {
    for (const auto arch : {Architecture::Brickwork, Architecture::Staircase}) {
        CircuitSpec spec;
        spec.architecture = arch;
        spec.n_sites = 6;
        spec.depth = 5;
        spec.chi = 4;
        spec.ensemble = Ensemble::Orthogonal;
        spec.seed = 99;
        const auto a = run_circuit(spec);
        const auto b = run_circuit(spec);
        CHECK(std::abs(a.squared_norm() - 1.0) < 1e-10);
        CHECK(a.amplitudes() == b.amplitudes());
    }
}

TEST_CASE("brickwork N=2 t=1 reproduces the global Haar collision probability") {
    const int n_real = 10000;
    std::vector<double> i2(n_real);
    parallel_for(n_real, 0, [&](std::size_t r) {
        CircuitSpec spec;
        spec.architecture = Architecture::Brickwork;
        spec.n_sites = 2;
        spec.depth = 1;
        spec.seed = Rng::derive_stream_seed(321, r);
        const auto state = run_circuit(spec);
        double acc = 0.0;
        for (const auto& a : state.amplitudes()) acc += std::norm(a) * std::norm(a);
        i2[r] = acc;
    });
    const auto [mean, se] = testutil::mean_and_se(i2);
    CHECK(std::abs(mean - haar_ipr(Ensemble::Unitary, 4, 2)) < 3.0 * se);
}

TEST_CASE("staircase disorder average matches the closed-form staircase ipr") {
    const int n_real = 10000;
    std::vector<double> i2(n_real);
    parallel_for(n_real, 0, [&](std::size_t r) {
        CircuitSpec spec;
        spec.architecture = Architecture::Staircase;
        spec.n_sites = 3;
        spec.chi = 2;
        spec.seed = Rng::derive_stream_seed(77, r);
        const auto state = run_circuit(spec);
        double acc = 0.0;
        for (const auto& a : state.amplitudes()) acc += std::norm(a) * std::norm(a);
        i2[r] = acc;
    });
    const auto [mean, se] = testutil::mean_and_se(i2);
    const double expected = rmps_ipr_exact(RmpsSpec{2, 2, 3, Ensemble::Unitary}, 2);
    CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("overlap statistics on hand-built states") {
    // fully localized state
    const auto zero = PureState::computational_zero(3, 2);
    Rng rng(1);
    SamplingMode full;
    const auto s0 = overlap_statistics(zero, full, rng);
    for (double v : s0.ipr) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s0.s2 == doctest::Approx(0.0));
    CHECK(s0.half_chain_purity == doctest::Approx(1.0).epsilon(1e-12));

    // flat superposition: I2 = 1/D, every omega = 1
    PureState flat(2, 2);
    for (auto& a : flat.amplitudes()) a = 0.5;
    const auto s1 = overlap_statistics(flat, full, rng);
    CHECK(s1.ipr[1] == doctest::Approx(0.25).epsilon(1e-12));
    for (double w : s1.set.samples) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));

    // Bell pair: half-chain purity 1/2
    PureState bell(2, 2);
    bell.amplitudes()[0] = bell.amplitudes()[3] = std::sqrt(0.5);
    CHECK(half_chain_purity(bell) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("haar two-qubit states have mean single-site purity 0.8") {
    const int n_real = 10000;
    std::vector<double> purity(n_real);
    parallel_for(n_real, 0, [&](std::size_t r) {
        CircuitSpec spec;
        spec.architecture = Architecture::Brickwork;
        spec.n_sites = 2;
        spec.depth = 1;
        spec.seed = Rng::derive_stream_seed(8811, r);
        purity[r] = half_chain_purity(run_circuit(spec));
    });
    const auto [mean, se] = testutil::mean_and_se(purity);
    CHECK(std::abs(mean - 0.8) < 3.0 * se);
}

TEST_CASE("uniform bitstring sampling is unbiased for the overlap mean") {
    CircuitSpec spec;
    spec.architecture = Architecture::Brickwork;
    spec.n_sites = 8;
    spec.depth = 6;
    spec.seed = 5150;
    const auto state = run_circuit(spec);
    Rng rng(31);
    SamplingMode mode;
    mode.full_enumeration = false;
    mode.n_bitstrings = 200000;
    const auto stats = overlap_statistics(state, mode, rng);
    const auto [mean, se] = testutil::mean_and_se(stats.set.samples);
    CHECK(std::abs(mean - 1.0) < 3.0 * se);

    SamplingMode empty;
    empty.full_enumeration = false;
    empty.n_bitstrings = 0;
    CHECK_THROWS_AS(overlap_statistics(state, empty, rng), std::invalid_argument);
}

TEST_CASE("capacity guards") {
    CircuitSpec spec;
    spec.architecture = Architecture::Brickwork;
    spec.n_sites = 40;
    spec.depth = 1;
    CHECK_THROWS_AS(spec.validate(), capacity_error);
    CHECK_THROWS_AS(run_circuit(spec), capacity_error);

    CircuitSpec small;
    small.n_sites = 12;
    small.depth = 1;
    CHECK_THROWS_AS(run_circuit(small, {}, 1024), capacity_error);
}

TEST_CASE("noisy trajectories") {
    CircuitSpec spec;
    spec.architecture = Architecture::Brickwork;
    spec.n_sites = 6;
    spec.depth = 6;
    spec.seed = 2024;

    // eps = 0 reproduces the clean run bit for bit
    Rng noise_rng(5);
    const auto clean = run_circuit(spec);
    const auto quiet = run_noisy_trajectory(spec, NoiseModel{0.0}, noise_rng);
    CHECK(clean.amplitudes() == quiet.amplitudes());

    // norm stays exactly preserved by the Pauli insertions
    Rng noisy_rng(6);
    const auto noisy = run_noisy_trajectory(spec, NoiseModel{0.5}, noisy_rng);
    CHECK(std::abs(noisy.squared_norm() - 1.0) < 1e-10);
    CHECK(noisy.amplitudes() != clean.amplitudes());

    NoiseModel bad{1.5};
    CHECK_THROWS_AS(run_noisy_trajectory(spec, bad, noisy_rng), std::invalid_argument);
}

TEST_CASE("born sampling follows the state distribution") {
    PureState state(2, 2);
    state.amplitudes() = {cdouble(std::sqrt(0.70), 0), cdouble(0, std::sqrt(0.19)),
                          cdouble(std::sqrt(0.10), 0), cdouble(std::sqrt(0.01), 0)};
    Rng rng(40);
    const auto xs = born_sample(state, 200000, rng);
    std::array<double, 4> freq{};
    for (auto x : xs) freq[x] += 1.0 / xs.size();
    CHECK(freq[0] == doctest::Approx(0.70).epsilon(0.02));
    CHECK(freq[1] == doctest::Approx(0.19).epsilon(0.03));
    CHECK(freq[3] == doctest::Approx(0.01).epsilon(0.2));
}

TEST_CASE("kicked ising conserves the Floquet generator energy") {
    for (int n : {6, 10}) {
        CircuitSpec spec;
        spec.architecture = Architecture::KickedIsing;
        spec.n_sites = n;
        spec.depth = 0;
        spec.seed = 446;
        const auto initial = run_circuit(spec);
        const double e0 = kicked_ising_energy(spec.kim, initial);
        spec.depth = 5;
        const auto evolved = run_circuit(spec);
        CHECK(std::abs(evolved.squared_norm() - 1.0) < 1e-10);
        CHECK(kicked_ising_energy(spec.kim, evolved) == doctest::Approx(e0).epsilon(1e-8));
    }
}

TEST_CASE("kicked ising krylov step matches the dense eigendecomposition oracle") {
    CircuitSpec spec;
    spec.architecture = Architecture::KickedIsing;
    spec.n_sites = 8;
    spec.depth = 0;
    spec.seed = 31337;
    PureState state = run_circuit(spec);  // the seeded random product state

    const auto uf = kicked_ising_dense_floquet(spec.kim, spec.n_sites);
    Eigen::VectorXcd dense(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); ++i) dense(i) = state.amplitudes()[i];
    for (int step = 0; step < 4; ++step) {
        dense = uf * dense;
        kicked_ising_step(spec.kim, state);
    }
    double max_err = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i)
        max_err = std::max(max_err, std::abs(dense(i) - state.amplitudes()[i]));
    CHECK(max_err < 1e-9);
}
