#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aclab/commutant.hpp"
#include "aclab/rng.hpp"

namespace aclab {

using cdouble = std::complex<double>;

inline constexpr std::size_t kDefaultAmplitudeCap = std::size_t{1} << 26;

enum class Architecture { Brickwork, Staircase, KickedIsing };

const char* architecture_name(Architecture a);

struct KickedIsingParams {
    // J = 1, b = (sqrt(5)+5)/8, h = (sqrt(5)+1)/4; a standard non-integrable point.
    double j = 1.0;
    double b = 0.90450849718747371205;
    double h = 0.80901699437494742410;
};

struct CircuitSpec {
    Architecture architecture = Architecture::Brickwork;
    int n_sites = 2;
    int d = 2;
    int depth = 1;     // Brickwork / KickedIsing
    long chi = 2;      // Staircase
    Ensemble ensemble = Ensemble::Unitary;
    KickedIsingParams kim;
    std::uint64_t seed = 0;

    void validate(std::size_t amplitude_cap = kDefaultAmplitudeCap) const;
    std::size_t dimension() const;
    std::string digest() const;  // content hash of the canonical field encoding
};

// Dense statevector over N qudits; site 0 is the most significant digit of the
// basis index.
class PureState {
  public:
    PureState(int n_sites, int d);
    static PureState computational_zero(int n_sites, int d);

    int n_sites() const { return n_sites_; }
    int local_dim() const { return d_; }
    std::size_t dimension() const { return amps_.size(); }
    const std::vector<cdouble>& amplitudes() const { return amps_; }
    std::vector<cdouble>& amplitudes() { return amps_; }

    double squared_norm() const;
    void normalize();

    // Gate on m consecutive sites [first, first+m), gate index big-endian in
    // the site order.
    void apply_gate(int first_site, const Eigen::MatrixXcd& gate);
    void apply_pauli(int site, int pauli);  // 1 = X, 2 = Y, 3 = Z (qubits only)

  private:
    int n_sites_, d_;
    std::vector<cdouble> amps_;
};

// Haar gates via QR of a Ginibre matrix with the diagonal phase (or sign)
// correction. Orthogonal draws have purely real entries.
Eigen::MatrixXcd sample_haar_gate(Ensemble ensemble, int dim, Rng& rng);

// Runs the full circuit from `initial` (or the architecture default: the
// all-zeros state, or a seeded Haar-random product state for KickedIsing).
// Deterministic given (spec, seed).
PureState run_circuit(const CircuitSpec& spec, const std::optional<PureState>& initial = {},
                      std::size_t amplitude_cap = kDefaultAmplitudeCap);

struct NoiseModel {
    double epsilon_noise = 0.0;  // per-gate depolarizing probability

    void validate() const;
};

// Depolarizing trajectory unraveling for brickwork qubit circuits: with
// probability eps each gate is followed by one of the 15 non-identity two-site
// Paulis, uniformly. Gates are drawn from the spec seed, trajectory coins from
// the caller's rng, so eps = 0 reproduces run_circuit bit for bit.
PureState run_noisy_trajectory(const CircuitSpec& spec, const NoiseModel& noise, Rng& rng,
                               std::size_t amplitude_cap = kDefaultAmplitudeCap);

struct SampleMeta {
    std::string spec_digest;
    std::string mode;
    std::uint64_t seed = 0;
    std::uint64_t realizations = 1;
};

struct OverlapSampleSet {
    std::vector<double> samples;  // omega = D |<x|psi>|^2 values
    SampleMeta meta;
};

struct OverlapStatistics {
    OverlapSampleSet set;
    std::array<double, 5> ipr{};     // empirical I_1..I_5
    double s2 = 0.0;                 // -ln I_2
    double half_chain_purity = 1.0;  // tr rho_{A}^2, A = first floor(N/2) sites
};

struct SamplingMode {
    bool full_enumeration = true;
    std::uint64_t n_bitstrings = 0;  // uniform_bitstrings(n) when not full
    bool with_purity = true;
};

OverlapStatistics overlap_statistics(const PureState& state, const SamplingMode& mode, Rng& rng,
                                     std::size_t amplitude_cap = kDefaultAmplitudeCap);

double half_chain_purity(const PureState& state);

// Born-rule bitstring sampling (used by the XEB pipeline only).
std::vector<std::uint64_t> born_sample(const PureState& state, std::uint64_t n, Rng& rng);

// Kicked Ising helpers. H = b sum X + h sum Z + J sum ZZ on an open chain.
void apply_kicked_ising_hamiltonian(const KickedIsingParams& p, int n_sites,
                                    const std::vector<cdouble>& in, std::vector<cdouble>& out);
double kicked_ising_energy(const KickedIsingParams& p, const PureState& state);

// One Floquet step exp(-i H)|psi> by Lanczos iteration (tolerance 1e-10).
void kicked_ising_step(const KickedIsingParams& p, PureState& state, double tol = 1e-10);

// Dense eigendecomposition of the Floquet operator; test oracle for N <= 10.
Eigen::MatrixXcd kicked_ising_dense_floquet(const KickedIsingParams& p, int n_sites);

}  // namespace aclab
