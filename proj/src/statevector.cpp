#include "aclab/statevector.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aclab/errors.hpp"
#include "aclab/sha256.hpp"

namespace aclab {

const char* architecture_name(Architecture a) {
    switch (a) {
        case Architecture::Brickwork: return "brickwork";
        case Architecture::Staircase: return "staircase";
        case Architecture::KickedIsing: return "kicked_ising";
    }
    return "?";
}

std::size_t CircuitSpec::dimension() const {
    std::size_t dim = 1;
    for (int i = 0; i < n_sites; ++i) dim *= static_cast<std::size_t>(d);
    return dim;
}

void CircuitSpec::validate(std::size_t amplitude_cap) const {
    if (n_sites < 2) throw std::invalid_argument("CircuitSpec: need N >= 2");
    if (d < 2) throw std::invalid_argument("CircuitSpec: need d >= 2");
    double log_dim = n_sites * std::log2(static_cast<double>(d));
    if (log_dim > 62.0 || dimension() > amplitude_cap)
        throw capacity_error("CircuitSpec: d^N exceeds the amplitude cap of " +
                             std::to_string(amplitude_cap) + " amplitudes");
    switch (architecture) {
        case Architecture::Brickwork:
            if (depth < 0) throw std::invalid_argument("CircuitSpec: depth must be >= 0");
            break;
        case Architecture::Staircase: {
            long c = chi;
            int r = 0;
            while (c > 1) {
                if (c % d != 0)
                    throw std::invalid_argument("CircuitSpec: staircase chi must be a power of d");
                c /= d;
                ++r;
            }
            if (n_sites < r + 1)
                throw std::invalid_argument("CircuitSpec: staircase needs N >= r + 1");
            break;
        }
        case Architecture::KickedIsing:
            if (d != 2) throw std::invalid_argument("CircuitSpec: KickedIsing is qubit-only");
            if (depth < 0) throw std::invalid_argument("CircuitSpec: depth must be >= 0");
            break;
    }
}

std::string CircuitSpec::digest() const {
    std::ostringstream os;
    os << architecture_name(architecture) << "|N=" << n_sites << "|d=" << d;
    switch (architecture) {
        case Architecture::Brickwork:
            os << "|t=" << depth << "|ens=" << ensemble_name(ensemble);
            break;
        case Architecture::Staircase:
            os << "|chi=" << chi << "|ens=" << ensemble_name(ensemble);
            break;
        case Architecture::KickedIsing:
            os << "|t=" << depth << "|J=" << kim.j << "|b=" << kim.b << "|h=" << kim.h;
            break;
    }
    os << "|seed=" << seed;
    return sha256_hex(os.str());
}

PureState::PureState(int n_sites, int d) : n_sites_(n_sites), d_(d) {
    std::size_t dim = 1;
    for (int i = 0; i < n_sites; ++i) dim *= static_cast<std::size_t>(d);
    amps_.assign(dim, cdouble(0.0, 0.0));
}

PureState PureState::computational_zero(int n_sites, int d) {
    PureState s(n_sites, d);
    s.amps_[0] = 1.0;
    return s;
}

double PureState::squared_norm() const {
    double n = 0.0;
    for (const auto& a : amps_) n += std::norm(a);
    return n;
}

void PureState::normalize() {
    const double inv = 1.0 / std::sqrt(squared_norm());
    for (auto& a : amps_) a *= inv;
}

void PureState::apply_gate(int first_site, const Eigen::MatrixXcd& gate) {
    int m = 0;
    std::size_t q = 1;
    while (q < static_cast<std::size_t>(gate.rows())) q *= d_, ++m;
    if (q != static_cast<std::size_t>(gate.rows()) || gate.rows() != gate.cols())
        throw std::invalid_argument("apply_gate: gate dimension is not a power of d");
    if (first_site < 0 || first_site + m > n_sites_)
        throw std::invalid_argument("apply_gate: sites out of range");

    std::size_t post = 1;
    for (int i = first_site + m; i < n_sites_; ++i) post *= d_;
    std::size_t pre = amps_.size() / (post * q);

    std::vector<cdouble> in(q), out(q);
    for (std::size_t hi = 0; hi < pre; ++hi) {
        const std::size_t base_hi = hi * q * post;
        for (std::size_t lo = 0; lo < post; ++lo) {
            const std::size_t base = base_hi + lo;
            for (std::size_t l = 0; l < q; ++l) in[l] = amps_[base + l * post];
            for (std::size_t r = 0; r < q; ++r) {
                cdouble acc(0.0, 0.0);
                for (std::size_t l = 0; l < q; ++l) acc += gate(r, l) * in[l];
                out[r] = acc;
            }
            for (std::size_t r = 0; r < q; ++r) amps_[base + r * post] = out[r];
        }
    }
}

void PureState::apply_pauli(int site, int pauli) {
    if (d_ != 2) throw std::invalid_argument("apply_pauli: qubits only");
    const std::size_t bit = std::size_t{1} << (n_sites_ - 1 - site);
    const std::size_t dim = amps_.size();
    switch (pauli) {
        case 1:  // X
            for (std::size_t x = 0; x < dim; ++x)
                if (!(x & bit)) std::swap(amps_[x], amps_[x | bit]);
            break;
        case 2:  // Y
            for (std::size_t x = 0; x < dim; ++x)
                if (!(x & bit)) {
                    const cdouble a0 = amps_[x], a1 = amps_[x | bit];
                    amps_[x] = cdouble(0, -1) * a1;
                    amps_[x | bit] = cdouble(0, 1) * a0;
                }
            break;
        case 3:  // Z
            for (std::size_t x = 0; x < dim; ++x)
                if (x & bit) amps_[x] = -amps_[x];
            break;
        default: throw std::invalid_argument("apply_pauli: pauli must be 1, 2 or 3");
    }
}

Eigen::MatrixXcd sample_haar_gate(Ensemble ensemble, int dim, Rng& rng) {
    if (dim < 2) throw std::invalid_argument("sample_haar_gate: dim must be >= 2");
    if (ensemble == Ensemble::Unitary) {
        Eigen::MatrixXcd z(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) z(i, j) = cdouble(rng.normal(), rng.normal());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
        Eigen::MatrixXcd q = qr.householderQ();
        Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
        // Phase correction so the distribution is exactly Haar, not QR-biased.
        for (int j = 0; j < dim; ++j) {
            const cdouble rjj = r(j, j);
            const double mag = std::abs(rjj);
            const cdouble phase = mag > 0.0 ? rjj / mag : cdouble(1.0, 0.0);
            q.col(j) *= phase;
        }
        return q;
    }
    Eigen::MatrixXd z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q.cast<cdouble>();
}

namespace {

PureState kim_random_product_state(const CircuitSpec& spec, Rng& rng) {
    // Haar-random single-qubit product state (the initial-state distribution
    // is recorded in sample metadata through the spec digest).
    PureState state = PureState::computational_zero(spec.n_sites, 2);
    Eigen::MatrixXcd gate(2, 2);
    for (int site = 0; site < spec.n_sites; ++site) {
        cdouble a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
        const double n = std::sqrt(std::norm(a) + std::norm(b));
        a /= n;
        b /= n;
        gate << a, -std::conj(b), b, std::conj(a);
        state.apply_gate(site, gate);
    }
    return state;
}

void run_brickwork_layers(const CircuitSpec& spec, PureState& state, Rng& gate_rng,
                          Rng* noise_rng, double eps) {
    for (int s = 1; s <= spec.depth; ++s) {
        const int offset = (s % 2 == 1) ? 0 : 1;
        for (int i = offset; i + 1 < spec.n_sites; i += 2) {
            const auto gate = sample_haar_gate(spec.ensemble, spec.d * spec.d, gate_rng);
            state.apply_gate(i, gate);
            if (noise_rng && noise_rng->uniform01() < eps) {
                const int p = static_cast<int>(noise_rng->below(15)) + 1;  // skip II
                const int p1 = p / 4, p2 = p % 4;
                if (p1) state.apply_pauli(i, p1);
                if (p2) state.apply_pauli(i + 1, p2);
            }
        }
    }
}

}  // namespace

PureState run_circuit(const CircuitSpec& spec, const std::optional<PureState>& initial,
                      std::size_t amplitude_cap) {
    spec.validate(amplitude_cap);
    Rng rng = Rng::stream(spec.seed, 0);

    PureState state = [&] {
        if (initial) {
            if (initial->dimension() != spec.dimension())
                throw std::invalid_argument("run_circuit: initial state dimension mismatch");
            return *initial;
        }
        if (spec.architecture == Architecture::KickedIsing)
            return kim_random_product_state(spec, rng);
        return PureState::computational_zero(spec.n_sites, spec.d);
    }();

    switch (spec.architecture) {
        case Architecture::Brickwork:
            run_brickwork_layers(spec, state, rng, nullptr, 0.0);
            break;
        case Architecture::Staircase: {
            long c = spec.chi;
            int r = 0;
            while (c > 1) c /= spec.d, ++r;
            int gate_dim = 1;
            for (int i = 0; i <= r; ++i) gate_dim *= spec.d;
            for (int i = 0; i + r < spec.n_sites; ++i) {
                const auto gate = sample_haar_gate(spec.ensemble, gate_dim, rng);
                state.apply_gate(i, gate);
            }
            break;
        }
        case Architecture::KickedIsing:
            for (int s = 0; s < spec.depth; ++s) kicked_ising_step(spec.kim, state);
            break;
    }
    return state;
}

void NoiseModel::validate() const {
    if (epsilon_noise < 0.0 || epsilon_noise > 1.0)
        throw std::invalid_argument("NoiseModel: epsilon must lie in [0, 1]");
}

PureState run_noisy_trajectory(const CircuitSpec& spec, const NoiseModel& noise, Rng& rng,
                               std::size_t amplitude_cap) {
    spec.validate(amplitude_cap);
    noise.validate();
    if (spec.architecture != Architecture::Brickwork || spec.d != 2)
        throw std::invalid_argument("run_noisy_trajectory: brickwork qubit circuits only");
    Rng gate_rng = Rng::stream(spec.seed, 0);
    PureState state = PureState::computational_zero(spec.n_sites, 2);
    run_brickwork_layers(spec, state, gate_rng, &rng, noise.epsilon_noise);
    return state;
}

double half_chain_purity(const PureState& state) {
    const int na = state.n_sites() / 2;
    std::size_t da = 1, db = 1;
    for (int i = 0; i < na; ++i) da *= state.local_dim();
    db = state.dimension() / da;
    // tr rho_A^2 = ||A^dagger A||_F^2 for the (da x db) amplitude matrix.
    Eigen::Map<const Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        state.amplitudes().data(), static_cast<Eigen::Index>(da), static_cast<Eigen::Index>(db));
    if (da <= db) {
        Eigen::MatrixXcd rho = a * a.adjoint();
        return rho.squaredNorm();
    }
    Eigen::MatrixXcd gram = a.adjoint() * a;
    return gram.squaredNorm();
}

OverlapStatistics overlap_statistics(const PureState& state, const SamplingMode& mode, Rng& rng,
                                     std::size_t amplitude_cap) {
    const std::size_t dim = state.dimension();
    const double dd = static_cast<double>(dim);
    OverlapStatistics stats;
    if (mode.full_enumeration) {
        if (dim > amplitude_cap)
            throw capacity_error("overlap_statistics: full enumeration beyond the amplitude cap");
        stats.set.samples.resize(dim);
        std::array<double, 5> ipr{};
        for (std::size_t x = 0; x < dim; ++x) {
            const double p = std::norm(state.amplitudes()[x]);
            stats.set.samples[x] = dd * p;
            double pk = p;
            for (int k = 0; k < 5; ++k) {
                ipr[k] += pk;
                pk *= p;
            }
        }
        stats.ipr = ipr;
        stats.set.meta.mode = "full_enumeration";
        stats.set.meta.realizations = 1;
    } else {
        if (mode.n_bitstrings == 0)
            throw std::invalid_argument("overlap_statistics: requested an empty sample");
        stats.set.samples.resize(mode.n_bitstrings);
        std::array<double, 5> moments{};
        for (std::uint64_t i = 0; i < mode.n_bitstrings; ++i) {
            const std::uint64_t x = rng.below(dim);
            const double omega = dd * std::norm(state.amplitudes()[x]);
            stats.set.samples[i] = omega;
            double wk = omega;
            for (int k = 0; k < 5; ++k) {
                moments[k] += wk;
                wk *= omega;
            }
        }
        // I_k = E[omega^k] / D^{k-1}
        double scale = 1.0;
        for (int k = 0; k < 5; ++k) {
            stats.ipr[k] = moments[k] / static_cast<double>(mode.n_bitstrings) / scale;
            scale *= dd;
        }
        stats.set.meta.mode = "uniform_bitstrings(" + std::to_string(mode.n_bitstrings) + ")";
        stats.set.meta.realizations = 1;
    }
    stats.s2 = -std::log(stats.ipr[1]);
    stats.half_chain_purity = mode.with_purity ? half_chain_purity(state) : -1.0;
    return stats;
}

std::vector<std::uint64_t> born_sample(const PureState& state, std::uint64_t n, Rng& rng) {
    const std::size_t dim = state.dimension();
    std::vector<double> cdf(dim);
    double acc = 0.0;
    for (std::size_t x = 0; x < dim; ++x) {
        acc += std::norm(state.amplitudes()[x]);
        cdf[x] = acc;
    }
    const double total = acc;
    std::vector<std::uint64_t> out(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const double u = rng.uniform01() * total;
        out[i] = std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (out[i] >= dim) out[i] = dim - 1;
    }
    return out;
}

void apply_kicked_ising_hamiltonian(const KickedIsingParams& p, int n_sites,
                                    const std::vector<cdouble>& in, std::vector<cdouble>& out) {
    const std::size_t dim = in.size();
    out.assign(dim, cdouble(0.0, 0.0));
    for (std::size_t x = 0; x < dim; ++x) {
        double diag = 0.0;
        for (int j = 0; j < n_sites; ++j) {
            const double zj = (x >> (n_sites - 1 - j)) & 1 ? -1.0 : 1.0;
            diag += p.h * zj;
            if (j + 1 < n_sites) {
                const double zj1 = (x >> (n_sites - 2 - j)) & 1 ? -1.0 : 1.0;
                diag += p.j * zj * zj1;
            }
        }
        out[x] += diag * in[x];
    }
    for (int j = 0; j < n_sites; ++j) {
        const std::size_t bit = std::size_t{1} << (n_sites - 1 - j);
        for (std::size_t x = 0; x < dim; ++x) out[x] += p.b * in[x ^ bit];
    }
}

double kicked_ising_energy(const KickedIsingParams& p, const PureState& state) {
    std::vector<cdouble> hpsi;
    apply_kicked_ising_hamiltonian(p, state.n_sites(), state.amplitudes(), hpsi);
    cdouble e(0.0, 0.0);
    for (std::size_t x = 0; x < hpsi.size(); ++x)
        e += std::conj(state.amplitudes()[x]) * hpsi[x];
    return e.real();
}

void kicked_ising_step(const KickedIsingParams& p, PureState& state, double tol) {
    const std::size_t dim = state.dimension();
    const int max_m = 90;
    std::vector<std::vector<cdouble>> basis;
    std::vector<double> alpha, beta;

    basis.push_back(state.amplitudes());
    std::vector<cdouble> w;
    for (int m = 0; m < max_m; ++m) {
        apply_kicked_ising_hamiltonian(p, state.n_sites(), basis[m], w);
        cdouble a(0.0, 0.0);
        for (std::size_t x = 0; x < dim; ++x) a += std::conj(basis[m][x]) * w[x];
        alpha.push_back(a.real());
        for (std::size_t x = 0; x < dim; ++x) w[x] -= alpha[m] * basis[m][x];
        if (m > 0)
            for (std::size_t x = 0; x < dim; ++x) w[x] -= beta[m - 1] * basis[m - 1][x];
        // full reorthogonalization; the Krylov space here is small
        for (int r = 0; r <= m; ++r) {
            cdouble ov(0.0, 0.0);
            for (std::size_t x = 0; x < dim; ++x) ov += std::conj(basis[r][x]) * w[x];
            for (std::size_t x = 0; x < dim; ++x) w[x] -= ov * basis[r][x];
        }
        double nb = 0.0;
        for (const auto& v : w) nb += std::norm(v);
        nb = std::sqrt(nb);

        const int k = m + 1;
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        Eigen::VectorXcd phases(k);
        for (int i = 0; i < k; ++i)
            phases(i) = std::exp(cdouble(0.0, -es.eigenvalues()(i)));
        const Eigen::VectorXd first = es.eigenvectors().row(0).transpose();
        Eigen::VectorXcd y = es.eigenvectors() * (phases.array() * first.array().cast<cdouble>()).matrix();

        const double err = nb * std::abs(y(k - 1));
        if (err < tol || nb < 1e-14 || m == max_m - 1) {
            if (err >= tol && nb >= 1e-14)
                throw numerical_error("kicked_ising_step: Lanczos did not converge", err);
            std::vector<cdouble> result(dim, cdouble(0.0, 0.0));
            for (int i = 0; i < k; ++i)
                for (std::size_t x = 0; x < dim; ++x) result[x] += y(i) * basis[i][x];
            state.amplitudes() = std::move(result);
            state.normalize();
            return;
        }
        beta.push_back(nb);
        for (auto& v : w) v /= nb;
        basis.push_back(w);
    }
}

Eigen::MatrixXcd kicked_ising_dense_floquet(const KickedIsingParams& p, int n_sites) {
    const std::size_t dim = std::size_t{1} << n_sites;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<cdouble> col(dim), out;
    for (std::size_t c = 0; c < dim; ++c) {
        std::fill(col.begin(), col.end(), cdouble(0.0, 0.0));
        col[c] = 1.0;
        apply_kicked_ising_hamiltonian(p, n_sites, col, out);
        for (std::size_t r = 0; r < dim; ++r) h(r, c) = out[r].real();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd phases(dim);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(dim); ++i)
        phases(i) = std::exp(cdouble(0.0, -es.eigenvalues()(i)));
    return es.eigenvectors().cast<cdouble>() * phases.asDiagonal() *
           es.eigenvectors().transpose().cast<cdouble>();
}

}  // namespace aclab
