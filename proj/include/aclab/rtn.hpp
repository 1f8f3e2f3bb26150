#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "aclab/commutant.hpp"

namespace aclab {

// Two-replica (k = 2) tensors of the averaged brickwork circuit, expressed in
// the commutant basis: 2 states per site (unitary), 3 (orthogonal).
struct ReplicaTensors {
    Ensemble ensemble;
    int d;
    int nc;
    double first_layer_weight;    // 1 / prod_m (d^2 + f_E(m))
    Eigen::MatrixXd gram_site;    // G(d), used by purity closures
    std::vector<double> bulk;     // W[tau, a1, a2] = sum_pi Wg(d^2) G(d) G(d)
    int id_index, swap_index;     // identity / swap element positions

    double w(int tau, int a1, int a2) const { return bulk[(tau * nc + a1) * nc + a2]; }
};

ReplicaTensors make_replica_tensors(Ensemble ensemble, int d);

inline constexpr std::size_t kExactRtnCapacity = 10'000'000;

enum class RtnMode { Exact, TensorTrain, Auto };

struct RtnMethod {
    RtnMode mode = RtnMode::Auto;
    double tt_tol = 1e-10;  // relative singular-value truncation tolerance
    int tt_max_bond = 256;
};

struct RtnValue {
    double value;
    double trunc_error;  // accumulated relative truncation weight; 0 in exact mode
    std::string method;  // "exact" or "tensor_train"
};

// Disorder-averaged E[I_2] of the depth-t brickwork circuit on N qudits.
RtnValue contract_annealed_ipr2(int n_sites, int t, Ensemble ensemble,
                                const RtnMethod& method = {}, int d = 2);

// Disorder-averaged half-chain purity E[tr rho_{N/2}^2]; 1 at t = 0.
RtnValue annealed_half_chain_purity(int n_sites, int t, Ensemble ensemble,
                                    const RtnMethod& method = {}, int d = 2);

struct AnnealedPoint {
    int n_sites;
    int t;
    double annealed_i2;
    double annealed_purity;
    double delta_s2;  // ln(E[I2] / I2_Haar), the annealed entropy deficit
    std::string method;
    double trunc_error;
};

struct AnnealedSeries {
    Ensemble ensemble;
    std::vector<AnnealedPoint> points;
};

// One time sweep per N; I_2 and the purity are read off after every layer.
AnnealedSeries delta_s2_series(const std::vector<int>& n_list, int t_max, Ensemble ensemble,
                               const RtnMethod& method = {}, int d = 2);

namespace detail {
// Exposed for the reflection-invariance property test.
RtnValue contract_rtn(int n_sites, int t, Ensemble ensemble, const RtnMethod& method, int d,
                      bool purity_closure, bool reflect);
}  // namespace detail

}  // namespace aclab
