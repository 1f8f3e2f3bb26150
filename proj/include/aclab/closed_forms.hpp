#pragma once

#include "aclab/commutant.hpp"

namespace aclab {

// E[I_k] of a global Haar state on total dimension D:
//   D * prod_{m<k} (1 + f_E(m)) / (D + f_E(m)).
double haar_ipr(Ensemble ensemble, double dimension, int k);

// log of the same; log_dimension may exceed the double range of D itself.
double haar_log_ipr(Ensemble ensemble, double log_dimension, int k);

// Overlap density of a Haar state at total dimension D. An infinite D selects
// the limiting forms: exp(-w) (unitary) and (2 pi w)^{-1/2} exp(-w/2)
// (orthogonal). Outside the support [0, D] the density is 0, not an error.
double porter_thomas_pdf(Ensemble ensemble, double dimension, double omega);

struct RmpsSpec {
    int d = 2;          // local dimension
    long chi = 2;       // bond dimension, a power of d
    long n_sites = 2;   // N >= r + 1
    Ensemble ensemble = Ensemble::Unitary;

    int bond_exponent() const;  // r = log_d(chi); throws if chi is not a power of d
    void validate() const;
};

// Exact staircase-averaged IPR,
//   D prod_m [(1+f)/(d chi+f)] * { prod_m [(chi+f)/(d chi+f)] }^{N-r-1}.
// Evaluated in log space; the plain value underflows for very large N.
double rmps_log_ipr(const RmpsSpec& spec, int k);
double rmps_ipr_exact(const RmpsSpec& spec, int k);

struct ScalingVariables {
    double x;           // dimensionless ratio N/N_Th (times (d-1)/d for RMPS)
    double alpha;       // leading correction coefficient
    double beta;        // subleading correction coefficient
    double n_thouless;  // Thouless length (chi for the staircase ensemble)
};

// x = (N/chi)(d-1)/d, alpha and beta with their 1/N corrections evaluated
// literally; the log_d argument N(d-1)/(x d) simplifies to chi, so the log
// correction is r/N.
ScalingVariables rmps_scaling_params(const RmpsSpec& spec);

struct GinibreRmpsSpec {
    int d = 2;
    long n_sites = 2;    // N (total qudits; D = d^N)
    long n_blocks = 2;   // coarse-grained block count
    long m = 2;          // transfer-matrix size
};

// I_k = D nu^{2k n_blocks} 1^T G^{n_blocks - 1} 1 over S_k, with Gram entries
// M^{k - distance(sigma, pi)} and all-ones boundary vectors. nu <= 0 selects
// the normalized default nu^2 = d^{-N/nb} M^{-(nb-1)/nb}, which makes I_1 = 1.
double ginibre_rmps_ipr(const GinibreRmpsSpec& spec, int k, double nu = -1.0);

struct RpmSpec {
    double epsilon = 1.0;  // phase-disorder strength, > 0
    long t = 2;            // circuit depth, even
    long n_sites = 2;
    int k = 2;

    void validate() const;
};

struct RpmIpr {
    double raw_sum;        // 1^T T^{N-1} 1 with T = m^{t/2} elementwise
    double ratio_to_haar;  // raw_sum / k!  (d -> infinity Haar normalization)
};

// Transfer-matrix evaluation of the random phase model in the strict
// d -> infinity limit: m_{s s'} = exp(-eps (k - n_F(s s'^{-1}))).
RpmIpr rpm_ipr_exact(const RpmSpec& spec, int max_k = kDefaultMaxReplicas);

// exp(k(k-1)x/2) * (1 - k(k-1)(k-2) x^{3/2} / (3 sqrt(N)))
double rpm_ipr_asymptotic(int k, double x, double n_sites);

}  // namespace aclab
