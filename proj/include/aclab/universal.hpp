#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aclab/commutant.hpp"
#include "aclab/rng.hpp"

namespace aclab {

struct UniversalParams {
    Ensemble ensemble = Ensemble::Unitary;
    double alpha = 0.0;
    double beta = 0.0;

    void validate() const;
    // First-order validity window of the beta expansion at moment order k.
    bool within_first_order_window(int k) const {
        return beta * static_cast<double>(k) * k * (k - 1) <= 0.5;
    }
};

// Closed-form moments: E[omega^k] = m_k e^{k(k-1) alpha / 2} e^{-k^2 (k-1) beta}
// with m_k = k! (unitary) or (2k-1)!! (orthogonal).
double theoretical_moment(int k, const UniversalParams& params);

// Gauss-Hermite nodes/weights for a standard normal mixture variable:
// E[f(z)] = sum_i weight[i] f(node[i]).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermiteRule gauss_hermite(int order);

// The two-parameter overlap distribution: a lognormal scale mixture of the
// Porter-Thomas kernel carrying a degree-5 derivative-operator correction in
// beta. The operator coefficients are chosen so the k <= 5 moments match the
// conjectured closed forms exactly, which pins the same alpha convention for
// both ensembles; at beta = 0 the density reduces to the bare mixture, and at
// alpha = beta = 0 to the Porter-Thomas limit.
class UniversalDistribution {
  public:
    static constexpr int kDefaultOrder = 96;
    static constexpr int kMomentOrders = 6;  // exact moment matching for k = 0..5

    explicit UniversalDistribution(const UniversalParams& params, int gh_order = kDefaultOrder);

    const UniversalParams& params() const { return params_; }
    int order() const { return static_cast<int>(nodes_.size()); }

    double pdf(double omega) const;
    double cdf(double omega) const;
    double log_pdf(double omega) const;

    // Operator coefficients b_j of sum_j b_j omega^j d_omega^j (exposed for tests).
    const std::array<double, kMomentOrders>& operator_coefficients() const { return bcoef_; }

  private:
    UniversalParams params_;
    std::vector<double> nodes_, weights_;
    std::vector<double> rates_;                    // E_i = exp(alpha/2 - sqrt(alpha) z_i)
    std::array<double, kMomentOrders> bcoef_{};    // operator basis coefficients
    std::array<double, kMomentOrders> ypoly_{};    // polynomial in y after acting on the kernel
};

struct CdfGridOptions {
    int points = 4096;
    double omega_lo = 1e-8;
    double tail_mass = 1e-10;  // omega_hi chosen so the remaining tail is below this
};

// Log-spaced cached CDF with monotone-cubic inverse; the sampling backend for
// beta != 0 and for KS-style quantile work.
class OverlapSampler {
  public:
    explicit OverlapSampler(const UniversalDistribution& dist, const CdfGridOptions& opt = {});

    double quantile(double u) const;

    // beta = 0: exact product sampler omega = PT * LogNormal(-alpha/2, alpha);
    // beta != 0: inverse-CDF on the cached grid.
    std::vector<double> sample(std::size_t n, Rng& rng) const;

    const std::vector<double>& grid_omega() const { return omega_; }
    const std::vector<double>& grid_cdf() const { return cdf_; }

  private:
    UniversalParams params_;
    std::vector<double> omega_, cdf_;   // strictly increasing cdf knots
    std::vector<double> log_omega_, slope_;  // monotone cubic data on (cdf -> log omega)
    double low_exponent_;  // local power law below the grid: cdf ~ C omega^p
};

struct NegativityReport {
    double min_value;
    double omega_at_min;
    bool violates;  // min below -1e-12
};

// Scans the pdf on a log grid; first-order corrections may drive small
// negative excursions outside the validity window. Violations are reported,
// never clipped.
NegativityReport scan_pdf_negativity(const UniversalDistribution& dist, double omega_lo = 1e-8,
                                     double omega_hi = 500.0, int points = 4000);

}  // namespace aclab
