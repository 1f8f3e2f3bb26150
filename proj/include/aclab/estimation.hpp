#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aclab/statevector.hpp"
#include "aclab/universal.hpp"

namespace aclab {

struct FitSettings {
    enum class Mode { AlphaOnly, AlphaBeta };
    Mode mode = Mode::AlphaBeta;
    double alpha_max = 5.0;
    double beta_max = 0.5;
    int gh_order = UniversalDistribution::kDefaultOrder;
    double grad_tol = 1e-7;  // on the per-sample mean log-likelihood
    int max_iterations = 200;
    int bootstrap_resamples = 200;
    std::uint64_t bootstrap_seed = 0x5eedbeef;
    int workers = 0;
};

struct FitResult {
    Ensemble ensemble = Ensemble::Unitary;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    double alpha_err = 0.0;
    double beta_err = 0.0;                 // 0 when beta is held fixed
    std::array<double, 4> covariance{};    // row-major 2x2
    double log_likelihood = 0.0;
    std::uint64_t n_samples = 0;
    double ks_statistic = 0.0;
    bool converged = false;
    std::string sigma_method;              // "observed_information" or "bootstrap"
    std::string diagnostics;               // non-empty when not converged
};

// Maximum-likelihood fit of (alpha, beta) over the box [0, alpha_max] x
// [0, beta_max]: multi-start from a 5x3 coarse grid, projected Newton steps
// with finite-difference derivatives of the mean log-likelihood; standard
// errors from the observed-information Hessian with a bootstrap fallback.
FitResult mle_fit(const std::vector<double>& samples, Ensemble ensemble,
                  const FitSettings& settings = {});

// sup_w |F_N(w) - F(w)|, exact over the empirical CDF jump points.
double ks_statistic(std::vector<double> samples, const UniversalDistribution& dist);
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

struct DecayFit {
    double tau = 0.0;
    std::optional<double> kappa;  // set by fit_decay_kappa
    int window_lo = 0, window_hi = 0;
    double residual_rms = 0.0;
    std::vector<std::pair<int, double>> points;  // (t, -log2(value / n_scale)) inside the window
};

struct FitWindow {
    // defaults to the last half of the series
    std::optional<int> t_lo;
    std::optional<int> t_hi;
};

// Linear regression of -log2(value / n_scale) against t; tau = 1 / slope.
DecayFit fit_decay_timescale(const std::vector<std::pair<int, double>>& series, double n_scale,
                             const FitWindow& window = {});

// kappa from a beta(t) series at fixed tau: the fitted slope equals kappa/tau.
DecayFit fit_decay_kappa(const std::vector<std::pair<int, double>>& beta_series, double n_scale,
                         double tau, const FitWindow& window = {});

struct XebSettings {
    std::uint64_t n_bitstrings = 100000;  // total, split evenly over realizations
    std::uint64_t realizations = 50;
    std::uint64_t seed = 1;
    int workers = 0;
};

struct XebReport {
    double epsilon_noise = 0.0;
    int n_sites = 0;
    int depth = 0;
    double xeb_value = 0.0;
    double xeb_std_error = 0.0;
    double i2_alpha_beta = 0.0;       // Eq-(39)-style I2 at the fitted (alpha, beta)
    double fidelity_estimate = 0.0;   // XEB / (D I2 - 1)
    double reference_fidelity = 1.0;  // (1 - eps)^{t N / 2}
    double alpha = 0.0, beta = 0.0;
    std::uint64_t n_bitstrings = 0;
    std::uint64_t realizations = 0;
    bool precision_warning = false;  // fewer than 1e3 bitstrings
};

// Linear XEB: bitstrings Born-sampled from the noisy circuit, ideal
// probabilities from the noiseless simulation of the same gate realization.
// The beta-corrected estimator divides by D I2^{alpha,beta} - 1.
XebReport xeb_fidelity(
    const std::function<PureState(std::uint64_t realization)>& ideal_state_provider,
    const std::function<std::vector<std::uint64_t>(std::uint64_t realization, std::uint64_t n,
                                                   Rng& rng)>& noisy_bitstring_sampler,
    const UniversalParams& fitted_params, double epsilon_noise, int n_sites, int depth,
    const XebSettings& settings = {});

}  // namespace aclab
