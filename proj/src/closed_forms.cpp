#include "aclab/closed_forms.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace aclab {

double haar_ipr(Ensemble ensemble, double dimension, int k) {
    if (!(dimension >= 1.0)) throw std::invalid_argument("haar_ipr: dimension must be >= 1");
    if (k < 1) throw std::invalid_argument("haar_ipr: k must be >= 1");
    double value = dimension;
    for (int m = 0; m < k; ++m) {
        const double f = static_cast<double>(ensemble_shift(ensemble, m));
        value *= (1.0 + f) / (dimension + f);
    }
    return value;
}

double haar_log_ipr(Ensemble ensemble, double log_dimension, int k) {
    double lg = log_dimension;
    for (int m = 0; m < k; ++m) {
        const double f = static_cast<double>(ensemble_shift(ensemble, m));
        lg += std::log1p(f) - log_dimension - std::log1p(f * std::exp(-log_dimension));
    }
    return lg;
}

double porter_thomas_pdf(Ensemble ensemble, double dimension, double omega) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    if (omega < 0.0) return 0.0;
    if (std::isinf(dimension)) {
        if (ensemble == Ensemble::Unitary) return std::exp(-omega);
        if (omega == 0.0) return std::numeric_limits<double>::infinity();
        return std::exp(-omega / 2.0) / std::sqrt(two_pi * omega);
    }
    const double d = dimension;
    if (omega > d) return 0.0;
    if (ensemble == Ensemble::Unitary) {
        // (D-1)/D (1 - w/D)^{D-2}; at the w = D edge the power is 0^{D-2}
        const double expnt = d - 2.0;
        if (omega == d) return expnt == 0.0 ? (d - 1.0) / d : 0.0;
        return (d - 1.0) / d * std::exp(expnt * std::log1p(-omega / d));
    }
    // Gamma(D/2) / (sqrt(D) Gamma((D-1)/2)) (pi w)^{-1/2} (1 - w/D)^{(D-3)/2}
    if (omega == 0.0) return std::numeric_limits<double>::infinity();
    const double log_norm = std::lgamma(d / 2.0) - std::lgamma((d - 1.0) / 2.0) - 0.5 * std::log(d);
    const double expnt = (d - 3.0) / 2.0;
    if (omega == d) {
        if (expnt > 0.0) return 0.0;
        if (expnt == 0.0) return std::exp(log_norm) / std::sqrt(M_PI * omega);
        return std::numeric_limits<double>::infinity();  // D = 2 edge divergence
    }
    return std::exp(log_norm + expnt * std::log1p(-omega / d)) / std::sqrt(M_PI * omega);
}

int RmpsSpec::bond_exponent() const {
    long c = chi;
    int r = 0;
    while (c > 1) {
        if (c % d != 0)
            throw std::invalid_argument("RmpsSpec: chi = " + std::to_string(chi) +
                                        " is not a power of d = " + std::to_string(d));
        c /= d;
        ++r;
    }
    return r;
}

void RmpsSpec::validate() const {
    if (d < 2) throw std::invalid_argument("RmpsSpec: d must be >= 2");
    if (chi < 1) throw std::invalid_argument("RmpsSpec: chi must be >= 1");
    const int r = bond_exponent();
    if (n_sites < r + 1)
        throw std::invalid_argument("RmpsSpec: need N >= r + 1 = " + std::to_string(r + 1));
}

double rmps_log_ipr(const RmpsSpec& spec, int k) {
    spec.validate();
    if (k < 1) throw std::invalid_argument("rmps_log_ipr: k must be >= 1");
    const int r = spec.bond_exponent();
    const double dchi = static_cast<double>(spec.d) * static_cast<double>(spec.chi);
    double head = 0.0, bulk = 0.0;
    for (int m = 0; m < k; ++m) {
        const double f = static_cast<double>(ensemble_shift(spec.ensemble, m));
        head += std::log((1.0 + f) / (dchi + f));
        bulk += std::log((static_cast<double>(spec.chi) + f) / (dchi + f));
    }
    const double log_d_total = static_cast<double>(spec.n_sites) * std::log(spec.d);
    return log_d_total + head + static_cast<double>(spec.n_sites - r - 1) * bulk;
}

double rmps_ipr_exact(const RmpsSpec& spec, int k) { return std::exp(rmps_log_ipr(spec, k)); }

ScalingVariables rmps_scaling_params(const RmpsSpec& spec) {
    spec.validate();
    const double d = spec.d;
    const double chi = static_cast<double>(spec.chi);
    const double n = static_cast<double>(spec.n_sites);
    const double x = n / chi * (d - 1.0) / d;
    const double log_arg = n * (d - 1.0) / (x * d);  // equals chi as printed
    const double alpha = x * (1.0 - d / (n * (d - 1.0)) - std::log(log_arg) / std::log(d) / n);
    double beta = x * x / (6.0 * n) * (d + 1.0) / (d - 1.0);
    if (spec.ensemble == Ensemble::Orthogonal) beta *= 4.0;
    return ScalingVariables{x, alpha, beta, chi};
}

double ginibre_rmps_ipr(const GinibreRmpsSpec& spec, int k, double nu) {
    if (spec.n_blocks < 1 || spec.m < 1 || spec.n_sites < 1 || spec.d < 2)
        throw std::invalid_argument("ginibre_rmps_ipr: invalid sizes");
    const auto basis = enumerate_commutant(Ensemble::Unitary, k);
    const auto n = static_cast<Eigen::Index>(basis.size());
    // Normalized Gram: M^{-distance(sigma, pi)}; the M^k scale is restored in logs.
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const auto st = perm_stats(basis.permutations[i], basis.permutations[j]);
            g(i, j) = g(j, i) = std::pow(static_cast<double>(spec.m), -st.distance);
        }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (long step = 1; step < spec.n_blocks; ++step) v = g * v;
    const double contracted = v.sum();

    const double log_d = std::log(static_cast<double>(spec.d));
    const double log_m = std::log(static_cast<double>(spec.m));
    const double nb = static_cast<double>(spec.n_blocks);
    double log_nu2;
    if (nu > 0.0) {
        log_nu2 = 2.0 * std::log(nu);
    } else {
        log_nu2 = -static_cast<double>(spec.n_sites) / nb * log_d - (nb - 1.0) / nb * log_m;
    }
    // I_k = D nu^{2 k nb} M^{k (nb-1)} * contracted
    const double log_scale = static_cast<double>(spec.n_sites) * log_d +
                             static_cast<double>(k) * nb * log_nu2 +
                             static_cast<double>(k) * (nb - 1.0) * log_m;
    return std::exp(log_scale) * contracted;
}

void RpmSpec::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("RpmSpec: epsilon must be > 0");
    if (t % 2 != 0) throw std::invalid_argument("RpmSpec: depth t must be even");
    if (n_sites < 2) throw std::invalid_argument("RpmSpec: need N >= 2");
    if (k < 1) throw std::invalid_argument("RpmSpec: k must be >= 1");
}

RpmIpr rpm_ipr_exact(const RpmSpec& spec, int max_k) {
    spec.validate();
    const auto basis = enumerate_commutant(Ensemble::Unitary, spec.k, max_k);
    const auto n = static_cast<Eigen::Index>(basis.size());
    const double half_t = static_cast<double>(spec.t) / 2.0;
    Eigen::MatrixXd transfer(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            const auto st = perm_stats(basis.permutations[i], basis.permutations[j]);
            // [m]^{t/2} with m = exp(-eps (k - n_F(sigma sigma'^{-1})))
            const double v = std::exp(-spec.epsilon * half_t * (spec.k - st.fixed_points));
            transfer(i, j) = transfer(j, i) = v;
        }
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (long site = 1; site < spec.n_sites; ++site) v = transfer * v;
    const double raw = v.sum();
    double kfact = 1.0;
    for (int i = 2; i <= spec.k; ++i) kfact *= i;
    return RpmIpr{raw, raw / kfact};
}

double rpm_ipr_asymptotic(int k, double x, double n_sites) {
    if (x < 0.0 || n_sites < 1.0) throw std::invalid_argument("rpm_ipr_asymptotic: bad arguments");
    const double kk = static_cast<double>(k);
    return std::exp(kk * (kk - 1.0) * x / 2.0) *
           (1.0 - kk * (kk - 1.0) * (kk - 2.0) * std::pow(x, 1.5) / (3.0 * std::sqrt(n_sites)));
}

}  // namespace aclab
