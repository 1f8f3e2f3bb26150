#include "aclab/universal.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "aclab/errors.hpp"

namespace aclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double double_factorial_odd(int k) {  // (2k-1)!!
    double r = 1.0;
    for (int i = 2 * k - 1; i > 1; i -= 2) r *= i;
    return r;
}

double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

double falling(double a, int m) {
    double r = 1.0;
    for (int i = 0; i < m; ++i) r *= a - i;
    return r;
}

}  // namespace

void UniversalParams::validate() const {
    if (alpha < 0.0 || beta < 0.0)
        throw std::invalid_argument("UniversalParams: alpha and beta must be >= 0");
}

double theoretical_moment(int k, const UniversalParams& params) {
    params.validate();
    if (k < 1) throw std::invalid_argument("theoretical_moment: k must be >= 1");
    const double kk = k;
    const double m =
        params.ensemble == Ensemble::Unitary ? factorial(k) : double_factorial_odd(k);
    return m * std::exp(kk * (kk - 1.0) / 2.0 * params.alpha) *
           std::exp(-kk * kk * (kk - 1.0) * params.beta);
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 2) throw std::invalid_argument("gauss_hermite: order must be >= 2");
    // Golub-Welsch on the Jacobi matrix of probabilists' Hermite polynomials;
    // nodes/weights integrate against the standard normal density.
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i + 1 < order; ++i)
        jac(i, i + 1) = jac(i + 1, i) = std::sqrt(static_cast<double>(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = v0 * v0;
    }
    return rule;
}

UniversalDistribution::UniversalDistribution(const UniversalParams& params, int gh_order)
    : params_(params) {
    params.validate();
    auto rule = gauss_hermite(gh_order);
    nodes_ = std::move(rule.nodes);
    weights_ = std::move(rule.weights);
    rates_.resize(nodes_.size());
    const double sa = std::sqrt(params.alpha);
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        rates_[i] = std::exp(params.alpha / 2.0 - sa * nodes_[i]);

    // Operator coefficients: solve sum_j b_j (-1)^j (k+1)...(k+j) = e^{-k^2(k-1) beta}
    // at k = 0..5, the degree-5 interpolation of the conjectured moment factor.
    constexpr int n = kMomentOrders;
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd g(n);
    for (int k = 0; k < n; ++k) {
        const double kk = k;
        g(k) = std::exp(-kk * kk * (kk - 1.0) * params.beta);
        double basis = 1.0;
        a(k, 0) = 1.0;
        for (int j = 1; j < n; ++j) {
            basis *= -(kk + j);
            a(k, j) = basis;
        }
    }
    Eigen::VectorXd b = a.fullPivLu().solve(g);
    for (int j = 0; j < n; ++j) bcoef_[j] = b(j);

    // Polynomial in y = omega * rate picked up by the kernel omega^p e^{-y}
    // under omega^j d^j, with p = 0 (unitary) or -1/2 (orthogonal):
    //   omega^j d^j [omega^p e^{-lam omega}] = omega^p e^{-y} sum_i C(j,i) (p)_(j-i) (-y)^i
    const double p = params.ensemble == Ensemble::Unitary ? 0.0 : -0.5;
    ypoly_.fill(0.0);
    for (int j = 0; j < n; ++j) {
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
            ypoly_[i] += bcoef_[j] * binom * falling(p, j - i) * ((i % 2 == 0) ? 1.0 : -1.0);
            binom *= static_cast<double>(j - i) / (i + 1);
        }
    }
}

double UniversalDistribution::pdf(double omega) const {
    if (omega < 0.0) throw std::domain_error("pdf: omega must be >= 0");
    const bool unitary = params_.ensemble == Ensemble::Unitary;
    if (!unitary && omega == 0.0) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double rate = rates_[i];
        const double y = unitary ? omega * rate : 0.5 * omega * rate;
        double poly = ypoly_[kMomentOrders - 1];
        for (int m = kMomentOrders - 2; m >= 0; --m) poly = poly * y + ypoly_[m];
        const double kernel = unitary ? rate * std::exp(-y)
                                      : std::sqrt(rate / (2.0 * kPi * omega)) * std::exp(-y);
        acc += weights_[i] * kernel * poly;
    }
    return acc;
}

double UniversalDistribution::log_pdf(double omega) const {
    const double v = pdf(omega);
    return std::log(std::max(v, 1e-300));
}

double UniversalDistribution::cdf(double omega) const {
    if (omega < 0.0) throw std::domain_error("cdf: omega must be >= 0");
    if (omega == 0.0) return 0.0;
    const bool unitary = params_.ensemble == Ensemble::Unitary;
    // Exact omega-integral of each kernel monomial: lower incomplete gamma.
    //   unitary:    int_0^w rate e^{-y} y^m = gamma(m+1, Y)
    //   orthogonal: int_0^w kernel y^m     = gamma(m+1/2, Y) / sqrt(pi)
    const double shift = unitary ? 1.0 : 0.5;
    std::array<double, kMomentOrders> gamma_m{};
    for (int m = 0; m < kMomentOrders; ++m) {
        gamma_m[m] = std::tgamma(m + shift);
        if (!unitary) gamma_m[m] /= std::sqrt(kPi);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double y = (unitary ? omega : 0.5 * omega) * rates_[i];
        double node_val = 0.0;
        for (int m = 0; m < kMomentOrders; ++m) {
            if (ypoly_[m] == 0.0) continue;
            node_val += ypoly_[m] * gamma_m[m] * boost::math::gamma_p(m + shift, y);
        }
        acc += weights_[i] * node_val;
    }
    return std::min(std::max(acc, 0.0), 1.0);
}

OverlapSampler::OverlapSampler(const UniversalDistribution& dist, const CdfGridOptions& opt)
    : params_(dist.params()) {
    // upper grid edge: expand until the remaining tail mass is below tail_mass
    double hi = 50.0 * std::exp(3.0 * std::sqrt(params_.alpha));
    while (1.0 - dist.cdf(hi) > opt.tail_mass && hi < 1e12) hi *= 2.0;

    std::vector<double> om(opt.points), cd(opt.points);
    const double llo = std::log(opt.omega_lo), lhi = std::log(hi);
    for (int i = 0; i < opt.points; ++i) {
        om[i] = std::exp(llo + (lhi - llo) * i / (opt.points - 1));
        cd[i] = dist.cdf(om[i]);
    }
    // keep a strictly increasing subsequence of knots
    omega_.push_back(om[0]);
    cdf_.push_back(cd[0]);
    for (int i = 1; i < opt.points; ++i) {
        if (cd[i] > cdf_.back() + 1e-15) {
            omega_.push_back(om[i]);
            cdf_.push_back(cd[i]);
        }
    }
    log_omega_.resize(omega_.size());
    for (std::size_t i = 0; i < omega_.size(); ++i) log_omega_[i] = std::log(omega_[i]);

    // Fritsch-Butland monotone cubic slopes for log(omega) as a function of u
    const std::size_t n = omega_.size();
    slope_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = cdf_[i + 1] - cdf_[i];
        delta[i] = (log_omega_[i + 1] - log_omega_[i]) / h[i];
    }
    slope_[0] = delta[0];
    slope_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            slope_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // local power law cdf ~ C omega^p below the grid
    low_exponent_ = (std::log(cdf_[1]) - std::log(cdf_[0])) / (log_omega_[1] - log_omega_[0]);
}

double OverlapSampler::quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("quantile: u must lie in [0, 1]");
    if (u <= cdf_.front())
        return omega_.front() * std::pow(u / cdf_.front(), 1.0 / low_exponent_);
    if (u >= cdf_.back()) return omega_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t j = static_cast<std::size_t>(it - cdf_.begin()) - 1;
    const double h = cdf_[j + 1] - cdf_[j];
    const double s = (u - cdf_[j]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    const double lw = h00 * log_omega_[j] + h10 * h * slope_[j] + h01 * log_omega_[j + 1] +
                      h11 * h * slope_[j + 1];
    return std::exp(lw);
}

std::vector<double> OverlapSampler::sample(std::size_t n, Rng& rng) const {
    if (n == 0) throw std::invalid_argument("sample: n must be >= 1");
    std::vector<double> out(n);
    if (params_.beta == 0.0) {
        const double sa = std::sqrt(params_.alpha);
        for (std::size_t i = 0; i < n; ++i) {
            double pt;
            if (params_.ensemble == Ensemble::Unitary) {
                pt = -std::log(rng.uniform01_open());
            } else {
                const double z = rng.normal();
                pt = z * z;
            }
            const double scale = std::exp(-params_.alpha / 2.0 + sa * rng.normal());
            out[i] = pt * scale;
        }
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = quantile(rng.uniform01());
    return out;
}

NegativityReport scan_pdf_negativity(const UniversalDistribution& dist, double omega_lo,
                                     double omega_hi, int points) {
    NegativityReport rep{std::numeric_limits<double>::infinity(), 0.0, false};
    const double llo = std::log(omega_lo), lhi = std::log(omega_hi);
    for (int i = 0; i < points; ++i) {
        const double w = std::exp(llo + (lhi - llo) * i / (points - 1));
        const double v = dist.pdf(w);
        if (v < rep.min_value) {
            rep.min_value = v;
            rep.omega_at_min = w;
        }
    }
    rep.violates = rep.min_value < -1e-12;
    return rep;
}

}  // namespace aclab
