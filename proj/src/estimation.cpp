#include "aclab/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "aclab/closed_forms.hpp"
#include "aclab/errors.hpp"
#include "aclab/parallel.hpp"

namespace aclab {

namespace {

// Mean log-likelihood with a fixed chunk layout so the reduction is
// independent of the worker count.
class MeanLogLikelihood {
  public:
    MeanLogLikelihood(const std::vector<double>& samples, Ensemble ensemble, int gh_order,
                      int workers)
        : samples_(samples), ensemble_(ensemble), gh_order_(gh_order), workers_(workers) {}

    double operator()(double alpha, double beta) const {
        const UniversalDistribution dist(UniversalParams{ensemble_, alpha, beta}, gh_order_);
        constexpr std::size_t kChunks = 64;
        const std::size_t n = samples_.size();
        std::vector<double> partial(kChunks, 0.0);
        parallel_for(kChunks, workers_, [&](std::size_t c) {
            const std::size_t lo = n * c / kChunks;
            const std::size_t hi = n * (c + 1) / kChunks;
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += dist.log_pdf(samples_[i]);
            partial[c] = acc;
        });
        double total = 0.0;
        for (double p : partial) total += p;
        return total / static_cast<double>(n);
    }

  private:
    const std::vector<double>& samples_;
    Ensemble ensemble_;
    int gh_order_;
    int workers_;
};

struct Box {
    double alpha_max, beta_max;
    bool fit_beta;

    double clamp_a(double a) const { return std::clamp(a, 0.0, alpha_max); }
    double clamp_b(double b) const { return fit_beta ? std::clamp(b, 0.0, beta_max) : 0.0; }
};

// Box-aware central differences; falls back to one-sided stencils at the edges.
template <class F>
void fd_gradient(const F& f, const Box& box, double a, double b, double h, double& ga,
                 double& gb) {
    auto eval_a = [&](double x) { return f(box.clamp_a(x), b); };
    auto deriv = [&](auto&& g, double x, double xmax) {
        const double lo = std::max(0.0, x - h), hi = std::min(xmax, x + h);
        return (g(hi) - g(lo)) / (hi - lo);
    };
    ga = deriv(eval_a, a, box.alpha_max);
    if (box.fit_beta) {
        auto eval_b = [&](double x) { return f(a, box.clamp_b(x)); };
        gb = deriv(eval_b, b, box.beta_max);
    } else {
        gb = 0.0;
    }
}

template <class F>
void fd_hessian(const F& f, const Box& box, double a, double b, double h, double out[4]) {
    // second differences on a box-clamped stencil
    auto at = [&](double x, double y) { return f(box.clamp_a(x), box.clamp_b(y)); };
    const double a0 = std::max(a, h), b0 = box.fit_beta ? std::max(b, h) : b;
    const double f00 = at(a0, b0);
    out[0] = (at(a0 + h, b0) - 2.0 * f00 + at(a0 - h, b0)) / (h * h);
    if (box.fit_beta) {
        out[3] = (at(a0, b0 + h) - 2.0 * f00 + at(a0, b0 - h)) / (h * h);
        out[1] = out[2] = (at(a0 + h, b0 + h) - at(a0 + h, b0 - h) - at(a0 - h, b0 + h) +
                           at(a0 - h, b0 - h)) /
                          (4.0 * h * h);
    } else {
        out[1] = out[2] = 0.0;
        out[3] = 0.0;
    }
}

struct OptimumCandidate {
    double a, b, value;
    bool converged;
};

template <class F>
OptimumCandidate maximize_from(const F& f, const Box& box, double a, double b,
                               const FitSettings& st) {
    constexpr double kH = 1e-4;
    double value = f(a, b);
    bool converged = false;
    for (int iter = 0; iter < st.max_iterations; ++iter) {
        double ga, gb;
        fd_gradient(f, box, a, b, kH, ga, gb);
        // projected gradient: drop components pushing outside the box
        double pga = ga, pgb = gb;
        if ((a <= 0.0 && ga < 0.0) || (a >= box.alpha_max && ga > 0.0)) pga = 0.0;
        if (!box.fit_beta || (b <= 0.0 && gb < 0.0) || (b >= box.beta_max && gb > 0.0)) pgb = 0.0;
        if (std::hypot(pga, pgb) < st.grad_tol) {
            converged = true;
            break;
        }
        // Newton direction when the Hessian is negative definite, else ascent
        double hm[4];
        fd_hessian(f, box, a, b, kH, hm);
        double da, db;
        const double det = hm[0] * hm[3] - hm[1] * hm[2];
        const bool neg_definite = box.fit_beta ? (hm[0] < 0.0 && det > 0.0) : (hm[0] < 0.0);
        if (neg_definite) {
            if (box.fit_beta) {
                da = -(hm[3] * ga - hm[1] * gb) / det;
                db = -(-hm[2] * ga + hm[0] * gb) / det;
            } else {
                da = -ga / hm[0];
                db = 0.0;
            }
        } else {
            da = pga;
            db = pgb;
        }
        // backtracking line search on the projected step
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            const double na = box.clamp_a(a + step * da);
            const double nb = box.clamp_b(b + step * db);
            if (na != a || nb != b) {
                const double nv = f(na, nb);
                if (nv > value) {
                    a = na;
                    b = nb;
                    value = nv;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) {
            // no uphill move at any scale: treat as stationary
            converged = std::hypot(pga, pgb) < 100.0 * st.grad_tol;
            break;
        }
    }
    return OptimumCandidate{a, b, value, converged};
}

}  // namespace

FitResult mle_fit(const std::vector<double>& samples, Ensemble ensemble,
                  const FitSettings& settings) {
    if (samples.size() < 100)
        throw std::invalid_argument("mle_fit: need at least 100 samples");
    for (double w : samples)
        if (!(w >= 0.0)) throw std::invalid_argument("mle_fit: samples must be >= 0");

    const bool fit_beta = settings.mode == FitSettings::Mode::AlphaBeta;
    const Box box{settings.alpha_max, settings.beta_max, fit_beta};
    MeanLogLikelihood mean_ll(samples, ensemble, settings.gh_order, settings.workers);

    // coarse multi-start grid: 5 alphas x 3 betas
    const double alphas[5] = {0.0, 0.15, 0.4, 0.8, 1.6};
    const double betas[3] = {0.0, 0.01, 0.04};
    std::vector<std::pair<double, double>> starts;
    for (double a : alphas) {
        if (a > settings.alpha_max) continue;
        if (fit_beta)
            for (double b : betas) starts.emplace_back(a, std::min(b, settings.beta_max));
        else
            starts.emplace_back(a, 0.0);
    }
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < starts.size(); ++i)
        scored.emplace_back(mean_ll(starts[i].first, starts[i].second), i);
    std::sort(scored.rbegin(), scored.rend());

    OptimumCandidate best{0.0, 0.0, -std::numeric_limits<double>::infinity(), false};
    const std::size_t n_descend = std::min<std::size_t>(3, scored.size());
    for (std::size_t i = 0; i < n_descend; ++i) {
        const auto [a0, b0] = starts[scored[i].second];
        const auto cand = maximize_from(mean_ll, box, a0, b0, settings);
        if (cand.value > best.value) best = cand;
    }

    FitResult result;
    result.ensemble = ensemble;
    result.alpha_hat = best.a;
    result.beta_hat = best.b;
    result.n_samples = samples.size();
    result.log_likelihood = best.value * static_cast<double>(samples.size());
    result.converged = best.converged;
    if (!best.converged)
        result.diagnostics = "optimizer did not reach the gradient tolerance; "
                             "treat the estimate and its errors as unreliable";

    // observed information: -n * Hessian of the mean log-likelihood
    double hm[4];
    fd_hessian(mean_ll, box, best.a, best.b, 1e-4, hm);
    const double n = static_cast<double>(samples.size());
    const double ia = -n * hm[0], ib = -n * hm[3], ic = -n * hm[1];
    bool info_ok;
    if (fit_beta) {
        const double det = ia * ib - ic * ic;
        info_ok = ia > 0.0 && det > 0.0;
        if (info_ok) {
            result.covariance = {ib / det, -ic / det, -ic / det, ia / det};
            result.alpha_err = std::sqrt(result.covariance[0]);
            result.beta_err = std::sqrt(result.covariance[3]);
        }
    } else {
        info_ok = ia > 0.0;
        if (info_ok) {
            result.covariance = {1.0 / ia, 0.0, 0.0, 0.0};
            result.alpha_err = std::sqrt(1.0 / ia);
            result.beta_err = 0.0;
        }
    }
    result.sigma_method = "observed_information";

    if (!info_ok) {
        // bootstrap fallback: refit resampled data starting from the MLE
        Rng rng(settings.bootstrap_seed);
        std::vector<double> est_a, est_b;
        std::vector<double> resample(samples.size());
        FitSettings quick = settings;
        quick.max_iterations = 40;
        for (int r = 0; r < settings.bootstrap_resamples; ++r) {
            for (auto& w : resample) w = samples[rng.below(samples.size())];
            MeanLogLikelihood ll(resample, ensemble, settings.gh_order, settings.workers);
            const auto cand = maximize_from(ll, box, best.a, best.b, quick);
            est_a.push_back(cand.a);
            est_b.push_back(cand.b);
        }
        auto sd = [](const std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m += x;
            m /= v.size();
            double s = 0.0;
            for (double x : v) s += (x - m) * (x - m);
            return std::sqrt(s / (v.size() - 1));
        };
        result.alpha_err = sd(est_a);
        result.beta_err = fit_beta ? sd(est_b) : 0.0;
        result.covariance = {result.alpha_err * result.alpha_err, 0.0, 0.0,
                             result.beta_err * result.beta_err};
        result.sigma_method = "bootstrap";
    }

    const UniversalDistribution fitted(UniversalParams{ensemble, best.a, best.b},
                                       settings.gh_order);
    result.ks_statistic = ks_statistic(samples, fitted);
    return result;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample set");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        sup = std::max(sup, std::max(f - static_cast<double>(i) / n,
                                     static_cast<double>(i + 1) / n - f));
    }
    return sup;
}

double ks_statistic(std::vector<double> samples, const UniversalDistribution& dist) {
    return ks_statistic(std::move(samples), [&](double w) { return dist.cdf(w); });
}

namespace {

DecayFit regress(const std::vector<std::pair<int, double>>& series, double n_scale,
                 const FitWindow& window) {
    if (series.empty()) throw std::invalid_argument("fit_decay_timescale: empty series");
    int t_min = series.front().first, t_max = series.front().first;
    for (const auto& [t, v] : series) {
        t_min = std::min(t_min, t);
        t_max = std::max(t_max, t);
    }
    const int lo = window.t_lo.value_or(t_min + (t_max - t_min) / 2);
    const int hi = window.t_hi.value_or(t_max);

    DecayFit fit;
    fit.window_lo = lo;
    fit.window_hi = hi;
    for (const auto& [t, v] : series) {
        if (t < lo || t > hi) continue;
        if (!(v > 0.0))
            throw std::domain_error("fit_decay_timescale: nonpositive value inside the window");
        fit.points.emplace_back(t, -std::log2(v / n_scale));
    }
    if (fit.points.size() < 4)
        throw std::invalid_argument("fit_decay_timescale: need at least 4 points in the window");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(fit.points.size());
    for (const auto& [t, y] : fit.points) {
        sx += t;
        sy += y;
        sxx += static_cast<double>(t) * t;
        sxy += t * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / m;
    double rss = 0.0;
    for (const auto& [t, y] : fit.points) {
        const double r = y - (slope * t + icpt);
        rss += r * r;
    }
    fit.residual_rms = std::sqrt(rss / m);
    if (!(slope > 0.0))
        throw std::domain_error("fit_decay_timescale: series does not decay in the window");
    fit.tau = 1.0 / slope;
    return fit;
}

}  // namespace

DecayFit fit_decay_timescale(const std::vector<std::pair<int, double>>& series, double n_scale,
                             const FitWindow& window) {
    return regress(series, n_scale, window);
}

DecayFit fit_decay_kappa(const std::vector<std::pair<int, double>>& beta_series, double n_scale,
                         double tau, const FitWindow& window) {
    DecayFit fit = regress(beta_series, n_scale, window);
    fit.kappa = tau / fit.tau;  // fitted slope is kappa / tau
    return fit;
}

XebReport xeb_fidelity(
    const std::function<PureState(std::uint64_t realization)>& ideal_state_provider,
    const std::function<std::vector<std::uint64_t>(std::uint64_t realization, std::uint64_t n,
                                                   Rng& rng)>& noisy_bitstring_sampler,
    const UniversalParams& fitted_params, double epsilon_noise, int n_sites, int depth,
    const XebSettings& settings) {
    if (settings.realizations == 0) throw std::invalid_argument("xeb_fidelity: no realizations");
    const std::uint64_t per = std::max<std::uint64_t>(1, settings.n_bitstrings / settings.realizations);

    struct Partial {
        double sum = 0.0, sum_sq = 0.0;
        std::uint64_t count = 0;
    };
    std::vector<Partial> partials(settings.realizations);
    parallel_for(settings.realizations, settings.workers, [&](std::size_t r) {
        const PureState ideal = ideal_state_provider(r);
        Rng rng = Rng::stream(settings.seed, 0x9e0000 + r);
        const auto xs = noisy_bitstring_sampler(r, per, rng);
        const double dim = static_cast<double>(ideal.dimension());
        Partial p;
        for (const auto x : xs) {
            const double w = dim * std::norm(ideal.amplitudes()[x]);
            p.sum += w;
            p.sum_sq += w * w;
            ++p.count;
        }
        partials[r] = p;
    });
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t count = 0;
    for (const auto& p : partials) {
        sum += p.sum;
        sum_sq += p.sum_sq;
        count += p.count;
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sum_sq / static_cast<double>(count) - mean * mean;

    double dim = 1.0;
    for (int i = 0; i < n_sites; ++i) dim *= 2.0;

    XebReport rep;
    rep.epsilon_noise = epsilon_noise;
    rep.n_sites = n_sites;
    rep.depth = depth;
    rep.n_bitstrings = count;
    rep.realizations = settings.realizations;
    rep.precision_warning = count < 1000;
    rep.xeb_value = mean - 1.0;
    rep.xeb_std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
    rep.alpha = fitted_params.alpha;
    rep.beta = fitted_params.beta;
    rep.i2_alpha_beta = haar_ipr(fitted_params.ensemble, dim, 2) *
                        std::exp(fitted_params.alpha) * std::exp(-4.0 * fitted_params.beta);
    rep.fidelity_estimate = rep.xeb_value / (dim * rep.i2_alpha_beta - 1.0);
    rep.reference_fidelity =
        std::pow(1.0 - epsilon_noise, static_cast<double>(depth) * n_sites / 2.0);
    return rep;
}

}  // namespace aclab
