#include <doctest.h>

#include <cmath>

#include "aclab/closed_forms.hpp"
#include "aclab/estimation.hpp"
#include "aclab/universal.hpp"
#include "support/numeric_utils.hpp"

using namespace aclab;

namespace {

// adaptive quadrature of omega^k * pdf over the full support; integration in
// log-omega with the upper edge set by the largest lognormal scale reachable
// by the mixture
double pdf_moment(const UniversalDistribution& dist, int k) {
    const double scale_hi = std::exp(-dist.params().alpha / 2.0 +
                                     std::sqrt(dist.params().alpha) * 19.0);
    const double hi = std::max(200.0, 60.0 * scale_hi);
    // the orthogonal density carries ~sqrt(w_lo) of mass below the cutoff, so
    // the lower edge sits deep enough for 1e-9 accuracy
    return testutil::integrate_log(
        [&](double w) { return std::pow(w, k) * dist.pdf(w); }, 1e-19, hi, 1e-13);
}

const double kLattice_alpha[3] = {0.0, 0.3, 0.8};
const double kLattice_beta[3] = {0.0, 0.01, 0.05};

}  // namespace

TEST_CASE("gauss-hermite rule integrates low normal moments exactly") {
    const auto rule = gauss_hermite(96);
    double m0 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        m0 += rule.weights[i];
        m2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        m4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m2 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("theoretical moments") {
    CHECK(theoretical_moment(1, {Ensemble::Unitary, 0.7, 0.02}) == doctest::Approx(1.0));
    CHECK(theoretical_moment(1, {Ensemble::Orthogonal, 0.7, 0.02}) == doctest::Approx(1.0));
    CHECK(theoretical_moment(2, {Ensemble::Unitary, 0.5, 0.0}) ==
          doctest::Approx(2.0 * std::exp(0.5)).epsilon(1e-14));
    CHECK(theoretical_moment(2, {Ensemble::Unitary, 0.5, 0.02}) ==
          doctest::Approx(2.0 * std::exp(0.42)).epsilon(1e-14));
    CHECK(theoretical_moment(3, {Ensemble::Orthogonal, 0.0, 0.0}) == doctest::Approx(15.0));

    UniversalParams p{Ensemble::Unitary, 0.0, 0.01};
    CHECK(p.within_first_order_window(2));
    CHECK_FALSE(p.within_first_order_window(5));  // 0.01 * 100 > 0.5
}

TEST_CASE("pdf reduces to the Porter-Thomas limits at alpha = beta = 0") {
    const UniversalDistribution u({Ensemble::Unitary, 0.0, 0.0});
    for (double w : {0.0, 0.3, 1.0, 4.0, 9.0})
        CHECK(u.pdf(w) == doctest::Approx(std::exp(-w)).epsilon(1e-10));

    const UniversalDistribution o({Ensemble::Orthogonal, 0.0, 0.0});
    const double inf = std::numeric_limits<double>::infinity();
    for (double w : {0.2, 1.0, 2.0, 6.0})
        CHECK(o.pdf(w) ==
              doctest::Approx(porter_thomas_pdf(Ensemble::Orthogonal, inf, w)).epsilon(1e-10));
    CHECK(o.pdf(2.0) ==
          doctest::Approx(std::exp(-1.0) / std::sqrt(4.0 * M_PI)).epsilon(1e-10));
    CHECK_THROWS_AS(u.pdf(-0.1), std::domain_error);
}

TEST_CASE("pdf converges uniformly to the Porter-Thomas limit as (alpha, beta) -> 0") {
    const UniversalDistribution near({Ensemble::Unitary, 1e-6, 1e-8});
    double sup = 0.0;
    for (double w = 0.0; w < 20.0; w += 0.05)
        sup = std::max(sup, std::abs(near.pdf(w) - std::exp(-w)));
    CHECK(sup < 1e-5);
}

TEST_CASE("increasing the quadrature order does not move the pdf") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        const UniversalParams p{ensemble, 0.3, 0.01};
        const UniversalDistribution d96(p, 96);
        const UniversalDistribution d144(p, 144);
        for (double w : {0.01, 0.1, 1.0, 3.0, 10.0, 40.0})
            CHECK(std::abs(d96.pdf(w) - d144.pdf(w)) < 1e-10);
    }
}

TEST_CASE("normalization over the validation lattice") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (double a : kLattice_alpha) {
            for (double b : kLattice_beta) {
                const UniversalDistribution dist({ensemble, a, b});
                CHECK(pdf_moment(dist, 0) == doctest::Approx(1.0).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("quadrature moments of the pdf match the conjectured closed forms") {
    // subset of the lattice here; the full sweep runs in the acceptance suite
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (double b : kLattice_beta) {
            const UniversalParams p{ensemble, 0.3, b};
            const UniversalDistribution dist(p);
            for (int k = 1; k <= 5; ++k) {
                const double expected = theoretical_moment(k, p);
                CHECK(std::abs(pdf_moment(dist, k) - expected) <
                      1e-6 * (1.0 + std::abs(expected)));
            }
        }
    }
}

TEST_CASE("cdf basics") {
    const UniversalDistribution u({Ensemble::Unitary, 0.0, 0.0});
    CHECK(u.cdf(0.0) == 0.0);
    CHECK(u.cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u.cdf(60.0) == doctest::Approx(1.0).epsilon(1e-8));

    const UniversalDistribution o({Ensemble::Orthogonal, 0.4, 0.01});
    CHECK(o.cdf(1e-12) < 1e-5);  // continuous at 0 despite the 1/sqrt(w) density
    CHECK(o.cdf(500.0) == doctest::Approx(1.0).epsilon(1e-8));

    // Nondecreasing on a 1000-point grid. Where the first-order correction is
    // positive this is exact; at lattice points with reported negativity the
    // integral of the signed density can dip, bounded by the negative mass.
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (double a : kLattice_alpha) {
            for (double b : kLattice_beta) {
                const UniversalDistribution dist({ensemble, a, b});
                const bool positive = !scan_pdf_negativity(dist).violates;
                const double slack = positive ? 1e-12 : 1e-4;
                double prev = -1.0;
                for (int i = 0; i < 1000; ++i) {
                    const double w = std::exp(-8.0 + 12.0 * i / 999.0);
                    const double c = dist.cdf(w);
                    CHECK(c >= prev - slack);
                    prev = c;
                }
            }
        }
    }
}

TEST_CASE("cdf is the integral of the pdf") {
    const UniversalParams p{Ensemble::Unitary, 0.5, 0.02};
    const UniversalDistribution dist(p);
    for (double w : {0.5, 2.0, 8.0}) {
        const double by_quad =
            testutil::integrate([&](double x) { return dist.pdf(x); }, 0.0, w, 1e-13);
        CHECK(dist.cdf(w) == doctest::Approx(by_quad).epsilon(1e-10));
    }
}

TEST_CASE("beta = 0 sampling matches the closed-form moments") {
    const UniversalParams p{Ensemble::Unitary, 0.5, 0.0};
    const UniversalDistribution dist(p);
    const OverlapSampler sampler(dist);
    Rng rng(7);
    const auto xs = sampler.sample(1000000, rng);
    const auto m1 = testutil::mean_and_se(xs);
    CHECK(std::abs(m1.mean - 1.0) < 3.0 * m1.std_error);
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
    const auto m2 = testutil::mean_and_se(sq);
    CHECK(std::abs(m2.mean - theoretical_moment(2, p)) < 3.0 * m2.std_error);
}

TEST_CASE("pure Porter-Thomas samples pass the KS line") {
    const UniversalDistribution dist({Ensemble::Unitary, 0.0, 0.0});
    const OverlapSampler sampler(dist);
    Rng rng(123);
    const auto xs = sampler.sample(100000, rng);
    const double ks =
        ks_statistic(xs, [](double w) { return 1.0 - std::exp(-w); });
    CHECK(ks < 1.63 / std::sqrt(100000.0));
}

TEST_CASE("product sampler and inverse-cdf sampler agree (two-sample KS)") {
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        const UniversalParams p{ensemble, 0.4, 0.0};
        const UniversalDistribution dist(p);
        const OverlapSampler sampler(dist);
        Rng rng(99);
        const std::size_t n = 100000;
        auto a = sampler.sample(n, rng);  // beta = 0: product path
        std::vector<double> b(n);
        for (auto& w : b) w = sampler.quantile(rng.uniform01());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double sup = 0.0;
        std::size_t i = 0, j = 0;
        while (i < n && j < n) {
            if (a[i] <= b[j]) ++i;
            else ++j;
            sup = std::max(sup, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
        }
        // 1% two-sample critical value: 1.63 sqrt(2/n)
        CHECK(sup < 1.63 * std::sqrt(2.0 / n));
    }
}

TEST_CASE("inverse-cdf sampling reproduces beta-corrected moments") {
    const UniversalParams p{Ensemble::Unitary, 0.3, 0.02};
    const UniversalDistribution dist(p);
    const OverlapSampler sampler(dist);
    Rng rng(2718);
    const auto xs = sampler.sample(400000, rng);
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
    const auto m2 = testutil::mean_and_se(sq);
    CHECK(std::abs(m2.mean - theoretical_moment(2, p)) < 4.0 * m2.std_error);
}

TEST_CASE("negativity scan: clean inside the window, reported outside") {
    // base mixture is positive for every alpha at beta = 0
    for (double a : kLattice_alpha) {
        const auto rep = scan_pdf_negativity(UniversalDistribution({Ensemble::Unitary, a, 0.0}));
        CHECK(rep.min_value >= 0.0);
        CHECK_FALSE(rep.violates);
    }
    // physically coupled (alpha, beta) pairs stay nonnegative to tolerance
    for (const auto ensemble : {Ensemble::Unitary, Ensemble::Orthogonal}) {
        for (const auto& [a, b] :
             std::vector<std::pair<double, double>>{{0.3, 0.001}, {0.5, 0.005}, {0.8, 0.01}}) {
            const auto rep = scan_pdf_negativity(UniversalDistribution({ensemble, a, b}));
            CHECK(rep.min_value >= -1e-12);
            CHECK_FALSE(rep.violates);
        }
    }
    // far outside the first-order window the correction drives real negativity,
    // which is reported rather than clipped
    const auto rep = scan_pdf_negativity(UniversalDistribution({Ensemble::Unitary, 0.0, 0.05}));
    CHECK(rep.violates);
    CHECK(rep.min_value < -1e-6);
}

TEST_CASE("operator coefficients reduce to the identity at beta = 0") {
    const UniversalDistribution dist({Ensemble::Unitary, 0.2, 0.0});
    CHECK(dist.operator_coefficients()[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 1; j < UniversalDistribution::kMomentOrders; ++j)
        CHECK(std::abs(dist.operator_coefficients()[j]) < 1e-12);
}
