#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "harqopt/fading.hpp"

using namespace harqopt;

TEST_SUITE_BEGIN("fading");

TEST_CASE("cdf closed form") {
    const auto spec = FadingSpec::block(1.0);
    CHECK(gain_cdf(spec, 0.0) == 0.0);
    CHECK(gain_cdf(spec, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-12));
    CHECK(gain_cdf(FadingSpec::block(2.0), 0.5) == doctest::Approx(0.6321205588285577).epsilon(1e-12));
    CHECK(gain_cdf(spec, std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(gain_cdf(spec, -0.1), std::domain_error);
}

TEST_CASE("inverse cdf closed form and domain") {
    const auto spec = FadingSpec::block(1.0);
    CHECK(gain_inv_cdf(spec, 0.0) == 0.0);
    CHECK(gain_inv_cdf(spec, 1e-3) == doctest::Approx(0.0010005003335835335).epsilon(1e-12));
    CHECK(gain_inv_cdf(spec, 0.5) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
    CHECK_THROWS_AS(gain_inv_cdf(spec, 1.0), std::domain_error);
    CHECK_THROWS_AS(gain_inv_cdf(spec, -0.1), std::domain_error);
}

TEST_CASE("cdf/inv-cdf round trip across the unit interval") {
    for (double lambda : {0.5, 1.0, 3.7}) {
        const auto spec = FadingSpec::block(lambda);
        for (int i = 0; i <= 60; ++i) {
            const double p = i == 0 ? 0.0 : std::pow(10.0, -12.0 + 12.0 * i / 60.0) * 0.999;
            const double g = gain_inv_cdf(spec, p);
            if (p == 0.0)
                CHECK(gain_cdf(spec, g) == 0.0);
            else
                CHECK(gain_cdf(spec, g) == doctest::Approx(p).epsilon(1e-12));
        }
        CHECK(gain_cdf(spec, gain_inv_cdf(spec, 0.9999)) == doctest::Approx(0.9999).epsilon(1e-12));
    }
}

TEST_CASE("pdf integrates the cdf locally") {
    const auto spec = FadingSpec::block(1.3);
    for (double g : {0.01, 0.4, 2.0}) {
        const double h = 1e-6;
        const double fd = (gain_cdf(spec, g + h) - gain_cdf(spec, g - h)) / (2.0 * h);
        CHECK(gain_pdf(spec, g) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(mean_gain(spec) == doctest::Approx(1.0 / 1.3));
}

TEST_CASE("block paths are constant; beta degeneracies are sample-exact") {
    const auto block = sample_gain_path(FadingSpec::block(1.0), 5, 42);
    for (double g : block) CHECK(g == block.front());

    const auto corr1 = sample_gain_path(FadingSpec::correlated(1.0, 1.0), 5, 42);
    for (std::size_t i = 0; i < 5; ++i) CHECK(corr1[i] == block[i]);

    const auto fast = sample_gain_path(FadingSpec::fast(1.0), 6, 7);
    const auto corr0 = sample_gain_path(FadingSpec::correlated(0.0, 1.0), 6, 7);
    for (std::size_t i = 0; i < 6; ++i) CHECK(fast[i] == corr0[i]);

    CHECK(sample_gain_path(FadingSpec::fast(1.0), 8, 3) == sample_gain_path(FadingSpec::fast(1.0), 8, 3));
}

TEST_CASE("fast-fading empirical mean and KS distance") {
    const std::size_t n = 1000000;
    auto path = sample_gain_path(FadingSpec::fast(1.0), n, 20240001);
    double mean = 0.0;
    for (double g : path) mean += g;
    mean /= static_cast<double>(n);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.005));

    std::sort(path.begin(), path.end());
    const auto spec = FadingSpec::fast(1.0);
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = gain_cdf(spec, path[i]);
        ks = std::max(ks, std::abs(F - static_cast<double>(i + 1) / n));
        ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    }
    CHECK(ks < 0.002);
}

TEST_CASE("correlated paths: lag-1 correlation of h matches beta") {
    const std::size_t n = 1000000;
    for (double beta : {0.5, 0.9}) {
        GainProcess proc(FadingSpec::correlated(beta, 1.0), 91);
        double cross = 0.0, var = 0.0;
        auto prev = proc.coefficient();
        proc.next();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            proc.next();
            const auto cur = proc.coefficient();
            cross += cur.first * prev.first + cur.second * prev.second; // Re{h_{k+1} conj(h_k)}
            var += prev.first * prev.first + prev.second * prev.second;
            prev = cur;
        }
        CHECK(cross / var == doctest::Approx(beta).epsilon(0.01));
    }
    // squared-coefficient relation on the gains: corr(g_k, g_{k+1}) = beta^2
    const double beta = 0.8;
    const auto path = sample_gain_path(FadingSpec::correlated(beta, 1.0), n, 92);
    double m = 0.0;
    for (double g : path) m += g;
    m /= static_cast<double>(n);
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cov += (path[i] - m) * (path[i + 1] - m);
        var += (path[i] - m) * (path[i] - m);
    }
    CHECK(cov / var == doctest::Approx(beta * beta).epsilon(0.02));
}

TEST_CASE("marginal gain distribution is invariant along the path") {
    // stationarity: compare step-0 and step-9 samples across many short paths
    const std::size_t paths = 200000;
    double mean0 = 0.0, mean9 = 0.0;
    std::vector<double> g9(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        const auto p = sample_gain_path(FadingSpec::correlated(0.7, 2.0), 10, 1000 + i);
        mean0 += p.front();
        mean9 += p.back();
        g9[i] = p.back();
    }
    mean0 /= static_cast<double>(paths);
    mean9 /= static_cast<double>(paths);
    CHECK(mean0 == doctest::Approx(0.5).epsilon(0.01));
    CHECK(mean9 == doctest::Approx(0.5).epsilon(0.01));

    std::sort(g9.begin(), g9.end());
    const auto spec = FadingSpec::block(2.0);
    double ks = 0.0;
    for (std::size_t i = 0; i < paths; ++i)
        ks = std::max(ks, std::abs(gain_cdf(spec, g9[i]) - static_cast<double>(i + 1) / paths));
    CHECK(ks < 0.005);
}

TEST_CASE("invalid specs are rejected") {
    FadingSpec bad = FadingSpec::block(0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    FadingSpec badbeta = FadingSpec::correlated(1.5, 1.0);
    CHECK_THROWS_AS(badbeta.validate(), std::invalid_argument);
    CHECK_THROWS_AS(sample_gain_path(FadingSpec::block(1.0), 0, 1), std::invalid_argument);
}

TEST_SUITE_END();
