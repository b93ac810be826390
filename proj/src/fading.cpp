#include "harqopt/fading.hpp"

#include <cmath>

namespace harqopt {

double gain_cdf(const FadingSpec& spec, double g) {
    spec.validate();
    if (std::isinf(g) && g > 0.0) return 1.0;
    if (!(g >= 0.0)) throw std::domain_error("gain_cdf: g must be >= 0");
    return -std::expm1(-spec.lambda * g);
}

double gain_pdf(const FadingSpec& spec, double g) {
    spec.validate();
    if (!(g >= 0.0)) throw std::domain_error("gain_pdf: g must be >= 0");
    return spec.lambda * std::exp(-spec.lambda * g);
}

double gain_inv_cdf(const FadingSpec& spec, double p) {
    spec.validate();
    if (!(p >= 0.0) || p >= 1.0)
        throw std::domain_error("gain_inv_cdf: p must be in [0,1); p >= 1 needs channel inversion");
    return -std::log1p(-p) / spec.lambda;
}

double mean_gain(const FadingSpec& spec) {
    spec.validate();
    return 1.0 / spec.lambda;
}

double cdf_gap_over_pdf(const FadingSpec& spec, double a, double b) {
    spec.validate();
    if (!(a >= 0.0) || b < a) throw std::domain_error("cdf_gap_over_pdf: needs 0 <= a <= b");
    // (e^{-la} - e^{-lb}) / (l e^{-la}) = -expm1(-l (b-a)) / l
    if (std::isinf(b)) return 1.0 / spec.lambda;
    return -std::expm1(-spec.lambda * (b - a)) / spec.lambda;
}

GainProcess::GainProcess(const FadingSpec& spec, std::uint64_t seed)
    : beta_(spec.effective_beta()), sigma_(std::sqrt(0.5 / spec.lambda)), rng_(seed) {
    spec.validate();
    reset();
}

void GainProcess::reset() {
    hr_ = sigma_ * rng_.normal();
    hi_ = sigma_ * rng_.normal();
    primed_ = false;
}

double GainProcess::next() {
    if (primed_) {
        // innovation is drawn even at beta = 1 so Block and Correlated(1)
        // consume the stream identically
        const double w = std::sqrt(1.0 - beta_ * beta_);
        const double tr = sigma_ * rng_.normal();
        const double ti = sigma_ * rng_.normal();
        hr_ = beta_ * hr_ + w * tr;
        hi_ = beta_ * hi_ + w * ti;
    }
    primed_ = true;
    return hr_ * hr_ + hi_ * hi_;
}

std::vector<double> sample_gain_path(const FadingSpec& spec, std::size_t n_steps, std::uint64_t seed) {
    if (n_steps == 0) throw std::invalid_argument("sample_gain_path: n_steps must be >= 1");
    GainProcess proc(spec, seed);
    std::vector<double> path(n_steps);
    for (auto& g : path) g = proc.next();
    return path;
}

} // namespace harqopt
