#ifndef HARQOPT_FADING_HPP
#define HARQOPT_FADING_HPP

#include <cstdint>
#include <vector>

#include "harqopt/rng.hpp"
#include "harqopt/types.hpp"

namespace harqopt {

enum class GainFamily { Rayleigh };

enum class TemporalModel { Block, Fast, Correlated };

/// Channel gain model: distribution of g = |h|^2 plus how g evolves over
/// codeword transmissions. Rayleigh fading gives g ~ Exp(lambda), mean 1/lambda.
/// Block is Correlated with beta = 1, Fast is Correlated with beta = 0.
struct FadingSpec {
    GainFamily family = GainFamily::Rayleigh;
    double lambda = 1.0;
    TemporalModel temporal = TemporalModel::Block;
    double beta = 1.0;

    static FadingSpec block(double lambda = 1.0) { return {GainFamily::Rayleigh, lambda, TemporalModel::Block, 1.0}; }
    static FadingSpec fast(double lambda = 1.0) { return {GainFamily::Rayleigh, lambda, TemporalModel::Fast, 0.0}; }
    static FadingSpec correlated(double beta, double lambda = 1.0) {
        return {GainFamily::Rayleigh, lambda, TemporalModel::Correlated, beta};
    }

    /// beta actually used by the Gauss-Markov step for this temporal model
    double effective_beta() const {
        switch (temporal) {
            case TemporalModel::Block: return 1.0;
            case TemporalModel::Fast: return 0.0;
            case TemporalModel::Correlated: return beta;
        }
        return 1.0;
    }

    void validate() const {
        if (!(lambda > 0.0)) throw std::invalid_argument("FadingSpec: lambda must be > 0");
        if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("FadingSpec: beta must be in [0,1]");
    }
};

/// F_G(g) = 1 - exp(-lambda g). Throws std::domain_error for g < 0.
double gain_cdf(const FadingSpec& spec, double g);

/// f_G(g) = lambda exp(-lambda g)
double gain_pdf(const FadingSpec& spec, double g);

/// F_G^{-1}(p) = -log(1-p)/lambda for p in [0,1). p >= 1 means channel
/// inversion (infinite power) and throws std::domain_error.
double gain_inv_cdf(const FadingSpec& spec, double p);

/// E{G} = 1/lambda
double mean_gain(const FadingSpec& spec);

/// (F_G(b) - F_G(a))/f_G(a) for b >= a (b may be +inf), computed in survival
/// space so it stays finite where cdf and pdf both underflow.
double cdf_gap_over_pdf(const FadingSpec& spec, double a, double b);

/// First-order Gauss-Markov evolution of the complex coefficient h:
///   h_{k+1} = beta h_k + sqrt(1-beta^2) theta,  theta ~ CN(0, 1/lambda)
/// h_0 is drawn from the stationary CN(0, 1/lambda), so g_k = |h_k|^2 is
/// marginally Exp(lambda) at every step. One advance per codeword transmission.
class GainProcess {
public:
    GainProcess(const FadingSpec& spec, std::uint64_t seed);

    /// gain for the next codeword transmission (advances the state after the
    /// first call; the first call returns |h_0|^2)
    double next();

    /// redraw h_0 from the stationary distribution (fresh fading realization)
    void reset();

    /// current complex coefficient (real, imag)
    std::pair<double, double> coefficient() const { return {hr_, hi_}; }

private:
    double beta_;
    double sigma_; // per-component std of h: sqrt(1/(2 lambda))
    double hr_ = 0.0, hi_ = 0.0;
    bool primed_ = false;
    Rng rng_;
};

/// g_k = |h_k|^2 for k = 0..n_steps-1. Deterministic per seed. Block paths are
/// constant; Fast paths are i.i.d.; Correlated(beta=1) reproduces Block and
/// Correlated(beta=0) reproduces Fast sample-for-sample at equal seed.
std::vector<double> sample_gain_path(const FadingSpec& spec, std::size_t n_steps, std::uint64_t seed);

} // namespace harqopt

#endif
