#pragma once

// Continuous 1-D family: standard Laplace marginal with a logistic
// regression function and a symmetric-rate-free flip channel.
//
//   p(x)   = e^(−|x|) / 2                (marginal density on ℝ)
//   η_τ(x) = 1 / (1 + e^(−τx))           (strictly increasing, η(0) = 1/2)
//
// The density proxy ω is taken to be p itself. The Bayes rule is 1{x ≥ 0}.
// Since η never attains its extremes, the exact corrupted-regression
// supremum is the limit value 1 − π₁ (and the infimum is π₀).
//
// gamma() reports the assumption bundle this family satisfies:
//
//   margin    α = 1, C_α = max(4, 8/τ)       nominal (sketch, not sharpened)
//   Hölder    β = 1, C_β = max(1, τ/4)       certified: |η'| ≤ τ/4
//   tail      γ = 1, C_γ = 2, t_γ = 1/3      certified: μ(p < ε) = 2ε
//   range     exponent τ, C_τ = max(1, 2^τ), t_τ = 1/3
//             certified: inf{η : p > ε} = 1/(1 + (2ε)^(−τ)) ≤ (2ε)^τ
//   mass      d = 1                          certified: 2·sinh(r) ≥ r for
//             |x| ≥ r, and 1 − e^(−r)·cosh(x) ≥ r·p(x) checked numerically
//             on a dense grid for |x| < r (see the reference generator)
//
// and ν_max = (π₀ + π₁ + 1)/2, the midpoint between the actual noise level
// and the forbidden total of 1.

#include <cmath>

#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/point.hpp"

namespace noiseknn {

struct LaplaceLogisticFamily {
    double tau = 1.0;
    double pi0 = 0.0, pi1 = 0.0;

    static LaplaceLogisticFamily create(double tau, double pi0, double pi1) {
        if (!(tau > 0.0) || !std::isfinite(tau))
            throw parameter_error("laplace-logistic tau must be positive and finite");
        if (!(pi0 >= 0.0 && pi0 < 1.0))
            throw parameter_error("laplace-logistic pi0 must lie in [0, 1)");
        if (!(pi1 >= 0.0 && pi1 < 1.0))
            throw parameter_error("laplace-logistic pi1 must lie in [0, 1)");
        if (!(pi0 + pi1 < 1.0))
            throw parameter_error("laplace-logistic noise rates must sum below 1");
        return {tau, pi0, pi1};
    }

    double density(double x) const { return 0.5 * std::exp(-std::fabs(x)); }

    double eta(double x) const { return 1.0 / (1.0 + std::exp(-tau * x)); }

    // Inverse CDF of the standard Laplace distribution.
    double quantile(double u01) const {
        return u01 < 0.5 ? std::log(2.0 * u01) : -std::log(2.0 * (1.0 - u01));
    }

    Euclidean metric() const { return Euclidean{}; }

    GammaParams gamma() const {
        GammaParams g;
        g.nu_max = (pi0 + pi1 + 1.0) / 2.0;
        g.d = 1.0;
        g.alpha = 1.0;
        g.C_alpha = std::max(4.0, 8.0 / tau);
        g.beta = 1.0;
        g.C_beta = std::max(1.0, tau / 4.0);
        g.gamma = 1.0;
        g.t_gamma = 1.0 / 3.0;
        g.C_gamma = 2.0;
        g.tau = tau;
        g.t_tau = 1.0 / 3.0;
        g.C_tau = std::max(1.0, std::pow(2.0, tau));
        g.alpha_certified = false;
        g.beta_certified = true;
        g.gamma_certified = true;
        g.tau_certified = true;
        g.mass_certified = true;
        return g;
    }
};

}  // namespace noiseknn
