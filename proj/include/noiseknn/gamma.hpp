#pragma once

// The assumption-parameter bundle Γ and the minimax rate exponent.
//
// Γ collects: the noise budget ν_max; the metric dimension d of the
// minimal-mass bound; margin (α, C_α); Hölder smoothness (β, C_β); density
// tail (γ, t_γ, C_γ); and quantitative range (τ, t_τ, C_τ). Families carry
// per-group flags saying whether the values are analytically certified or
// merely nominal.
//
// The classification rate in n is n^(−e) with
//
//   e = min{ γβ(α+1)/(γ(2β+d)+αβ),  τβ(α+1)/(τ(2β+d)+β) }
//
// where the second (noise-limited) branch is active iff τα < γ; equality
// is a tie. τ = +inf is accepted and uses the limit β(α+1)/(2β+d) for the
// second branch.

#include <cmath>
#include <string>
#include <vector>

#include "noiseknn/error.hpp"

namespace noiseknn {

struct GammaParams {
    double nu_max = 0.5;
    double d = 1.0;
    double alpha = 1.0, C_alpha = 1.0;
    double beta = 1.0, C_beta = 1.0;
    double gamma = 1.0, t_gamma = 1.0 / 3.0, C_gamma = 1.0;
    double tau = 1.0, t_tau = 1.0 / 3.0, C_tau = 1.0;

    // Whether each group is backed by a per-family argument rather than
    // just assumed for reporting.
    bool alpha_certified = false;
    bool beta_certified = false;
    bool gamma_certified = false;
    bool tau_certified = false;
    bool mass_certified = false;  // minimal-mass group (d together with ω_μ)

    void validate() const {
        auto fail = [](const std::string& what) { throw parameter_error(what); };
        if (!(nu_max > 0.0 && nu_max < 1.0)) fail("nu_max must lie in (0, 1)");
        if (!(d > 0.0)) fail("d must be positive");
        if (!(alpha >= 0.0)) fail("alpha must be nonnegative");
        if (!(C_alpha >= 1.0)) fail("C_alpha must be at least 1");
        if (!(beta > 0.0 && beta <= 1.0)) fail("beta must lie in (0, 1]");
        if (!(C_beta >= 1.0)) fail("C_beta must be at least 1");
        if (!(gamma > 0.0)) fail("gamma must be positive");
        if (!(t_gamma > 0.0 && t_gamma < 1.0)) fail("t_gamma must lie in (0, 1)");
        if (!(C_gamma >= 1.0)) fail("C_gamma must be at least 1");
        if (!(tau > 0.0)) fail("tau must be positive");  // +inf allowed
        if (!(t_tau > 0.0 && t_tau < 1.0)) fail("t_tau must lie in (0, 1)");
        if (!(C_tau >= 1.0)) fail("C_tau must be at least 1");
    }
};

// Result of checking a family's parameters against the finite list of
// sufficient conditions under which it satisfies the assumptions encoded by
// a GammaParams bundle. Each item is one inequality, spelled out, with its
// verdict; a family is admissible for Γ iff every item passes.
struct AuditItem {
    std::string check;
    bool pass = false;
};

struct AssumptionAudit {
    std::vector<AuditItem> items;

    void add(std::string check, bool pass) { items.push_back({std::move(check), pass}); }

    bool all_pass() const {
        for (const auto& item : items)
            if (!item.pass) return false;
        return true;
    }
};

// Floating-point form of the audit inequalities "lhs <= rhs". The derived
// schedules satisfy several of them with equality in exact arithmetic (e.g.
// u = w·r^d for the four-point schedule), so a bare <= would turn rounding
// noise from the power chains into verdicts. A 1e-12 relative window — the
// same convention the mass-normalization item uses — absorbs that while
// staying far below any real violation. rhs = 0 still fails for positive
// lhs, which is what keeps pow(w, +inf) = 0 rejecting the τ = +inf case.
inline bool audit_leq(double lhs, double rhs) { return lhs <= rhs * (1.0 + 1e-12); }

struct RateExponent {
    double exponent = 0.0;
    double classification_branch = 0.0;  // γβ(α+1)/(γ(2β+d)+αβ)
    double noise_branch = 0.0;           // τβ(α+1)/(τ(2β+d)+β)
    std::string branch;                  // "noise-limited" | "classification-limited" | "tie"
    bool outside_theorem_range = false;  // γ ≤ β/(2β+d): upper bound inapplicable; warn only
};

inline RateExponent rate_exponent(const GammaParams& g) {
    g.validate();
    RateExponent out;
    const double a = g.alpha, b = g.beta, d = g.d, gm = g.gamma, t = g.tau;
    out.classification_branch = gm * b * (a + 1.0) / (gm * (2.0 * b + d) + a * b);
    out.noise_branch = std::isinf(t)
                           ? b * (a + 1.0) / (2.0 * b + d)
                           : t * b * (a + 1.0) / (t * (2.0 * b + d) + b);
    // NaN (τ=+inf with α=0, where the branches coincide) falls through to
    // "tie" because both comparisons are false.
    const double ta = t * a;
    if (ta < gm)
        out.branch = "noise-limited";
    else if (ta > gm)
        out.branch = "classification-limited";
    else
        out.branch = "tie";
    out.exponent = std::min(out.classification_branch, out.noise_branch);
    out.outside_theorem_range = !(gm > b / (2.0 * b + d));
    return out;
}

}  // namespace noiseknn
