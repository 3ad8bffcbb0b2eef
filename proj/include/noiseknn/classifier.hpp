#pragma once

// Plug-in classifier for class-conditional label noise.
//
// Fitting splits the confidence budget δ three ways: the two extremum
// estimates behind the noise rates run at δ/3 each, and every later query
// runs its regression at δ²/3. Prediction is
//
//   φ̂(x) = 1{ η̃̂(x) ≥ ½·(1 + π̂₀ − π̂₁) }        (ties classify as 1)
//
// and the corrected regression estimate is η̂ = (η̃̂ − π̂₀)/(1 − π̂₀ − π̂₁).
//
// η̂ is evaluated as 0.5 + (η̃̂ − threshold)/span — algebraically the same
// ratio, but centred on the decision boundary so that η̂ ≥ ½ holds exactly
// when η̃̂ ≥ threshold does (the subtraction near the threshold is exact by
// Sterbenz's lemma and the quotient cannot round across ½; the naive form
// can flip the comparison one ulp from the boundary).

#include <algorithm>
#include <optional>
#include <utility>

#include "noiseknn/dataset.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/lepski.hpp"
#include "noiseknn/neighbor.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/supremum.hpp"

namespace noiseknn {

struct CorrectedRegression {
    double value = 0.0;      // clamped to [0,1] for reporting
    double unclamped = 0.0;  // raw ratio, used by the threshold-equivalence check
};

// (η̃̂ − π̂₀)/(1 − π̂₀ − π̂₁), evaluated about the decision boundary (see the
// header comment). Requires π̂₀ + π̂₁ < 1.
inline double ratio_corrected(double eta_tilde_hat, double pi0_hat, double pi1_hat) {
    const double span = 1.0 - pi0_hat - pi1_hat;
    const double threshold = 0.5 * (1.0 + pi0_hat - pi1_hat);
    return 0.5 + (eta_tilde_hat - threshold) / span;
}

class PluginClassifier {
  public:
    static PluginClassifier fit(Dataset sample, Metric m, double delta) {
        check_delta(delta);
        require_binary(sample, "classifier fitting");
        PluginClassifier c;
        c.sample_ = std::move(sample);
        c.metric_ = std::move(m);
        c.delta_ = delta;
        c.rates_ = estimate_noise_rates(c.sample_, c.metric_, delta / 3.0);
        c.span_ = 1.0 - c.rates_.pi0 - c.rates_.pi1;
        c.threshold_ = 0.5 * (1.0 + c.rates_.pi0 - c.rates_.pi1);
        c.plan_ = LepskiPlan::build(c.sample_.size(), delta * delta / 3.0);
        if (c.sample_.point_kind() == PointKind::real_vector && c.sample_.dimension() == 1)
            c.line_ = SortedLine::build(c.sample_);
        return c;
    }

    // Adaptive estimate of the corrupted regression function at x,
    // at confidence δ²/3.
    LepskiEstimate regression(const Point& x) const {
        if (line_) {
            const auto* v = std::get_if<RealVector>(&x);
            if (!v || v->size() != 1)
                throw kind_mismatch_error("query point does not match the 1-D training sample");
            LineSweep sweep(*line_, (*v)[0]);
            return lepski_from_sweep(plan_, sample_.responses(), sweep);
        }
        HeapSweep sweep(sample_, metric_, x);
        return lepski_from_sweep(plan_, sample_.responses(), sweep);
    }

    int predict(const Point& x) const {
        return regression(x).value >= threshold_ ? 1 : 0;
    }

    CorrectedRegression corrected_regression(const Point& x) const {
        if (!rates_.sum_ok)
            throw data_error("noise-rate estimates sum to >= 1; corrected regression undefined");
        const double v = regression(x).value;
        CorrectedRegression out;
        out.unclamped = ratio_corrected(v, rates_.pi0, rates_.pi1);
        out.value = std::clamp(out.unclamped, 0.0, 1.0);
        return out;
    }

    const Dataset& sample() const { return sample_; }
    const Metric& metric() const { return metric_; }
    const NoiseRates& rates() const { return rates_; }
    double threshold() const { return threshold_; }
    double delta() const { return delta_; }

  private:
    PluginClassifier() = default;

    Dataset sample_;
    Metric metric_;
    double delta_ = 0.0;
    NoiseRates rates_;
    double span_ = 1.0;       // 1 − π̂₀ − π̂₁
    double threshold_ = 0.5;
    LepskiPlan plan_;
    std::optional<SortedLine> line_;
};

}  // namespace noiseknn
