#pragma once

// Experiment harness: seeded trials over a sample-size grid, excess-risk
// aggregation, and a log-log rate fit against the theoretical exponent.
//
// Each (n, trial) cell derives its own seed from (base_seed, n, trial), so
// cells are pure functions of the config: trials can run on any number of
// threads in any order and the aggregated result is identical. Aggregation
// itself is a deterministic fold in (n, trial) order over a preallocated
// slot table.
//
// Per n-cell the median excess risk feeds an ordinary least squares fit of
// ln(median) on ln(n). Cells whose median is exactly zero cannot enter the
// log fit and are recorded as censored; fewer than three uncensored cells
// makes the fit unavailable (with a reason) rather than an error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "noiseknn/classifier.hpp"
#include "noiseknn/distribution.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/jsonout.hpp"
#include "noiseknn/rng.hpp"

namespace noiseknn {

enum class RiskMode { exact, monte_carlo };

struct ExperimentConfig {
    DistributionSpec spec;
    std::vector<std::size_t> n_grid;  // strictly increasing
    std::size_t trials_per_n = 1;
    double delta = 0.1;
    RiskMode risk_mode = RiskMode::exact;
    std::size_t mc_n = 0;  // draws per Monte-Carlo risk evaluation
    std::uint64_t base_seed = 0;

    void validate() const {
        if (n_grid.empty()) throw parameter_error("n_grid must not be empty");
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            if (n_grid[i] < 1) throw parameter_error("n_grid entries must be at least 1");
            if (i > 0 && n_grid[i] <= n_grid[i - 1])
                throw parameter_error("n_grid must be strictly increasing");
        }
        if (trials_per_n < 1) throw parameter_error("trials_per_n must be at least 1");
        if (!(delta > 0.0 && delta < 1.0)) throw parameter_error("delta must lie in (0, 1)");
        if (risk_mode == RiskMode::monte_carlo && mc_n < 1)
            throw parameter_error("Monte-Carlo risk mode needs mc_n >= 1");
        if (risk_mode == RiskMode::exact && !spec.is_atomic())
            throw unsupported_error("exact excess risk requires an atomic family");
    }

    std::string risk_mode_label() const {
        return risk_mode == RiskMode::exact ? "exact" : "mc:" + std::to_string(mc_n);
    }
};

struct TrialReport {
    std::size_t n = 0;
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    double pi0_hat = 0.0, pi1_hat = 0.0;
    double threshold = 0.5;
    double excess_risk = 0.0;
    double excess_risk_stderr = 0.0;  // Monte-Carlo mode only
    bool has_stderr = false;
    double wall_ms = 0.0;
};

struct RateFit {
    bool available = false;
    std::string unavailable_reason;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theoretical = 0.0;  // rate_exponent of the config's Γ
    std::string branch;
};

struct PerNSummary {
    std::size_t n = 0;
    std::size_t trials = 0;
    double median_excess = 0.0;
    bool censored = false;  // median exactly zero: excluded from the log fit
};

struct SweepResult {
    std::vector<TrialReport> reports;  // (n, trial) order
    std::vector<PerNSummary> per_n;
    RateFit fit;
    RateExponent theoretical;
};

inline TrialReport run_trial(const ExperimentConfig& cfg, std::size_t n,
                             std::size_t trial_index) {
    const auto started = std::chrono::steady_clock::now();
    TrialReport report;
    report.n = n;
    report.trial_index = trial_index;
    report.seed = derive_seed(cfg.base_seed, n, trial_index);

    Dataset sample = cfg.spec.sample_corrupted(n, report.seed);
    PluginClassifier clf = PluginClassifier::fit(std::move(sample), cfg.spec.metric(), cfg.delta);
    report.pi0_hat = clf.rates().pi0;
    report.pi1_hat = clf.rates().pi1;
    report.threshold = clf.threshold();

    auto phi = [&clf](const Point& x) { return clf.predict(x); };
    if (cfg.risk_mode == RiskMode::exact) {
        report.excess_risk = excess_risk_exact(cfg.spec, phi);
    } else {
        MonteCarloRisk mc = excess_risk_mc(cfg.spec, phi, cfg.mc_n, report.seed);
        report.excess_risk = mc.value;
        report.excess_risk_stderr = mc.stderr_value;
        report.has_stderr = true;
    }

    const auto finished = std::chrono::steady_clock::now();
    report.wall_ms = std::chrono::duration<double, std::milli>(finished - started).count();
    return report;
}

namespace detail {

inline double median_of_sorted(const std::vector<double>& v) {
    const std::size_t k = v.size();
    return k % 2 == 1 ? v[k / 2] : (v[k / 2 - 1] + v[k / 2]) / 2.0;
}

// OLS of y on x with r² = 1 − SSres/SStot (r² = 1 for a perfect fit of a
// constant series, 0 for any other constant-series outcome).
inline void ols_fit(const std::vector<double>& x, const std::vector<double>& y, RateFit& fit) {
    const std::size_t k = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double pred = fit.intercept + fit.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    fit.r_squared = ss_tot == 0.0 ? (ss_res == 0.0 ? 1.0 : 0.0) : 1.0 - ss_res / ss_tot;
}

}  // namespace detail

// Aggregates a completed slot table into medians and the rate fit. Split out
// from run_sweep so tests can feed synthetic reports directly.
inline SweepResult aggregate_reports(const ExperimentConfig& cfg,
                                     std::vector<TrialReport> reports) {
    SweepResult result;
    result.reports = std::move(reports);
    result.theoretical = rate_exponent(cfg.spec.gamma());

    const std::size_t trials = cfg.trials_per_n;
    std::vector<double> log_n, log_med;
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        std::vector<double> cell;
        cell.reserve(trials);
        for (std::size_t t = 0; t < trials; ++t)
            cell.push_back(result.reports[gi * trials + t].excess_risk);
        std::sort(cell.begin(), cell.end());
        PerNSummary s;
        s.n = cfg.n_grid[gi];
        s.trials = trials;
        s.median_excess = detail::median_of_sorted(cell);
        s.censored = s.median_excess == 0.0;
        result.per_n.push_back(s);
        if (!s.censored) {
            log_n.push_back(std::log(static_cast<double>(s.n)));
            log_med.push_back(std::log(s.median_excess));
        }
    }

    result.fit.theoretical = result.theoretical.exponent;
    result.fit.branch = result.theoretical.branch;
    if (log_n.size() < 3) {
        result.fit.available = false;
        result.fit.unavailable_reason =
            "fewer than 3 uncensored n-cells (" + std::to_string(log_n.size()) + ")";
    } else {
        result.fit.available = true;
        detail::ols_fit(log_n, log_med, result.fit);
    }
    return result;
}

// Runs every (n, trial) cell, on `jobs` threads when jobs > 1 (0 means the
// hardware's parallelism). Slot claiming is a single atomic counter; each
// slot is written exactly once, so the aggregated output does not depend on
// scheduling.
inline SweepResult run_sweep(const ExperimentConfig& cfg, std::size_t jobs = 0) {
    cfg.validate();
    const std::size_t cells = cfg.n_grid.size() * cfg.trials_per_n;
    std::vector<TrialReport> slots(cells);

    if (jobs == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        jobs = hw == 0 ? 1 : hw;
    }
    jobs = std::min(jobs, cells);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t gi = cell / cfg.trials_per_n;
        const std::size_t trial = cell % cfg.trials_per_n;
        slots[cell] = run_trial(cfg, cfg.n_grid[gi], trial);
    };

    if (jobs <= 1) {
        for (std::size_t cell = 0; cell < cells; ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;
        auto worker = [&]() {
            try {
                while (true) {
                    const std::size_t cell = next.fetch_add(1);
                    if (cell >= cells) return;
                    run_cell(cell);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    return aggregate_reports(cfg, std::move(slots));
}

// Byte-stable JSON summary (wall times deliberately excluded).
inline std::string summary_json(const SweepResult& result, const ExperimentConfig& cfg) {
    JsonWriter w;
    w.begin_object();
    w.field("cells", static_cast<std::uint64_t>(result.reports.size()));
    w.key("per_n");
    w.begin_array();
    for (const auto& s : result.per_n) {
        w.begin_object();
        w.field("n", static_cast<std::uint64_t>(s.n));
        w.field("trials", static_cast<std::uint64_t>(s.trials));
        w.field("median_excess", s.median_excess);
        w.field("censored", s.censored);
        w.end_object();
    }
    w.end_array();
    w.key("fit");
    w.begin_object();
    w.field("available", result.fit.available);
    if (result.fit.available) {
        w.field("slope", result.fit.slope);
        w.field("intercept", result.fit.intercept);
        w.field("r_squared", result.fit.r_squared);
    } else {
        w.field("reason", result.fit.unavailable_reason);
    }
    w.field("theoretical", result.fit.theoretical);
    w.field("branch", result.fit.branch);
    w.end_object();
    w.key("theoretical");
    w.begin_object();
    w.field("exponent", result.theoretical.exponent);
    w.field("classification_branch", result.theoretical.classification_branch);
    w.field("noise_branch", result.theoretical.noise_branch);
    w.field("branch", result.theoretical.branch);
    w.field("outside_theorem_range", result.theoretical.outside_theorem_range);
    w.end_object();
    w.key("config");
    w.begin_object();
    w.field("family", cfg.spec.name());
    w.key("n_grid");
    w.begin_array();
    for (std::size_t n : cfg.n_grid) w.value(static_cast<std::uint64_t>(n));
    w.end_array();
    w.field("trials_per_n", static_cast<std::uint64_t>(cfg.trials_per_n));
    w.field("delta", cfg.delta);
    w.field("risk_mode", cfg.risk_mode_label());
    w.field("base_seed", cfg.base_seed);
    w.end_object();
    w.end_object();
    return w.str();
}

// One CSV row per trial. Doubles use shortest round-trip formatting; the
// stderr column is left empty when the risk mode has none.
inline std::string report_csv(const std::vector<TrialReport>& reports) {
    std::string out = "n,trial,seed,pi0_hat,pi1_hat,threshold,excess_risk,stderr,wall_ms\n";
    for (const auto& r : reports) {
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.trial_index);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += json_number(r.pi0_hat);
        out += ',';
        out += json_number(r.pi1_hat);
        out += ',';
        out += json_number(r.threshold);
        out += ',';
        out += json_number(r.excess_risk);
        out += ',';
        if (r.has_stderr) out += json_number(r.excess_risk_stderr);
        out += ',';
        out += json_number(r.wall_ms);
        out += '\n';
    }
    return out;
}

// Writes report.csv and summary.json under out_dir (which must exist).
inline void emit_report(const SweepResult& result, const ExperimentConfig& cfg,
                        const std::string& out_dir) {
    const std::string csv_path = out_dir + "/report.csv";
    const std::string json_path = out_dir + "/summary.json";
    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw io_error(csv_path, 0, "cannot open for writing");
        csv << report_csv(result.reports);
        if (!csv) throw io_error(csv_path, 0, "write failed");
    }
    {
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw io_error(json_path, 0, "cannot open for writing");
        js << summary_json(result, cfg) << '\n';
        if (!js) throw io_error(json_path, 0, "write failed");
    }
}

}  // namespace noiseknn
