// noiseknn command-line tool.
//
// Thin plumbing over the library: every subcommand loads files, calls one or
// two library operations, and prints exactly one JSON document on stdout
// (or, with --out, writes it to a file and prints a one-line status doc).
// Diagnostics go to stderr. Exit codes: 0 success, 2 usage error, 1 runtime
// error (bad files, bad parameters, estimation failures).
//
//   gen SPEC --n N [--seed S] --out FILE     materialize a corrupted sample
//   regress DATA QUERIES --delta D [...]     adaptive k-NN regression
//   supest DATA --delta D [...]              extremum estimates of the response
//   noise-est DATA --delta D [...]           flip-rate recovery
//   classify DATA QUERIES --delta D [...]    plug-in classification
//   sweep CONFIG --out DIR [--jobs J]        rate-verification experiment
//   exponent [--alpha ...]                   theoretical rate exponent
//
// Seeds resolve as: --seed flag, else the NOISEKNN_SEED environment
// variable, else 0.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noiseknn/classifier.hpp"
#include "noiseknn/dataset.hpp"
#include "noiseknn/distribution.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/harness.hpp"
#include "noiseknn/io.hpp"
#include "noiseknn/jsonout.hpp"
#include "noiseknn/lepski.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/supremum.hpp"

namespace {

using namespace noiseknn;

// ---------- flag validation ----------

const CLI::Validator kDeltaRange(
    [](std::string& s) -> std::string {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) return "delta must be a number";
            if (!(v > 0.0 && v < 1.0)) return "delta must lie in (0, 1)";
        } catch (...) {
            return "delta must be a number";
        }
        return {};
    },
    "DELTA");

const CLI::Validator kTauValue(
    [](std::string& s) -> std::string {
        if (s == "inf") return {};
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) return "tau must be a number or \"inf\"";
            if (!(v > 0.0)) return "tau must be positive";
        } catch (...) {
            return "tau must be a number or \"inf\"";
        }
        return {};
    },
    "TAU");

std::uint64_t parse_seed_text(const std::string& text, const char* what) {
    if (text.empty())
        throw parameter_error(std::string(what) + " must be a decimal integer");
    std::uint64_t v = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            throw parameter_error(std::string(what) + " must be a decimal integer, got \"" +
                                  text + "\"");
        if (v > (std::numeric_limits<std::uint64_t>::max() - 9) / 10)
            throw parameter_error(std::string(what) + " does not fit in 64 bits");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("NOISEKNN_SEED"))
        return parse_seed_text(env, "NOISEKNN_SEED");
    return 0;
}

// ---------- shared plumbing ----------

void require_input_file(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw io_error(path, 0, "no such file");
}

// Metric for a loaded dataset: an explicit family spec wins; otherwise the
// point kind decides (vectors → Euclidean, bit strings → the ultrametric
// with --metric-d, symbols have no default and need --spec).
Metric metric_for(const Dataset& data, const std::string& spec_path, double metric_d) {
    if (!spec_path.empty()) return load_spec_file(spec_path).metric();
    switch (data.point_kind()) {
        case PointKind::real_vector:
            return Euclidean{};
        case PointKind::bit_string:
            return HypercubeUltrametric{metric_d};
        case PointKind::symbol:
            break;
    }
    throw parameter_error(
        "symbol datasets carry no default metric; pass --spec to supply the distance table");
}

// Prints `doc` on stdout, or writes it to `out` and prints a status line.
void deliver(const std::string& doc, const std::string& out) {
    if (out.empty()) {
        std::cout << doc << '\n';
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw io_error(out, 0, "cannot open for writing");
    f << doc << '\n';
    if (!f) throw io_error(out, 0, "write failed");
    JsonWriter w;
    w.begin_object();
    w.field("out", out);
    w.end_object();
    std::cout << w.str() << '\n';
}

// ---------- subcommands ----------

void run_gen(const std::string& spec_path, std::size_t n, std::uint64_t seed,
             const std::string& out) {
    require_input_file(spec_path);
    const DistributionSpec spec = load_spec_file(spec_path);
    const Dataset data = spec.sample_corrupted(n, seed);
    save_jsonl(out, data);
    JsonWriter w;
    w.begin_object();
    w.field("family", spec.name());
    w.field("n", static_cast<std::uint64_t>(n));
    w.field("seed", seed);
    w.field("pi0", spec.pi0());
    w.field("pi1", spec.pi1());
    w.field("out", out);
    w.end_object();
    std::cout << w.str() << '\n';
}

void run_regress(const std::string& data_path, const std::string& queries_path, double delta,
                 const std::string& spec_path, double metric_d, const std::string& out) {
    require_input_file(data_path);
    require_input_file(queries_path);
    if (!spec_path.empty()) require_input_file(spec_path);
    const Dataset data = load_jsonl(data_path);
    const std::vector<Point> queries = load_query_points(queries_path);
    const Metric m = metric_for(data, spec_path, metric_d);

    JsonWriter w;
    w.begin_object();
    w.field("n", static_cast<std::uint64_t>(data.size()));
    w.field("delta", delta);
    w.key("estimates");
    w.begin_array();
    for (const Point& x : queries) {
        const LepskiEstimate e = lepski_estimate_at(data, m, x, delta);
        w.begin_object();
        w.field("value", e.value);
        w.field("k_selected", static_cast<std::uint64_t>(e.k_selected));
        w.field("intervals_checked", static_cast<std::uint64_t>(e.intervals_checked));
        w.field("fallback_used", e.fallback_used);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    deliver(w.str(), out);
}

void run_supest(const std::string& data_path, double delta, const std::string& spec_path,
                double metric_d) {
    require_input_file(data_path);
    if (!spec_path.empty()) require_input_file(spec_path);
    const Dataset data = load_jsonl(data_path);
    const Metric m = metric_for(data, spec_path, metric_d);
    const SupEstimate sup = sup_estimate(data, m, delta);
    const SupEstimate inf = inf_estimate(data, m, delta);

    JsonWriter w;
    w.begin_object();
    w.field("n", static_cast<std::uint64_t>(data.size()));
    w.field("delta", delta);
    w.key("sup");
    w.begin_object();
    w.field("value", sup.value);
    w.field("argmax_index", static_cast<std::uint64_t>(sup.argmax_index));
    w.field("k_at_max", static_cast<std::uint64_t>(sup.k_at_max));
    w.end_object();
    w.key("inf");
    w.begin_object();
    w.field("value", 1.0 - inf.value);  // inf_estimate reports the complement's sup
    w.field("argmax_index", static_cast<std::uint64_t>(inf.argmax_index));
    w.field("k_at_max", static_cast<std::uint64_t>(inf.k_at_max));
    w.end_object();
    w.end_object();
    std::cout << w.str() << '\n';
}

void run_noise_est(const std::string& data_path, double delta, const std::string& spec_path,
                   double metric_d) {
    require_input_file(data_path);
    if (!spec_path.empty()) require_input_file(spec_path);
    const Dataset data = load_jsonl(data_path);
    const Metric m = metric_for(data, spec_path, metric_d);
    const NoiseRates rates = estimate_noise_rates(data, m, delta);

    JsonWriter w;
    w.begin_object();
    w.field("n", static_cast<std::uint64_t>(data.size()));
    w.field("delta", delta);
    w.field("pi0_hat", rates.pi0);
    w.field("pi1_hat", rates.pi1);
    w.field("clipped", rates.clipped);
    w.field("sum_ok", rates.sum_ok);
    w.end_object();
    std::cout << w.str() << '\n';
}

void run_classify(const std::string& data_path, const std::string& queries_path, double delta,
                  const std::string& spec_path, double metric_d, const std::string& out) {
    require_input_file(data_path);
    require_input_file(queries_path);
    if (!spec_path.empty()) require_input_file(spec_path);
    Dataset data = load_jsonl(data_path);
    const std::vector<Point> queries = load_query_points(queries_path);
    Metric m = metric_for(data, spec_path, metric_d);
    const PluginClassifier clf = PluginClassifier::fit(std::move(data), std::move(m), delta);

    JsonWriter w;
    w.begin_object();
    w.field("n", static_cast<std::uint64_t>(clf.sample().size()));
    w.field("delta", delta);
    w.field("pi0_hat", clf.rates().pi0);
    w.field("pi1_hat", clf.rates().pi1);
    w.field("threshold", clf.threshold());
    w.field("sum_ok", clf.rates().sum_ok);
    w.key("labels");
    w.begin_array();
    for (const Point& x : queries) {
        const LepskiEstimate e = clf.regression(x);
        w.begin_object();
        w.field("label", clf.predict(x));
        w.field("eta_tilde_hat", e.value);
        w.key("eta_hat");
        if (clf.rates().sum_ok)
            w.value(clf.corrected_regression(x).value);
        else
            w.null_value();
        w.field("k_selected", static_cast<std::uint64_t>(e.k_selected));
        w.field("fallback_used", e.fallback_used);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    deliver(w.str(), out);
}

void run_sweep(const std::string& config_path, const std::string& out_dir, std::size_t jobs,
               const std::string& risk_mode_override) {
    require_input_file(config_path);
    ExperimentConfig cfg = load_sweep_config(config_path);
    if (!risk_mode_override.empty()) {
        const auto [mode, mc_n] = parse_risk_mode(risk_mode_override);
        cfg.risk_mode = mode;
        cfg.mc_n = mc_n;
        cfg.validate();
    }
    std::filesystem::create_directories(out_dir);
    const SweepResult result = noiseknn::run_sweep(cfg, jobs);
    emit_report(result, cfg, out_dir);
    std::cout << summary_json(result, cfg) << '\n';
}

void run_exponent(const GammaParams& g) {
    const RateExponent e = rate_exponent(g);
    if (e.outside_theorem_range)
        std::cerr << "noiseknn: warning: gamma <= beta/(2*beta + d); the convergence "
                     "guarantee does not cover this regime\n";
    JsonWriter w;
    w.begin_object();
    w.field("exponent", e.exponent);
    w.field("branch", e.branch);
    w.end_object();
    std::cout << w.str() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Adaptive nearest-neighbour classification under unknown class-conditional "
        "label noise"};
    app.require_subcommand(1);

    // gen
    std::string gen_spec, gen_out;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "Materialize a corrupted sample from a family spec");
    gen->add_option("spec", gen_spec, "family spec JSON file")->required();
    gen->add_option("--n", gen_n, "sample size")->required()->check(CLI::PositiveNumber);
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "base seed (default: NOISEKNN_SEED or 0)");
    gen->add_option("--out", gen_out, "output JSONL path")->required();

    // shared pieces for the data-consuming commands
    std::string d_data, d_queries, d_spec, d_out;
    double d_delta = 0.0, d_metric_d = 1.0;
    auto add_metric_flags = [&](CLI::App* cmd) {
        cmd->add_option("--spec", d_spec, "family spec supplying the metric");
        cmd->add_option("--metric-d", d_metric_d,
                        "ultrametric dimension for bit-string data (default 1)")
            ->check(CLI::PositiveNumber);
    };
    auto add_delta_flag = [&](CLI::App* cmd) {
        cmd->add_option("--delta", d_delta, "confidence budget in (0,1)")
            ->required()
            ->check(kDeltaRange);
    };

    auto* regress = app.add_subcommand("regress", "Adaptive k-NN regression at query points");
    regress->add_option("data", d_data, "training JSONL file")->required();
    regress->add_option("queries", d_queries, "query-point JSONL file")->required();
    add_delta_flag(regress);
    add_metric_flags(regress);
    regress->add_option("--out", d_out, "write the result document here instead of stdout");

    auto* supest = app.add_subcommand("supest", "Extremum estimates of the regression function");
    supest->add_option("data", d_data, "training JSONL file")->required();
    add_delta_flag(supest);
    add_metric_flags(supest);

    auto* noise_est = app.add_subcommand("noise-est", "Recover label-flip rates");
    noise_est->add_option("data", d_data, "training JSONL file (binary labels)")->required();
    add_delta_flag(noise_est);
    add_metric_flags(noise_est);

    auto* classify = app.add_subcommand("classify", "Plug-in classification at query points");
    classify->add_option("data", d_data, "training JSONL file (binary labels)")->required();
    classify->add_option("queries", d_queries, "query-point JSONL file")->required();
    add_delta_flag(classify);
    add_metric_flags(classify);
    classify->add_option("--out", d_out, "write the result document here instead of stdout");

    // sweep
    std::string sweep_config, sweep_out, sweep_risk_mode;
    std::size_t sweep_jobs = 0;
    auto* sweep = app.add_subcommand("sweep", "Run a rate-verification experiment");
    sweep->add_option("config", sweep_config, "sweep config JSON file")->required();
    sweep->add_option("--out", sweep_out, "output directory for report.csv and summary.json")
        ->required();
    sweep->add_option("--jobs", sweep_jobs, "trial parallelism (0 = machine default)");
    sweep->add_option("--risk-mode", sweep_risk_mode,
                      "override the config's risk mode: exact or mc:<count>");

    // exponent
    GammaParams exp_g;  // defaults α=β=d=γ=τ=1
    std::string exp_tau = "1";
    auto* exponent = app.add_subcommand("exponent", "Theoretical convergence-rate exponent");
    exponent->add_option("--alpha", exp_g.alpha, "margin exponent")->check(CLI::NonNegativeNumber);
    exponent->add_option("--beta", exp_g.beta, "smoothness exponent");
    exponent->add_option("--d", exp_g.d, "metric dimension")->check(CLI::PositiveNumber);
    exponent->add_option("--gamma", exp_g.gamma, "density-tail exponent")
        ->check(CLI::PositiveNumber);
    exponent->add_option("--tau", exp_tau, "range exponent (number or \"inf\")")
        ->check(kTauValue);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) {
            run_gen(gen_spec, gen_n, resolve_seed(gen_seed_opt->count() > 0, gen_seed),
                    gen_out);
        } else if (*regress) {
            run_regress(d_data, d_queries, d_delta, d_spec, d_metric_d, d_out);
        } else if (*supest) {
            run_supest(d_data, d_delta, d_spec, d_metric_d);
        } else if (*noise_est) {
            run_noise_est(d_data, d_delta, d_spec, d_metric_d);
        } else if (*classify) {
            run_classify(d_data, d_queries, d_delta, d_spec, d_metric_d, d_out);
        } else if (*sweep) {
            run_sweep(sweep_config, sweep_out, sweep_jobs, sweep_risk_mode);
        } else if (*exponent) {
            exp_g.tau = exp_tau == "inf" ? std::numeric_limits<double>::infinity()
                                         : std::stod(exp_tau);
            run_exponent(exp_g);
        }
        return 0;
    } catch (const noiseknn::error& e) {
        std::cerr << "noiseknn: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "noiseknn: " << e.what() << '\n';
        return 1;
    }
}
