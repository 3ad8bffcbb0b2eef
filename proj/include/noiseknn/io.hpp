#pragma once

// File formats.
//
// Datasets and query points travel as JSON Lines: one record per line,
// blank lines skipped. A point is encoded as
//   - a JSON array of numbers   -> real vector,
//   - a JSON string over {0,1}  -> bit string,
//   - a JSON integer            -> symbol id,
// and a dataset record pairs "x" with exactly one response key: "y" (an
// integer 0/1 label) or "z" (a number in [0,1]). All records in one file
// must agree on point kind, vector dimension, and response key; the first
// line that breaks a rule is reported by its 1-based number. Query files
// carry "x" per record and may keep a response key (ignored), so a dataset
// file doubles as a query file.
//
// Family specs and sweep configs are single JSON documents (schemas in the
// README). Every loader failure is an io_error carrying the path; malformed
// JSON also carries the line of the first offending byte.

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "noiseknn/dataset.hpp"
#include "noiseknn/distribution.hpp"
#include "noiseknn/error.hpp"
#include "noiseknn/fourpoint.hpp"
#include "noiseknn/gamma.hpp"
#include "noiseknn/harness.hpp"
#include "noiseknn/hypercube.hpp"
#include "noiseknn/jsonout.hpp"
#include "noiseknn/laplace.hpp"
#include "noiseknn/point.hpp"
#include "noiseknn/usertable.hpp"

namespace noiseknn {

namespace detail {

using njson = nlohmann::json;

inline bool is_blank(const std::string& line) {
    for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    return true;
}

inline long line_of_byte(const std::string& content, std::size_t byte) {
    long line = 1;
    const std::size_t stop = std::min(byte, content.size());
    for (std::size_t i = 0; i < stop; ++i)
        if (content[i] == '\n') ++line;
    return line;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, 0, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw io_error(path, 0, "read failed");
    return std::move(buf).str();
}

inline njson parse_document(const std::string& path, const std::string& content) {
    try {
        return njson::parse(content);
    } catch (const njson::parse_error& e) {
        throw io_error(path, line_of_byte(content, e.byte > 0 ? e.byte - 1 : 0),
                       std::string("invalid JSON: ") + e.what());
    }
}

// ---------- point records ----------

inline Point parse_point(const njson& jx, const std::string& path, long line) {
    if (jx.is_array()) {
        RealVector v;
        v.reserve(jx.size());
        for (const auto& e : jx) {
            if (!e.is_number())
                throw io_error(path, line, "vector point entries must be numbers");
            v.push_back(e.get<double>());
        }
        if (v.empty()) throw io_error(path, line, "vector point must be nonempty");
        for (double c : v)
            if (!std::isfinite(c))
                throw io_error(path, line, "vector point entries must be finite");
        return Point{std::move(v)};
    }
    if (jx.is_string()) {
        const auto s = jx.get<std::string>();
        if (s.empty()) throw io_error(path, line, "bit-string point must be nonempty");
        for (char c : s)
            if (c != '0' && c != '1')
                throw io_error(path, line, "bit-string point may only contain '0' and '1'");
        return Point{BitString{s}};
    }
    if (jx.is_number_integer() || jx.is_number_unsigned()) {
        if (jx.is_number_integer() && jx.get<std::int64_t>() < 0)
            throw io_error(path, line, "symbol point must be a nonnegative integer");
        const auto id = jx.get<std::uint64_t>();
        if (id > std::numeric_limits<std::uint32_t>::max())
            throw io_error(path, line, "symbol point id exceeds 2^32-1");
        return Point{Symbol{static_cast<std::uint32_t>(id)}};
    }
    if (jx.is_number())
        throw io_error(path, line, "symbol points must be JSON integers, not fractions");
    throw io_error(path, line,
                   "point must be an array (vector), a 0/1 string (bit string), or an "
                   "integer (symbol)");
}

inline void write_point(JsonWriter& w, const Point& x) {
    if (const auto* v = std::get_if<RealVector>(&x)) {
        w.begin_array();
        for (double c : *v) w.value(c);
        w.end_array();
    } else if (const auto* s = std::get_if<Symbol>(&x)) {
        w.value(static_cast<std::uint64_t>(s->id));
    } else {
        w.value(std::get<BitString>(x).bits);
    }
}

inline void check_uniform(const Point& x, const Point& first, const std::string& path,
                          long line) {
    if (kind(x) != kind(first)) throw io_error(path, line, "record mixes point kinds");
    if (kind(x) == PointKind::real_vector &&
        std::get<RealVector>(x).size() != std::get<RealVector>(first).size())
        throw io_error(path, line, "record mixes vector dimensions");
}

// ---------- strict-keyed objects ----------

inline void require_keys(const njson& j, std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional, const char* what) {
    if (!j.is_object()) throw parameter_error(std::string(what) + " must be a JSON object");
    for (const char* k : required)
        if (!j.contains(k))
            throw parameter_error(std::string(what) + " is missing key \"" + k + "\"");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : required)
            if (item.key() == k) known = true;
        for (const char* k : optional)
            if (item.key() == k) known = true;
        if (!known)
            throw parameter_error(std::string(what) + " has unknown key \"" + item.key() +
                                  "\"");
    }
}

inline double get_number(const njson& j, const char* key, const char* what) {
    const auto& v = j.at(key);
    if (!v.is_number())
        throw parameter_error(std::string(what) + " key \"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::uint64_t get_u64(const njson& j, const char* key, const char* what) {
    const auto& v = j.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw parameter_error(std::string(what) + " key \"" + key +
                          "\" must be a nonnegative integer");
}

}  // namespace detail

// ---------- JSONL datasets ----------

inline void save_jsonl(const std::string& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path, 0, "cannot open for writing");
    const bool binary = data.binary_responses();
    for (std::size_t i = 0; i < data.size(); ++i) {
        JsonWriter w;
        w.begin_object();
        w.key("x");
        detail::write_point(w, data.point(i));
        if (binary)
            w.field("y", static_cast<int>(data.response(i)));
        else
            w.field("z", data.response(i));
        w.end_object();
        out << w.str() << '\n';
    }
    if (!out) throw io_error(path, 0, "write failed");
}

inline Dataset load_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, 0, "cannot open for reading");

    std::vector<Point> points;
    std::vector<double> responses;
    int response_mode = 0;  // 0 unseen, 'y' or 'z' afterwards
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        detail::njson rec;
        try {
            rec = detail::njson::parse(line);
        } catch (const detail::njson::parse_error& e) {
            throw io_error(path, lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) throw io_error(path, lineno, "record must be a JSON object");
        if (!rec.contains("x")) throw io_error(path, lineno, "record is missing key \"x\"");
        const bool has_y = rec.contains("y");
        const bool has_z = rec.contains("z");
        if (has_y == has_z)
            throw io_error(path, lineno,
                           "record needs exactly one response key, \"y\" or \"z\"");
        for (const auto& item : rec.items())
            if (item.key() != "x" && item.key() != "y" && item.key() != "z")
                throw io_error(path, lineno,
                               "record has unknown key \"" + item.key() + "\"");
        const int mode = has_y ? 'y' : 'z';
        if (response_mode == 0)
            response_mode = mode;
        else if (mode != response_mode)
            throw io_error(path, lineno, "record mixes \"y\" and \"z\" response keys");

        Point x = detail::parse_point(rec.at("x"), path, lineno);
        if (!points.empty()) detail::check_uniform(x, points.front(), path, lineno);

        double z;
        if (has_y) {
            const auto& jy = rec.at("y");
            const bool ok = (jy.is_number_integer() || jy.is_number_unsigned()) &&
                            (jy.get<std::int64_t>() == 0 || jy.get<std::int64_t>() == 1);
            if (!ok) throw io_error(path, lineno, "\"y\" must be the integer 0 or 1");
            z = static_cast<double>(jy.get<std::int64_t>());
        } else {
            const auto& jz = rec.at("z");
            if (!jz.is_number()) throw io_error(path, lineno, "\"z\" must be a number");
            z = jz.get<double>();
            if (!(z >= 0.0 && z <= 1.0))
                throw io_error(path, lineno, "\"z\" must lie in [0, 1]");
        }
        points.push_back(std::move(x));
        responses.push_back(z);
    }
    if (in.bad()) throw io_error(path, 0, "read failed");
    if (points.empty()) throw io_error(path, 0, "no records");
    try {
        return Dataset(std::move(points), std::move(responses));
    } catch (const error& e) {
        throw io_error(path, 0, e.what());
    }
}

inline std::vector<Point> load_query_points(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, 0, "cannot open for reading");
    std::vector<Point> points;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::is_blank(line)) continue;
        detail::njson rec;
        try {
            rec = detail::njson::parse(line);
        } catch (const detail::njson::parse_error& e) {
            throw io_error(path, lineno, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) throw io_error(path, lineno, "record must be a JSON object");
        if (!rec.contains("x")) throw io_error(path, lineno, "record is missing key \"x\"");
        for (const auto& item : rec.items())
            if (item.key() != "x" && item.key() != "y" && item.key() != "z")
                throw io_error(path, lineno,
                               "record has unknown key \"" + item.key() + "\"");
        Point x = detail::parse_point(rec.at("x"), path, lineno);
        if (!points.empty()) detail::check_uniform(x, points.front(), path, lineno);
        points.push_back(std::move(x));
    }
    if (in.bad()) throw io_error(path, 0, "read failed");
    if (points.empty()) throw io_error(path, 0, "no records");
    return points;
}

// ---------- risk mode ----------

inline std::pair<RiskMode, std::size_t> parse_risk_mode(const std::string& s) {
    if (s == "exact") return {RiskMode::exact, 0};
    if (s.rfind("mc:", 0) == 0) {
        const std::string digits = s.substr(3);
        if (digits.empty()) throw parameter_error("risk mode \"mc:\" needs a draw count");
        std::uint64_t count = 0;
        for (char c : digits) {
            if (c < '0' || c > '9')
                throw parameter_error("risk mode draw count must be a decimal integer, got \"" +
                                      digits + "\"");
            count = count * 10 + static_cast<std::uint64_t>(c - '0');
            if (count > (std::uint64_t{1} << 40))
                throw parameter_error("risk mode draw count is implausibly large");
        }
        if (count == 0) throw parameter_error("risk mode draw count must be at least 1");
        return {RiskMode::monte_carlo, static_cast<std::size_t>(count)};
    }
    throw parameter_error("risk mode must be \"exact\" or \"mc:<count>\", got \"" + s + "\"");
}

// ---------- Γ bundles ----------

inline GammaParams gamma_from_json(const detail::njson& j) {
    detail::require_keys(j,
                         {"nu_max", "d", "alpha", "C_alpha", "beta", "C_beta", "gamma",
                          "t_gamma", "C_gamma", "tau", "t_tau", "C_tau"},
                         {"alpha_certified", "beta_certified", "gamma_certified",
                          "tau_certified", "mass_certified"},
                         "gamma");
    GammaParams g;
    g.nu_max = detail::get_number(j, "nu_max", "gamma");
    g.d = detail::get_number(j, "d", "gamma");
    g.alpha = detail::get_number(j, "alpha", "gamma");
    g.C_alpha = detail::get_number(j, "C_alpha", "gamma");
    g.beta = detail::get_number(j, "beta", "gamma");
    g.C_beta = detail::get_number(j, "C_beta", "gamma");
    g.gamma = detail::get_number(j, "gamma", "gamma");
    g.t_gamma = detail::get_number(j, "t_gamma", "gamma");
    g.C_gamma = detail::get_number(j, "C_gamma", "gamma");
    const auto& jtau = j.at("tau");
    if (jtau.is_string()) {
        if (jtau.get<std::string>() != "inf")
            throw parameter_error("gamma key \"tau\" must be a number or the string \"inf\"");
        g.tau = std::numeric_limits<double>::infinity();
    } else {
        g.tau = detail::get_number(j, "tau", "gamma");
    }
    g.t_tau = detail::get_number(j, "t_tau", "gamma");
    g.C_tau = detail::get_number(j, "C_tau", "gamma");
    auto flag = [&j](const char* key) {
        if (!j.contains(key)) return false;
        const auto& v = j.at(key);
        if (!v.is_boolean())
            throw parameter_error(std::string("gamma key \"") + key + "\" must be a boolean");
        return v.get<bool>();
    };
    g.alpha_certified = flag("alpha_certified");
    g.beta_certified = flag("beta_certified");
    g.gamma_certified = flag("gamma_certified");
    g.tau_certified = flag("tau_certified");
    g.mass_certified = flag("mass_certified");
    g.validate();
    return g;
}

inline std::string gamma_to_json(const GammaParams& g) {
    JsonWriter w;
    w.begin_object();
    w.field("nu_max", g.nu_max);
    w.field("d", g.d);
    w.field("alpha", g.alpha);
    w.field("C_alpha", g.C_alpha);
    w.field("beta", g.beta);
    w.field("C_beta", g.C_beta);
    w.field("gamma", g.gamma);
    w.field("t_gamma", g.t_gamma);
    w.field("C_gamma", g.C_gamma);
    if (std::isinf(g.tau))
        w.field("tau", std::string_view("inf"));
    else
        w.field("tau", g.tau);
    w.field("t_tau", g.t_tau);
    w.field("C_tau", g.C_tau);
    w.field("alpha_certified", g.alpha_certified);
    w.field("beta_certified", g.beta_certified);
    w.field("gamma_certified", g.gamma_certified);
    w.field("tau_certified", g.tau_certified);
    w.field("mass_certified", g.mass_certified);
    w.end_object();
    return w.str();
}

// ---------- family specs ----------

// Builds a DistributionSpec from a parsed spec document. Two forms exist for
// the discrete lower-bound families: explicit parameters, or "lb_n" asking
// for the parameter schedule at sample size n.
inline DistributionSpec spec_from_json(const detail::njson& j) {
    if (!j.is_object()) throw parameter_error("spec must be a JSON object");
    if (!j.contains("family") || !j.at("family").is_string())
        throw parameter_error("spec needs a string key \"family\"");
    const auto family = j.at("family").get<std::string>();

    if (family == "four-point") {
        if (j.contains("lb_n")) {
            detail::require_keys(j, {"family", "iota", "lb_n", "gamma"}, {}, "four-point spec");
            const auto iota = static_cast<int>(detail::get_u64(j, "iota", "four-point spec"));
            const auto n = detail::get_u64(j, "lb_n", "four-point spec");
            if (n < 1) throw parameter_error("four-point spec lb_n must be at least 1");
            const GammaParams g = gamma_from_json(j.at("gamma"));
            auto pair = lb_parameters_unknown_noise(static_cast<std::size_t>(n), g);
            return DistributionSpec::four_point(iota == 0 ? pair.first : pair.second, g);
        }
        detail::require_keys(j, {"family", "iota", "nu_max", "delta", "r", "u", "v", "w",
                                 "gamma"},
                             {}, "four-point spec");
        const auto iota = static_cast<int>(detail::get_u64(j, "iota", "four-point spec"));
        FourPointFamily f = FourPointFamily::create(
            iota, detail::get_number(j, "delta", "four-point spec"),
            detail::get_number(j, "r", "four-point spec"),
            detail::get_number(j, "u", "four-point spec"),
            detail::get_number(j, "v", "four-point spec"),
            detail::get_number(j, "w", "four-point spec"),
            detail::get_number(j, "nu_max", "four-point spec"));
        return DistributionSpec::four_point(std::move(f), gamma_from_json(j.at("gamma")));
    }

    if (family == "hypercube") {
        if (j.contains("lb_n")) {
            detail::require_keys(j, {"family", "lb_n", "sign_seed", "gamma"}, {},
                                 "hypercube spec");
            const auto n = detail::get_u64(j, "lb_n", "hypercube spec");
            if (n < 1) throw parameter_error("hypercube spec lb_n must be at least 1");
            const auto seed = detail::get_u64(j, "sign_seed", "hypercube spec");
            const GammaParams g = gamma_from_json(j.at("gamma"));
            HypercubeFamily f = lb_parameters_hypercube(static_cast<std::size_t>(n), g, seed);
            return DistributionSpec::hypercube(std::move(f), g);
        }
        detail::require_keys(j, {"family", "l", "w", "delta", "m", "d", "signs", "gamma"}, {},
                             "hypercube spec");
        const auto& jsigns = j.at("signs");
        if (!jsigns.is_array())
            throw parameter_error("hypercube spec key \"signs\" must be an array of +1/-1");
        std::vector<int> signs;
        signs.reserve(jsigns.size());
        for (const auto& s : jsigns) {
            if (!s.is_number_integer() && !s.is_number_unsigned())
                throw parameter_error("hypercube spec signs must be the integers +1 or -1");
            signs.push_back(static_cast<int>(s.get<std::int64_t>()));
        }
        HypercubeFamily f = HypercubeFamily::create(
            static_cast<std::size_t>(detail::get_u64(j, "l", "hypercube spec")),
            detail::get_number(j, "w", "hypercube spec"),
            detail::get_number(j, "delta", "hypercube spec"),
            static_cast<std::size_t>(detail::get_u64(j, "m", "hypercube spec")),
            detail::get_number(j, "d", "hypercube spec"), std::move(signs));
        return DistributionSpec::hypercube(std::move(f), gamma_from_json(j.at("gamma")));
    }

    if (family == "laplace-logistic") {
        detail::require_keys(j, {"family", "tau", "pi0", "pi1"}, {}, "laplace-logistic spec");
        LaplaceLogisticFamily f = LaplaceLogisticFamily::create(
            detail::get_number(j, "tau", "laplace-logistic spec"),
            detail::get_number(j, "pi0", "laplace-logistic spec"),
            detail::get_number(j, "pi1", "laplace-logistic spec"));
        return DistributionSpec::laplace_logistic(f);
    }

    if (family == "user-table") {
        detail::require_keys(j, {"family", "masses", "eta", "omega", "pi0", "pi1",
                                 "distances", "gamma"},
                             {}, "user-table spec");
        auto numbers = [&j](const char* key) {
            const auto& arr = j.at(key);
            if (!arr.is_array())
                throw parameter_error(std::string("user-table spec key \"") + key +
                                      "\" must be an array of numbers");
            std::vector<double> out;
            out.reserve(arr.size());
            for (const auto& e : arr) {
                if (!e.is_number())
                    throw parameter_error(std::string("user-table spec key \"") + key +
                                          "\" must be an array of numbers");
                out.push_back(e.get<double>());
            }
            return out;
        };
        std::vector<double> masses = numbers("masses");
        std::vector<double> eta = numbers("eta");
        std::vector<double> omega = numbers("omega");
        const auto& jd = j.at("distances");
        if (!jd.is_array())
            throw parameter_error("user-table spec key \"distances\" must be an array of rows");
        const std::size_t k = masses.size();
        if (jd.size() != k)
            throw parameter_error("user-table spec distance matrix must have one row per atom");
        DiscreteTable table;
        table.n_atoms = k;
        table.dist.reserve(k * k);
        for (const auto& row : jd) {
            if (!row.is_array() || row.size() != k)
                throw parameter_error(
                    "user-table spec distance rows must each hold one number per atom");
            for (const auto& e : row) {
                if (!e.is_number())
                    throw parameter_error("user-table spec distances must be numbers");
                table.dist.push_back(e.get<double>());
            }
        }
        UserTableFamily f = UserTableFamily::create(
            std::move(masses), std::move(eta), std::move(omega),
            detail::get_number(j, "pi0", "user-table spec"),
            detail::get_number(j, "pi1", "user-table spec"), std::move(table));
        return DistributionSpec::user_table(std::move(f), gamma_from_json(j.at("gamma")));
    }

    throw parameter_error("unknown family \"" + family +
                          "\" (expected four-point, hypercube, laplace-logistic, or "
                          "user-table)");
}

inline DistributionSpec load_spec_file(const std::string& path) {
    const std::string content = detail::read_file(path);
    const detail::njson j = detail::parse_document(path, content);
    try {
        return spec_from_json(j);
    } catch (const io_error&) {
        throw;
    } catch (const error& e) {
        throw io_error(path, 0, e.what());
    }
}

// ---------- sweep configs ----------

// {"spec": <object or path string>, "n_grid": [...], "trials_per_n": N,
//  "delta": D, "risk_mode": "exact"|"mc:<count>", "base_seed": S}
// A relative spec path resolves against the config file's directory.
inline ExperimentConfig load_sweep_config(const std::string& path) {
    const std::string content = detail::read_file(path);
    const detail::njson j = detail::parse_document(path, content);
    try {
        detail::require_keys(j, {"spec", "n_grid", "trials_per_n", "delta", "risk_mode",
                                 "base_seed"},
                             {}, "sweep config");

        const auto& jspec = j.at("spec");
        DistributionSpec spec = [&]() {
            if (jspec.is_string()) {
                std::filesystem::path p = jspec.get<std::string>();
                if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
                return load_spec_file(p.string());
            }
            return spec_from_json(jspec);
        }();

        const auto& jgrid = j.at("n_grid");
        if (!jgrid.is_array())
            throw parameter_error("sweep config key \"n_grid\" must be an array of integers");
        std::vector<std::size_t> n_grid;
        n_grid.reserve(jgrid.size());
        for (const auto& e : jgrid) {
            if (!e.is_number_unsigned() &&
                !(e.is_number_integer() && e.get<std::int64_t>() > 0))
                throw parameter_error("sweep config n_grid entries must be positive integers");
            n_grid.push_back(static_cast<std::size_t>(e.get<std::uint64_t>()));
        }

        const auto& jmode = j.at("risk_mode");
        if (!jmode.is_string())
            throw parameter_error("sweep config key \"risk_mode\" must be a string");
        const auto [mode, mc_n] = parse_risk_mode(jmode.get<std::string>());

        ExperimentConfig cfg{std::move(spec),
                             std::move(n_grid),
                             static_cast<std::size_t>(
                                 detail::get_u64(j, "trials_per_n", "sweep config")),
                             detail::get_number(j, "delta", "sweep config"),
                             mode,
                             mc_n,
                             detail::get_u64(j, "base_seed", "sweep config")};
        cfg.validate();
        return cfg;
    } catch (const io_error&) {
        throw;
    } catch (const error& e) {
        throw io_error(path, 0, e.what());
    }
}

}  // namespace noiseknn
