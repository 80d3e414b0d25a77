#include "fouexp/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fouexp/constants.hpp"
#include "fouexp/density.hpp"
#include "fouexp/errors.hpp"
#include "fouexp/estimator.hpp"
#include "fouexp/fou.hpp"
#include "fouexp/kernels.hpp"
#include "fouexp/montecarlo.hpp"
#include "json.hpp"

namespace fouexp::cli {

using nlohmann::json;

FigureSpec figure_spec(int id) {
    switch (id) {
        case 1: return {1, 0.55, 50.0};
        case 2: return {2, 0.55, 100.0};
        case 3: return {3, 0.625, 50.0};
        case 4: return {4, 0.625, 100.0};
        case 5: return {5, 0.7, 100.0};
        case 6: return {6, 0.7, 400.0};
        case 7: return {7, 0.55, 400.0};
        case 8: return {8, 0.625, 400.0};
        default: throw DomainError("figure id must be in 1..8");
    }
}

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw DomainError("not a number: '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
    detail::require(!out.empty(), "empty list");
    return out;
}

struct GridSpec {
    double lo;
    double hi;
    std::size_t n;
};

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    detail::require(parts.size() == 3, "grid must be lo:hi:n");
    GridSpec g{parse_double(parts[0]), parse_double(parts[1]), 0};
    const double n = parse_double(parts[2]);
    detail::require(n >= 2.0 && n == std::floor(n) && n <= 1e7, "grid point count must be an integer >= 2");
    g.n = static_cast<std::size_t>(n);
    detail::require(std::isfinite(g.lo) && std::isfinite(g.hi) && g.hi > g.lo, "grid needs lo < hi");
    return g;
}

double grid_point(const GridSpec& g, std::size_t i) {
    return g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.n - 1);
}

void write_output(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + path);
    f << content;
    if (!f) throw DomainError("failed writing " + path);
}

// Summary lines go to stdout unless stdout carries the data.
std::ostream& summary_stream(const std::string& path, std::ostream& out, std::ostream& err) {
    return (path.empty() || path == "-") ? err : out;
}

BetaSpec parse_beta(const std::string& mode, double value) {
    if (mode == "zero") return BetaSpec::zero();
    if (mode == "bias_correct") return BetaSpec::bias_correct();
    if (mode == "constant") return BetaSpec::constant(value);
    throw DomainError("beta must be zero, bias_correct or constant");
}

C3Policy parse_c3(const std::string& mode) {
    if (mode == "when_needed") return C3Policy::when_needed;
    if (mode == "finite") return C3Policy::finite;
    if (mode == "never") return C3Policy::never;
    throw DomainError("c3 policy must be when_needed, finite or never");
}

json constants_json(const ExpansionConstants& c) {
    json j;
    j["theta"] = c.theta;
    j["sigma"] = c.sigma;
    j["H"] = c.hurst;
    j["x0"] = c.x0;
    j["c0"] = c.c0;
    j["c1"] = c.c1;
    j["c2"] = c.c2;
    j["c3"] = c.c3;
    j["c3_prime"] = c.c3_prime ? json(*c.c3_prime) : json(nullptr);
    j["c3_prime_used"] = c.low_regime();
    j["G"] = c.G;
    j["C_cap"] = c.C_cap;
    j["b_inf"] = c.b_inf;
    j["lambda"] = c.lambda;
    j["kappa"] = c.kappa;
    j["tau"] = c.tau;
    j["c11_plus"] = c.c11_plus;
    j["c12_plus"] = c.c12_plus;
    j["q"] = c.q;
    j["beta_at_theta"] = c.beta_at_theta;
    return j;
}

std::string constants_csv(const ExpansionConstants& c) {
    const json j = constants_json(c);
    std::string header, row;
    for (const auto& [key, value] : j.items()) {
        if (!header.empty()) {
            header += ',';
            row += ',';
        }
        header += key;
        if (value.is_null()) {
            row += "";
        } else if (value.is_boolean()) {
            row += value.get<bool>() ? "true" : "false";
        } else {
            row += num(value.get<double>());
        }
    }
    return header + "\n" + row + "\n";
}

std::string overlay_svg(const Histogram& h, const std::vector<double>& xs,
                        const std::vector<std::pair<std::string, std::vector<double>>>& curves,
                        const std::string& title) {
    constexpr double W = 720, Hh = 440, L = 60, R = 20, Tm = 40, B = 50;
    const double x0 = h.edges.front(), x1 = h.edges.back();
    double ymax = 0.0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) ymax = std::max(ymax, h.density(i));
    for (const auto& c : curves)
        for (double v : c.second) ymax = std::max(ymax, v);
    ymax *= 1.05;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return Hh - B - std::max(y, 0.0) / ymax * (Hh - Tm - B); };

    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        W, Hh, W, Hh, L, title);
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double a = px(h.edges[i]), b = px(h.edges[i + 1]), top = py(h.density(i));
        s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#c8d4e6\" stroke=\"#8ea2c0\"/>\n",
                         a, top, b - a, Hh - B - top);
    }
    const char* colors[] = {"#222222", "#d62728", "#2ca02c", "#9467bd"};
    for (std::size_t k = 0; k < curves.size(); ++k) {
        std::string pts;
        for (std::size_t i = 0; i < xs.size(); ++i) pts += fmt::format("{:.2f},{:.2f} ", px(xs[i]), py(curves[k].second[i]));
        const char* color = colors[k % 4];
        s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n", color, pts);
        s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                         W - R - 170, Tm + 16 * (k + 1), color, curves[k].first);
    }
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", L, Hh - B, W - R, Hh - B);
    for (int t = 0; t <= 4; ++t) {
        const double x = x0 + (x1 - x0) * t / 4.0;
        s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.2f}</text>\n",
                         px(x), Hh - B + 18, x);
    }
    s += "</svg>\n";
    return s;
}

struct McOutputs {
    std::string summary;
    std::string histogram;
    std::string overlay;
    std::string svg;
    std::size_t overlay_points = 201;
};

json mc_summary_json(const McConfig& cfg, const McSummary& s, const ExpansionConstants& c) {
    json j;
    j["theta"] = cfg.params.theta;
    j["sigma"] = cfg.params.sigma;
    j["H"] = cfg.params.hurst;
    j["x0"] = cfg.params.x0;
    j["T"] = cfg.horizon;
    j["steps"] = cfg.grid().steps();
    j["replications"] = s.replications;
    j["seed"] = cfg.seed;
    j["estimator"] = cfg.estimator == EstimatorChoice::moment ? "moment" : "corrected";
    j["mean"] = s.mean;
    j["variance"] = s.variance;
    j["skewness"] = s.skewness;
    j["ks_normal"] = s.ks_normal;
    j["ks_expansion"] = s.ks_expansion;
    j["ks_expansion_plus"] = s.ks_expansion_plus;
    j["clipped_count"] = s.clipped_count;
    j["failed_count"] = s.failed_count;
    const DensityModel model{c, cfg.horizon, DensityVariant::expansion};
    j["expansion_mean"] = expansion_moment(model, 1);
    j["expansion_second_moment"] = expansion_moment(model, 2);
    const auto v = empirical_variance_check(s, c, cfg.horizon);
    j["moment_estimator_variance"] = v.empirical;
    j["variance_target"] = v.theoretical;
    j["variance_ratio"] = v.ratio;
    j["variance_ratio_ci"] = {v.ratio_lo, v.ratio_hi};
    j["constants"] = constants_json(c);
    return j;
}

void emit_mc(const McConfig& cfg, const McSummary& s, const ExpansionConstants& c, const McOutputs& outs,
             const std::string& title, std::ostream& out) {
    if (!outs.summary.empty()) write_output(outs.summary, mc_summary_json(cfg, s, c).dump(2) + "\n", out);

    if (!outs.histogram.empty()) {
        std::string csv = "bin_lo,bin_hi,count,density\n";
        for (std::size_t i = 0; i < s.histogram.counts.size(); ++i)
            csv += fmt::format("{},{},{},{}\n", num(s.histogram.edges[i]), num(s.histogram.edges[i + 1]),
                               s.histogram.counts[i], num(s.histogram.density(i)));
        write_output(outs.histogram, csv, out);
    }

    if (outs.overlay.empty() && outs.svg.empty()) return;
    detail::require(outs.overlay_points >= 2, "overlay needs at least two points");
    const double lo = s.histogram.edges.front(), hi = s.histogram.edges.back();
    std::vector<double> xs(outs.overlay_points);
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(xs.size() - 1);
    const auto kde = gaussian_kde(s.scaled_errors, xs);
    const DensityModel expansion{c, cfg.horizon, DensityVariant::expansion};
    const DensityModel plus{c, cfg.horizon, DensityVariant::expansion_plus};
    std::vector<double> normal(xs.size()), exp_pdf(xs.size()), plus_pdf(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        normal[i] = normal_pdf(xs[i], c.c0);
        exp_pdf[i] = expansion_pdf(expansion, xs[i]);
        plus_pdf[i] = expansion_pdf(plus, xs[i]);
    }
    if (!outs.overlay.empty()) {
        std::string csv = "x,empirical_kde,normal_pdf,expansion_pdf,expansion_plus_pdf\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            csv += fmt::format("{},{},{},{},{}\n", num(xs[i]), num(kde[i]), num(normal[i]), num(exp_pdf[i]),
                               num(plus_pdf[i]));
        write_output(outs.overlay, csv, out);
    }
    if (!outs.svg.empty()) {
        write_output(outs.svg,
                     overlay_svg(s.histogram, xs,
                                 {{"normal", normal}, {"expansion", exp_pdf}, {"expansion plus", plus_pdf}}, title),
                     out);
    }
}

// Turns a flat JSON object into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw DomainError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw DomainError("config file must hold a JSON object");
    std::vector<std::string> tokens;
    for (const auto& [key, value] : j.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            tokens.push_back(flag + (value.get<bool>() ? "" : "=false"));
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            tokens.push_back(flag);
            tokens.push_back(value.dump());
        } else if (value.is_number()) {
            tokens.push_back(flag);
            tokens.push_back(num(value.get<double>()));
        } else if (value.is_string()) {
            tokens.push_back(flag);
            tokens.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!v.is_number()) throw DomainError("config arrays must hold numbers: " + key);
                if (!joined.empty()) joined += ',';
                joined += num(v.get<double>());
            }
            tokens.push_back(flag);
            tokens.push_back(joined);
        } else {
            throw DomainError("unsupported config value for " + key);
        }
    }
    return tokens;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            if (i + 1 >= args.size()) throw DomainError("--config needs a file");
            path.push_back(args[++i]);
        } else if (a.rfind("--config=", 0) == 0) {
            path.push_back(a.substr(9));
        } else {
            rest.push_back(a);
        }
    }
    if (path.empty() || rest.size() < 2) return rest;
    std::vector<std::string> out(rest.begin(), rest.begin() + 2);
    for (const auto& p : path) {
        auto tokens = config_tokens(p);
        out.insert(out.end(), tokens.begin(), tokens.end());
    }
    out.insert(out.end(), rest.begin() + 2, rest.end());
    return out;
}

struct ModelOpts {
    ModelParams params;
    void add(CLI::App* app) {
        app->add_option("--theta", params.theta, "drift rate theta > 0")->capture_default_str();
        app->add_option("--sigma", params.sigma, "volatility sigma > 0")->capture_default_str();
        app->add_option("--H", params.hurst, "Hurst index")->capture_default_str();
        app->add_option("--x0", params.x0, "initial value")->capture_default_str();
    }
};

struct QuadOpts {
    QuadratureSpec spec;
    bool no_split = false;
    void add(CLI::App* app) {
        app->add_option("--rel-tol", spec.rel_tol, "quadrature relative tolerance")->capture_default_str();
        app->add_option("--abs-tol", spec.abs_tol, "quadrature absolute tolerance")->capture_default_str();
        app->add_option("--max-subdivisions", spec.max_subdivisions, "adaptive subdivision budget")
            ->capture_default_str();
        app->add_option("--tail-cutoff", spec.tail_cutoff, "exponential truncation radius R")->capture_default_str();
        app->add_flag("--no-singularity-split", no_split, "disable the algebraic singularity substitution");
    }
    QuadratureSpec get() const {
        QuadratureSpec s = spec;
        s.singularity_split = !no_split;
        s.validate();
        return s;
    }
};

struct EstimOpts {
    ParamSpace space;
    std::string beta = "zero";
    double beta_value = 0.0;
    void add(CLI::App* app) {
        app->add_option("--theta-lo", space.theta_lo, "lower end of the parameter space")->capture_default_str();
        app->add_option("--theta-hi", space.theta_hi, "upper end of the parameter space")->capture_default_str();
        app->add_option("--theta-star", space.theta_star, "fallback value")->capture_default_str();
        app->add_option("--beta", beta, "zero | bias_correct | constant")->capture_default_str();
        app->add_option("--beta-value", beta_value, "value for --beta constant")->capture_default_str();
    }
    BetaSpec get_beta() const { return parse_beta(beta, beta_value); }
};

struct McOpts {
    double horizon = 50.0;
    std::size_t steps = 0;
    std::size_t reps = 10000;
    std::uint64_t seed = 1;
    std::size_t bins = 60;
    std::string estimator = "corrected";
    McOutputs outs;
    void add(CLI::App* app, bool with_horizon) {
        if (with_horizon) app->add_option("--T", horizon, "time horizon")->capture_default_str();
        app->add_option("--steps", steps, "grid steps (0: power of two with dt <= 0.025)")->capture_default_str();
        app->add_option("--reps", reps, "replications")->capture_default_str();
        app->add_option("--seed", seed, "master seed")->capture_default_str();
        app->add_option("--bins", bins, "histogram bins")->capture_default_str();
        app->add_option("--estimator", estimator, "corrected | moment")->capture_default_str();
        app->add_option("--overlay-points", outs.overlay_points, "overlay grid size")->capture_default_str();
    }
    EstimatorChoice choice() const {
        if (estimator == "corrected") return EstimatorChoice::corrected;
        if (estimator == "moment") return EstimatorChoice::moment;
        throw DomainError("estimator must be corrected or moment");
    }
};

std::string path_csv(const FouPath& path) {
    std::string csv = "t,value\n";
    for (std::size_t k = 0; k < path.values.size(); ++k)
        csv += fmt::format("{},{}\n", num(path.grid.time(k)), num(path.values[k]));
    return csv;
}

FouPath read_path_csv(const std::string& file, const ModelParams& params) {
    std::ifstream f(file);
    if (!f) throw DomainError("cannot open input file " + file);
    std::string line;
    std::vector<double> t, x;
    bool header = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.find_first_not_of("0123456789+-.eE, \r") != std::string::npos) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw DomainError("input rows must be t,value");
        std::string rhs = line.substr(comma + 1);
        if (!rhs.empty() && rhs.back() == '\r') rhs.pop_back();
        t.push_back(parse_double(line.substr(0, comma)));
        x.push_back(parse_double(rhs));
    }
    detail::require(t.size() >= 2, "input path needs at least two rows");
    detail::require(t.front() == 0.0, "input path must start at t = 0");
    const std::size_t n = t.size() - 1;
    const double horizon = t.back();
    detail::require(horizon > 0.0, "input path must have increasing times");
    const double dt = horizon / static_cast<double>(n);
    for (std::size_t k = 1; k <= n; ++k)
        detail::require(std::abs((t[k] - t[k - 1]) - dt) <= 1e-9 * std::max(1.0, dt) * 1e3,
                        "input path must be on a uniform grid");
    return FouPath{SampleGrid(horizon, n), std::move(x), params, {}};
}

json estimate_json(const EstimatorResult& r, const SampleGrid& grid) {
    json j;
    j["q_T"] = r.q_T;
    j["theta_tilde"] = r.theta_tilde;
    j["theta_hat"] = r.theta_hat;
    j["clipped"] = r.clipped;
    j["q_exponent"] = r.q_exponent;
    j["T"] = grid.horizon();
    j["steps"] = grid.steps();
    return j;
}

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const std::vector<std::string> args = expand_config(raw_args);

    CLI::App app{"Drift estimation for the fractional Ornstein-Uhlenbeck process and its second-order expansion",
                 "fouexp"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    unsigned threads = 0;
    std::string config_unused;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_unused, "JSON file with option values (flags override)");
    };
    auto add_threads = [&](CLI::App* sub) {
        sub->add_option("--threads", threads, "worker threads (0: FOUEXP_THREADS or hardware)")->capture_default_str();
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate one fOU path and write t,value CSV");
    ModelOpts sim_model;
    double sim_T = 1.0;
    std::size_t sim_steps = 0;
    std::uint64_t sim_seed = 1, sim_stream = 0;
    std::string sim_out;
    sim_model.add(sim);
    sim->add_option("--T", sim_T, "time horizon")->capture_default_str();
    sim->add_option("--steps", sim_steps, "grid steps (0: default)")->capture_default_str();
    sim->add_option("--seed", sim_seed)->capture_default_str();
    sim->add_option("--stream", sim_stream)->capture_default_str();
    sim->add_option("--out", sim_out, "output CSV (default stdout)");
    add_common(sim);

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate theta from a path file or a simulated path");
    ModelOpts est_model;
    EstimOpts est_opts;
    double est_T = 50.0;
    std::size_t est_steps = 0;
    std::uint64_t est_seed = 1, est_stream = 0;
    std::string est_in, est_out;
    est_model.add(est);
    est_opts.add(est);
    est->add_option("--input", est_in, "t,value CSV; simulated when omitted");
    est->add_option("--T", est_T, "time horizon when simulating")->capture_default_str();
    est->add_option("--steps", est_steps)->capture_default_str();
    est->add_option("--seed", est_seed)->capture_default_str();
    est->add_option("--stream", est_stream)->capture_default_str();
    est->add_option("--out", est_out, "output JSON (default stdout)");
    add_common(est);

    // constants
    auto* con = app.add_subcommand("constants", "all expansion constants as JSON (and optional CSV row)");
    ModelOpts con_model;
    EstimOpts con_opts;
    QuadOpts con_quad;
    std::string con_c3 = "when_needed", con_out, con_csv;
    con_model.add(con);
    con_opts.add(con);
    con_quad.add(con);
    con->add_option("--c3", con_c3, "when_needed | finite | never")->capture_default_str();
    con->add_option("--out", con_out, "output JSON (default stdout)");
    con->add_option("--csv", con_csv, "also write a one-row CSV");
    add_common(con);

    // density
    auto* den = app.add_subcommand("density", "normal, expansion and expansion-plus densities on a grid");
    ModelOpts den_model;
    EstimOpts den_opts;
    QuadOpts den_quad;
    double den_T = 50.0;
    std::string den_grid = "-8:8:401", den_out, den_c3 = "finite";
    den_model.add(den);
    den_opts.add(den);
    den_quad.add(den);
    den->add_option("--T", den_T, "time horizon")->capture_default_str();
    den->add_option("--grid", den_grid, "lo:hi:n")->capture_default_str();
    den->add_option("--c3", den_c3, "when_needed | finite | never")->capture_default_str();
    den->add_option("--out", den_out, "output CSV (default stdout)");
    add_common(den);

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo experiment");
    ModelOpts mc_model;
    EstimOpts mc_opts;
    QuadOpts mc_quad;
    McOpts mc_run;
    std::string mc_c3 = "finite";
    mc_model.add(mc);
    mc_opts.add(mc);
    mc_quad.add(mc);
    mc_run.add(mc, true);
    mc->add_option("--c3", mc_c3, "when_needed | finite | never")->capture_default_str();
    mc->add_option("--summary", mc_run.outs.summary, "summary JSON (default stdout)");
    mc->add_option("--histogram", mc_run.outs.histogram, "histogram CSV");
    mc->add_option("--overlay", mc_run.outs.overlay, "overlay CSV");
    mc->add_option("--svg", mc_run.outs.svg, "overlay SVG");
    add_threads(mc);
    add_common(mc);

    // verify-constants
    auto* vc = app.add_subcommand("verify-constants", "closed form of c0 against its quadrature");
    QuadOpts vc_quad;
    std::string vc_thetas = "1,2", vc_hs = "0.55,0.6,0.625,0.7", vc_out;
    vc_quad.add(vc);
    vc->add_option("--thetas", vc_thetas, "comma-separated theta values")->capture_default_str();
    vc->add_option("--Hs", vc_hs, "comma-separated H values")->capture_default_str();
    vc->add_option("--out", vc_out, "output CSV (default stdout)");
    add_common(vc);

    // verify-gamma
    auto* vg = app.add_subcommand("verify-gamma", "finite-T gamma factor against c0 + c2 T^{4H-3}");
    QuadOpts vg_quad;
    double vg_theta = 2.0, vg_H = 0.7;
    std::string vg_Ts = "50,100,200,400", vg_out;
    vg_quad.add(vg);
    vg->add_option("--theta", vg_theta)->capture_default_str();
    vg->add_option("--H", vg_H)->capture_default_str();
    vg->add_option("--Ts", vg_Ts, "comma-separated horizons")->capture_default_str();
    vg->add_option("--out", vg_out, "output CSV (default stdout)");
    add_common(vg);

    // reproduce-figure
    auto* rf = app.add_subcommand("reproduce-figure", "histogram and density overlay for a figure setting");
    EstimOpts rf_opts;
    QuadOpts rf_quad;
    McOpts rf_run;
    int rf_id = 1;
    std::string rf_dir = ".";
    rf_opts.add(rf);
    rf_quad.add(rf);
    rf_run.add(rf, false);
    rf->add_option("--id", rf_id, "figure id 1..8")->capture_default_str();
    rf->add_option("--out-dir", rf_dir, "output directory")->capture_default_str();
    add_threads(rf);
    add_common(rf);

    std::vector<std::string> reversed;
    if (!args.empty()) reversed.assign(args.rbegin(), args.rend() - 1);
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    if (sim->parsed()) {
        sim_model.params.validate_for_simulation();
        const SampleGrid grid =
            sim_steps == 0 ? SampleGrid::with_default_steps(sim_T) : SampleGrid(sim_T, sim_steps);
        const FouPath path = simulate_fou(sim_model.params, grid, sim_seed, sim_stream);
        write_output(sim_out, path_csv(path), out);
        summary_stream(sim_out, out, err)
            << fmt::format("simulate: n={} T={} Q_T={}\n", grid.steps(), num(grid.horizon()), num(integrate_q(path)));
        return kExitOk;
    }

    if (est->parsed()) {
        est_model.params.validate_for_estimation();
        est_opts.space.validate();
        const BetaFunction beta = make_beta(est_opts.get_beta(), est_model.params);
        FouPath path = [&] {
            if (!est_in.empty()) return read_path_csv(est_in, est_model.params);
            const SampleGrid grid =
                est_steps == 0 ? SampleGrid::with_default_steps(est_T) : SampleGrid(est_T, est_steps);
            return simulate_fou(est_model.params, grid, est_seed, est_stream);
        }();
        const EstimatorResult r = estimate(path, est_opts.space, beta);
        write_output(est_out, estimate_json(r, path.grid).dump(2) + "\n", out);
        summary_stream(est_out, out, err) << fmt::format("estimate: theta_tilde={} theta_hat={} clipped={}\n",
                                                         num(r.theta_tilde), num(r.theta_hat), r.clipped);
        return kExitOk;
    }

    if (con->parsed()) {
        con_model.params.validate_for_estimation();
        const auto spec = con_quad.get();
        const auto c = assemble_constants(con_model.params, con_opts.get_beta(), spec, parse_c3(con_c3));
        write_output(con_out, constants_json(c).dump(2) + "\n", out);
        if (!con_csv.empty()) write_output(con_csv, constants_csv(c), out);
        const auto violations = internal_consistency_check(c);
        summary_stream(con_out, out, err)
            << fmt::format("constants: c0={} c1={} c2={} c3={} violations={}\n", num(c.c0), num(c.c1), num(c.c2),
                           num(c.c3), violations.size());
        return kExitOk;
    }

    if (den->parsed()) {
        den_model.params.validate_for_estimation();
        detail::require(std::isfinite(den_T) && den_T > 0.0, "T must be positive");
        const GridSpec g = parse_grid(den_grid);
        const auto spec = den_quad.get();
        const auto c = assemble_constants(den_model.params, den_opts.get_beta(), spec, parse_c3(den_c3));
        const DensityModel expansion{c, den_T, DensityVariant::expansion};
        const DensityModel plus{c, den_T, DensityVariant::expansion_plus};
        std::string csv = "x,normal_pdf,expansion_pdf,expansion_plus_pdf\n";
        for (std::size_t i = 0; i < g.n; ++i) {
            const double x = grid_point(g, i);
            csv += fmt::format("{},{},{},{}\n", num(x), num(normal_pdf(x, c.c0)), num(expansion_pdf(expansion, x)),
                               num(expansion_pdf(plus, x)));
        }
        write_output(den_out, csv, out);
        summary_stream(den_out, out, err) << fmt::format("density: {} points, c0={}\n", g.n, num(c.c0));
        return kExitOk;
    }

    auto run_mc = [&](McConfig cfg, const QuadOpts& quad, const std::string& c3, const McOutputs& outs,
                      const std::string& title) {
        cfg.validate();
        const auto spec = quad.get();
        const auto c = assemble_constants(cfg.params, cfg.beta, spec, parse_c3(c3));
        const McSummary s = run_experiment(cfg, c, threads);
        McOutputs o = outs;
        if (o.summary.empty() && o.histogram.empty() && o.overlay.empty() && o.svg.empty()) o.summary = "-";
        emit_mc(cfg, s, c, o, title, out);
        summary_stream(o.summary, out, err)
            << fmt::format("{}: N={} mean={} variance={} ks_normal={} ks_expansion={} ks_expansion_plus={}\n", title,
                           s.scaled_errors.size(), num(s.mean), num(s.variance), num(s.ks_normal),
                           num(s.ks_expansion), num(s.ks_expansion_plus));
    };

    auto make_cfg = [](const ModelParams& params, const EstimOpts& e, const McOpts& m, double horizon) {
        McConfig cfg;
        cfg.params = params;
        cfg.space = e.space;
        cfg.beta = e.get_beta();
        cfg.horizon = horizon;
        cfg.steps = m.steps;
        cfg.replications = m.reps;
        cfg.seed = m.seed;
        cfg.bins = m.bins;
        cfg.estimator = m.choice();
        return cfg;
    };

    if (mc->parsed()) {
        run_mc(make_cfg(mc_model.params, mc_opts, mc_run, mc_run.horizon), mc_quad, mc_c3, mc_run.outs, "mc");
        return kExitOk;
    }

    if (rf->parsed()) {
        const FigureSpec fig = figure_spec(rf_id);
        ModelParams params;
        params.theta = 2.0;
        params.sigma = 1.0;
        params.x0 = 0.0;
        params.hurst = fig.hurst;
        std::error_code ec;
        std::filesystem::create_directories(rf_dir, ec);
        if (ec) throw DomainError("cannot create output directory " + rf_dir);
        const std::string stem = (std::filesystem::path(rf_dir) / fmt::format("fig{}", fig.id)).string();
        McOutputs outs = rf_run.outs;
        outs.summary = stem + "_summary.json";
        outs.histogram = stem + "_histogram.csv";
        outs.overlay = stem + "_overlay.csv";
        outs.svg = stem + "_overlay.svg";
        run_mc(make_cfg(params, rf_opts, rf_run, fig.horizon), rf_quad, "finite", outs,
               fmt::format("figure {} (theta=2, H={}, T={})", fig.id, fig.hurst, fig.horizon));
        return kExitOk;
    }

    if (vc->parsed()) {
        const auto spec = vc_quad.get();
        const auto thetas = parse_list(vc_thetas);
        const auto hs = parse_list(vc_hs);
        std::vector<KernelParams> lattice;
        for (double th : thetas)
            for (double h : hs) lattice.emplace_back(th, h);
        std::string csv = "theta,H,c0_closed,c0_quad,rel_err\n";
        double worst = 0.0;
        for (const auto& p : lattice) {
            const double closed = cu2_closed_form(p);
            const double quad = cu2_quadrature(p, spec).value;
            const double rel = std::abs(quad - closed) / closed;
            worst = std::max(worst, rel);
            csv += fmt::format("{},{},{},{},{}\n", num(p.theta), num(p.hurst), num(closed), num(quad), num(rel));
        }
        write_output(vc_out, csv, out);
        summary_stream(vc_out, out, err) << fmt::format("verify-constants: {} points, max rel_err={}\n",
                                                        lattice.size(), num(worst));
        return kExitOk;
    }

    if (vg->parsed()) {
        const auto spec = vg_quad.get();
        const KernelParams p(vg_theta, vg_H);
        const auto Ts = parse_list(vg_Ts);
        for (double T : Ts) detail::require(std::isfinite(T) && T > 0.0, "horizons must be positive");
        const double c0 = cu2_closed_form(p);
        const double c2 = c2_closed_form(vg_theta, vg_H);
        std::string csv = "theta,H,T,gamma2,c0,c2,residual_ratio\n";
        for (double T : Ts) {
            const double g = gamma2_finite_T(p, T, spec).value;
            const double ratio = (g - c0) / std::pow(T, 4.0 * vg_H - 3.0);
            csv += fmt::format("{},{},{},{},{},{},{}\n", num(vg_theta), num(vg_H), num(T), num(g), num(c0), num(c2),
                               num(ratio));
        }
        write_output(vg_out, csv, out);
        summary_stream(vg_out, out, err) << fmt::format("verify-gamma: {} horizons, c2={}\n", Ts.size(), num(c2));
        return kExitOk;
    }
    return kExitInvalidConfig;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace fouexp::cli
