// skewshadow command-line front end.
//
// Subcommands: exponent, radius, simulate, sweep, ruin, rate. Every command
// is deterministic given its full configuration including the seed; sweep
// output is byte-identical for any --threads value. Exit codes: 0 success,
// 2 user/configuration error, 3 internal consistency failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skewshadow/skewshadow.hpp"

namespace {

using nlohmann::json;
using namespace skewshadow;

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat JSON config files: top-level keys are long option names, values are
/// scalars or arrays. Command-line flags override config values.
class ConfigJSON : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) {
                continue;
            }
            const std::string& name = opt->get_lnames()[0];
            if (opt->count() == 1) {
                j[name] = opt->results().at(0);
            } else if (opt->count() > 1) {
                j[name] = opt->results();
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        input >> j;
        if (!j.is_object()) {
            throw std::invalid_argument("config file must hold a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& element : value) {
                    item.inputs.push_back(element.is_string() ? element.get<std::string>()
                                                              : element.dump());
                }
            } else {
                item.inputs.push_back(value.is_string() ? value.get<std::string>()
                                                        : value.dump());
            }
            items.push_back(std::move(item));
        }
        return items;
    }
};

std::uint64_t default_seed_from_env() {
    const char* env = std::getenv("SKEWSHADOW_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
        throw std::invalid_argument(std::string("SKEWSHADOW_SEED is not an integer: ") + env);
    }
    return static_cast<std::uint64_t>(value);
}

/// Writes to a temporary file in the target directory, then renames, so an
/// interrupted run never leaves a truncated output file.
void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::invalid_argument("cannot open output file: " + tmp.string());
        }
        out << content;
        if (!out.flush()) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

void emit(const std::string& output_path, const std::string& content) {
    if (output_path.empty()) {
        std::cout << content;
    } else {
        atomic_write(output_path, content);
    }
}

void add_config(CLI::App* sub) {
    sub->set_config("--config", "",
                    "JSON config file; keys match long option names, flags override");
    sub->config_formatter(std::make_shared<ConfigJSON>());
}

struct CommonOpts {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string output;
};

void add_lambdas(CLI::App* sub, CommonOpts& o) {
    sub->add_option("--lambda0", o.lambda0, "fiber contraction, in (0, 1)")->required();
    sub->add_option("--lambda1", o.lambda1, "fiber expansion, > 1")->required();
}

json shadow_report_json(const ShadowReport& rep, double oracle, double y0, bool agree) {
    return json{{"K", rep.k_statistic},
                {"witness_k", rep.witness_k},
                {"witness_n", rep.witness_n},
                {"radius", rep.radius},
                {"optimal_y0", y0},
                {"D", rep.d_bound},
                {"oracle_radius", oracle},
                {"agreement_flag", agree}};
}

void run_radius(const std::string& input, const std::string& output, double tol) {
    std::ifstream in(input);
    if (!in) {
        throw std::invalid_argument("cannot open instance file: " + input);
    }
    const Instance instance = read_instance(in);
    const ModelParams params = validate(instance.lambda0, instance.lambda1);
    const WalkPath walk = walk_from_symbols(params, instance.symbols);
    const PseudoOrbit pseudo = pseudo_from_noise(walk, instance.d, instance.noise);

    const ShadowReport rep = k_fast(walk, pseudo);
    const auto [oracle, y0] = oracle_radius(walk, pseudo);
    const bool agree = std::fabs(oracle - rep.radius) <= tol * std::max(1.0, rep.radius);
    emit(output, shadow_report_json(rep, oracle, y0, agree).dump(2) + "\n");
    if (!agree) {
        std::cerr << "radius: oracle and statistic disagree beyond tolerance ("
                  << format_g17(oracle) << " vs " << format_g17(rep.radius) << ")\n";
        throw ConsistencyError("oracle/statistic disagreement");
    }
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
    std::ostringstream os;
    os << "n,c,L,samples,successes,p_hat,ci_low,ci_high,seed\n";
    for (const SweepCell& cell : cells) {
        const Estimate& e = cell.estimate;
        os << cell.n << "," << format_g17(cell.c) << "," << format_g17(cell.l) << ","
           << e.samples << "," << e.successes << "," << format_g17(e.p_hat) << ","
           << format_g17(e.ci_low) << "," << format_g17(e.ci_high) << ","
           << e.master_seed << "\n";
    }
    return os.str();
}

json sweep_json(const std::vector<SweepCell>& cells) {
    json rows = json::array();
    for (const SweepCell& cell : cells) {
        const Estimate& e = cell.estimate;
        rows.push_back(json{{"n", cell.n},
                            {"c", cell.c},
                            {"L", cell.l},
                            {"samples", e.samples},
                            {"successes", e.successes},
                            {"p_hat", e.p_hat},
                            {"ci_low", e.ci_low},
                            {"ci_high", e.ci_high},
                            {"seed", e.master_seed}});
    }
    return rows;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shadowing statistics of a linear skew product over the Bernoulli shift"};
    app.require_subcommand(1);

    std::uint64_t env_seed = 0;
    try {
        env_seed = default_seed_from_env();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    // exponent
    auto* exponent = app.add_subcommand("exponent", "critical exponent c0 = 1/b");
    CommonOpts xo;
    double x_tol = 1e-12;
    add_lambdas(exponent, xo);
    exponent->add_option("--tol", x_tol, "root-finder residual tolerance");
    exponent->add_option("--output", xo.output, "output path (default: stdout)");
    add_config(exponent);
    exponent->callback([&]() {
        const ModelParams params = validate(xo.lambda0, xo.lambda1);
        const NormalizedParams norm = normalize(params);
        const RuinSolution sol = solve_ruin_exponent(norm, x_tol);
        const json out{{"lambda0", xo.lambda0}, {"lambda1", xo.lambda1},
                       {"inverted", norm.inverted}, {"b", sol.b},
                       {"c0", sol.c0},            {"residual", sol.residual}};
        emit(xo.output, out.dump(2) + "\n");
    });

    // radius
    auto* radius = app.add_subcommand("radius", "optimal shadowing radius of an instance file");
    std::string r_input, r_output;
    double r_tol = 1e-9;
    radius->add_option("--input", r_input, "instance file (skewshadow-instance v1)")->required();
    radius->add_option("--tol", r_tol, "oracle agreement tolerance");
    radius->add_option("--output", r_output, "output path (default: stdout)");
    add_config(radius);
    radius->callback([&]() { run_radius(r_input, r_output, r_tol); });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample one pseudotrajectory and report its radius");
    CommonOpts so;
    std::size_t s_n = 100;
    double s_d = 1.0;
    std::uint64_t s_index = 0;
    std::string s_emit;
    add_lambdas(simulate, so);
    simulate->add_option("--n", s_n, "trajectory length")->check(CLI::PositiveNumber);
    simulate->add_option("--d", s_d, "noise amplitude")->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", so.seed, "master seed (default: SKEWSHADOW_SEED or 0)")
        ->default_val(env_seed);
    simulate->add_option("--sample-index", s_index, "stream index under the master seed");
    simulate->add_option("--emit-instance", s_emit, "also write the sampled instance file");
    simulate->add_option("--output", so.output, "output path (default: stdout)");
    add_config(simulate);
    simulate->callback([&]() {
        const ModelParams params = validate(so.lambda0, so.lambda1);
        RandomStream stream = derive_stream(so.seed, s_index);
        std::vector<std::uint8_t> symbols(s_n);
        for (auto& bit : symbols) {
            bit = stream.bit() ? 1 : 0;
        }
        const WalkPath walk = walk_from_symbols(params, symbols);
        const PseudoOrbit pseudo = sample_noise(walk, s_d, stream);
        if (!s_emit.empty()) {
            Instance instance{so.lambda0, so.lambda1, s_d, walk.symbols, pseudo.noise};
            std::ostringstream os;
            write_instance(os, instance);
            atomic_write(s_emit, os.str());
        }
        const ShadowReport rep = k_fast(walk, pseudo);
        const auto [oracle, y0] = oracle_radius(walk, pseudo);
        const bool agree = std::fabs(oracle - rep.radius) <= 1e-9 * std::max(1.0, rep.radius);
        json out = shadow_report_json(rep, oracle, y0, agree);
        out["lambda0"] = so.lambda0;
        out["lambda1"] = so.lambda1;
        out["n"] = s_n;
        out["d"] = s_d;
        out["seed"] = so.seed;
        out["sample_index"] = s_index;
        emit(so.output, out.dump(2) + "\n");
        if (!agree) {
            throw ConsistencyError("oracle/statistic disagreement");
        }
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "phase-transition sweep over an (n, c) grid");
    CommonOpts wo;
    double w_eps = 1.0;
    std::vector<double> w_c;
    std::vector<std::size_t> w_n;
    std::uint64_t w_samples = 1000;
    std::string w_format = "csv";
    add_lambdas(sweep, wo);
    sweep->add_option("--epsilon", w_eps, "shadowing precision (statistics are invariant in it)")
        ->check(CLI::PositiveNumber);
    sweep->add_option("--c-values", w_c, "sweep exponents c")->required()->delimiter(',');
    sweep->add_option("--n-values", w_n, "trajectory lengths")->required()->delimiter(',');
    sweep->add_option("--samples", w_samples, "samples per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", wo.seed, "master seed (default: SKEWSHADOW_SEED or 0)")
        ->default_val(env_seed);
    sweep->add_option("--threads", wo.threads, "worker threads (0 = all available)");
    sweep->add_option("--output", wo.output, "output path (default: stdout)");
    sweep->add_option("--format", w_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    add_config(sweep);
    sweep->callback([&]() {
        const NormalizedParams norm = normalize(validate(wo.lambda0, wo.lambda1));
        const auto cells = phase_sweep(norm, w_eps, w_c, w_n, w_samples, wo.seed, wo.threads);
        emit(wo.output, w_format == "csv" ? sweep_csv(cells) : sweep_json(cells).dump(2) + "\n");
    });

    // ruin
    auto* ruin = app.add_subcommand("ruin", "Monte Carlo ruin probabilities P(min S <= -C)");
    CommonOpts ro;
    std::vector<double> r_cs;
    std::uint64_t r_samples = 100000;
    std::size_t r_horizon = 0;
    add_lambdas(ruin, ro);
    ruin->add_option("--C-values", r_cs, "ruin levels C")->required()->delimiter(',');
    ruin->add_option("--samples", r_samples, "samples per level")->check(CLI::PositiveNumber);
    ruin->add_option("--horizon", r_horizon, "walk horizon (0 = automatic)");
    ruin->add_option("--seed", ro.seed, "master seed (default: SKEWSHADOW_SEED or 0)")
        ->default_val(env_seed);
    ruin->add_option("--threads", ro.threads, "worker threads (0 = all available)");
    ruin->add_option("--output", ro.output, "output path (default: stdout)");
    add_config(ruin);
    ruin->callback([&]() {
        const NormalizedParams norm = normalize(validate(ro.lambda0, ro.lambda1));
        const double b_ref = solve_ruin_exponent(norm).b;
        std::ostringstream os;
        os << "C,horizon,samples,p_hat,ci_low,ci_high,minus_log_p_over_C,b_reference\n";
        for (double c : r_cs) {
            if (!(c > 0.0)) {
                throw std::invalid_argument("ruin: C must be positive");
            }
            const std::size_t horizon = r_horizon ? r_horizon : default_ruin_horizon(norm, c);
            const Estimate e = ruin_probability_mc(norm, c, horizon, r_samples, ro.seed, ro.threads);
            os << format_g17(c) << "," << horizon << "," << e.samples << ","
               << format_g17(e.p_hat) << "," << format_g17(e.ci_low) << ","
               << format_g17(e.ci_high) << "," << format_g17(-std::log(e.p_hat) / c)
               << "," << format_g17(b_ref) << "\n";
        }
        emit(ro.output, os.str());
    });

    // rate
    auto* rate = app.add_subcommand("rate", "large-deviation rate function h(eps)");
    CommonOpts to;
    std::vector<double> t_eps;
    double t_tol = 1e-12;
    add_lambdas(rate, to);
    rate->add_option("--eps-values", t_eps, "deviations eps in (0, v - a0]")->required()->delimiter(',');
    rate->add_option("--tol", t_tol, "maximizer tolerance");
    rate->add_option("--output", to.output, "output path (default: stdout)");
    add_config(rate);
    rate->callback([&]() {
        const NormalizedParams norm = normalize(validate(to.lambda0, to.lambda1));
        std::ostringstream os;
        os << "eps,h\n";
        for (double eps : t_eps) {
            os << format_g17(eps) << "," << format_g17(rate_function(norm, eps, t_tol)) << "\n";
        }
        emit(to.output, os.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConsistencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const InstanceParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
