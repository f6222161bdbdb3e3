#include "mcorr/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "mcorr/asymptotics.hpp"
#include "mcorr/csv.hpp"
#include "mcorr/datagen.hpp"
#include "mcorr/error.hpp"
#include "mcorr/parallel.hpp"
#include "mcorr/resampling.hpp"
#include "mcorr/simulate.hpp"

namespace mcorr {

namespace {

EstimateOptions estimate_options(const RunConfig& config) {
    return {.kappa = {.assume_zero_mean = config.zero_mean}, .exec = Execution::Parallel};
}

Record warnings_record(const Warnings& warnings) {
    Record out = Record::array();
    for (const auto& w : warnings) out.push_back(w);
    return out;
}

Record ci_record(const ConfidenceInterval& ci, const std::string& method) {
    return Record{{"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}, {"method", method}};
}

Record test_record(double z, double p_value, const std::string& method) {
    return Record{{"z", z}, {"p_value", p_value}, {"method", method}};
}

// Shared skeleton of the data commands; ci and test default to the
// asymptotic versions and individual commands overwrite them.
Record base_record(const DataMatrix& data, const RunConfig& config, const PsiEstimate& est) {
    Record r;
    r["command"] = config.command;
    r["n"] = data.n();
    r["p"] = data.p();
    r["psi_hat"] = est.psi_hat;
    r["psi_bc"] = est.psi_bc;
    r["kappa_hat"] = est.kappa_hat;
    r["tau_hat"] = est.tau_hat;
    r["eta_hat"] = est.eta_hat;
    r["delta_hat"] = est.delta_hat;
    r["sigma_hat"] = est.sigma_hat;
    r["ci"] = ci_record(asymptotic_ci(est.psi_bc, est.sigma_hat, config.level), "asymptotic");
    const double z = z_statistic(est.psi_hat, est.n, est.p);
    const TestResult t = z_test_pvalue(z);
    r["test"] = test_record(t.z, t.p_value, "asymptotic");
    r["warnings"] = warnings_record(est.warnings);
    r["seed"] = config.seed;
    r["config"] = config_record(config);
    return r;
}

void append_warning(Record& r, const std::string& w) { r["warnings"].push_back(w); }

ResampleMethod resample_method(const std::string& method) {
    return method == "bootstrap" ? ResampleMethod::BootstrapWithReplacement
                                 : ResampleMethod::PermutationNoReplacement;
}

void require_method(const RunConfig& config, std::initializer_list<const char*> allowed) {
    const std::string method = resolved_method(config);
    for (const char* a : allowed) {
        if (method == a) return;
    }
    throw InvalidParameterError("method '" + method + "' is not available for " + config.command);
}

void flatten(const Record& node, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
    if (node.is_object()) {
        for (const auto& [key, value] : node.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, out);
        }
        return;
    }
    if (node.is_array()) {
        std::string joined;
        for (std::size_t i = 0; i < node.size(); ++i) {
            if (i) joined += ';';
            joined += node[i].is_string() ? node[i].get<std::string>() : node[i].dump();
        }
        out.emplace_back(prefix, joined);
        return;
    }
    out.emplace_back(prefix, node.is_string() ? node.get<std::string>() : node.dump());
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string resolved_method(const RunConfig& config) {
    if (!config.method.empty()) return config.method;
    if (config.command == "samc") return "samc";
    return "asymptotic";
}

Record config_record(const RunConfig& config) {
    Record c;
    c["command"] = config.command;
    c["input"] = config.input;
    c["header"] = config.header;
    c["format"] = config.format;
    c["output"] = config.output;
    c["seed"] = config.seed;
    c["method"] = resolved_method(config);
    c["level"] = config.level;
    c["reps"] = config.reps;
    c["zero_mean"] = config.zero_mean;
    c["threads"] = config.threads;
    c["varpi"] = config.samc.varpi;
    c["m"] = config.samc.m;
    c["t0"] = config.samc.t0;
    c["T"] = config.samc.T;
    c["chains"] = config.chains;
    c["incremental"] = config.samc.incremental;
    c["case"] = config.covariance_case;
    c["psi"] = config.psi;
    c["p"] = config.p ? Record(*config.p) : Record();
    c["q"] = config.q ? Record(*config.q) : Record();
    c["n"] = config.n;
    c["dist"] = config.dist;
    return c;
}

Record cmd_estimate(const DataMatrix& data, const RunConfig& config) {
    return base_record(data, config, full_estimate(data, estimate_options(config)));
}

Record cmd_ci(const DataMatrix& data, const RunConfig& config) {
    require_method(config, {"asymptotic", "bootstrap"});
    const PsiEstimate est = full_estimate(data, estimate_options(config));
    Record r = base_record(data, config, est);
    if (resolved_method(config) == "bootstrap") {
        const ConfidenceInterval ci = bootstrap_ci(data, config.reps, config.level, config.seed);
        r["ci"] = ci_record(ci, "bootstrap");
        if (ci.clamped) append_warning(r, "bootstrap percentile endpoint clamped into [0, 1]");
    }
    return r;
}

Record cmd_test(const DataMatrix& data, const RunConfig& config) {
    require_method(config, {"asymptotic", "permutation", "bootstrap", "samc"});
    const std::string method = resolved_method(config);
    if (method == "samc") return cmd_samc(data, config);
    const PsiEstimate est = full_estimate(data, estimate_options(config));
    Record r = base_record(data, config, est);
    if (method == "asymptotic") return r;
    const ResamplePlan plan{resample_method(method), config.reps, config.seed};
    const NullResampleResult res = null_resample_test(data, plan);
    r["test"] = test_record(res.z_observed, res.p_value, method);
    r["test"]["exceedances"] = res.exceedances;
    r["test"]["replications"] = res.replications;
    return r;
}

Record cmd_samc(const DataMatrix& data, const RunConfig& config) {
    const PsiEstimate est = full_estimate(data, estimate_options(config));
    Record r = base_record(data, config, est);
    const SamcChains runs = samc_chains(data, config.samc, config.chains);
    r["test"] = test_record(runs.chains.front().z_observed, runs.median_p_value, "samc");
    Record chains = Record::array();
    for (std::size_t c = 0; c < runs.chains.size(); ++c) {
        const SamcResult& s = runs.chains[c];
        chains.push_back(Record{{"seed", runs.seeds[c]},
                                {"p_value", s.p_value},
                                {"acceptance_rate", s.acceptance_rate},
                                {"empty_regions", s.empty_regions},
                                {"iterations", s.iterations}});
    }
    r["test"]["chains"] = std::move(chains);
    return r;
}

Record cmd_simulate(const RunConfig& config) {
    CoverageDesign design;
    design.kind = parse_covariance_case(config.covariance_case);
    design.psi = config.psi;
    design.p = config.p;
    design.q = config.q;
    design.n = config.n;
    design.dist = parse_distribution(config.dist);
    design.reps = config.reps;
    design.level = config.level;
    design.seed = config.seed;
    const CoverageReport rep = run_coverage(design);

    Record r;
    r["command"] = "simulate";
    r["case"] = std::string(to_string(design.kind));
    r["dist"] = std::string(to_string(design.dist));
    r["n"] = design.n;
    r["p"] = rep.p;
    r["psi"] = rep.psi_true;
    r["phi"] = rep.phi;
    r["reps"] = design.reps;
    r["level"] = design.level;
    r["coverage_pct"] = rep.coverage_pct;
    r["avg_length"] = rep.avg_length;
    r["mc_stderr"] = rep.mc_stderr;
    r["mean_psi_hat"] = rep.mean_psi_hat;
    r["mean_psi_bc"] = rep.mean_psi_bc;
    r["mae_psi_hat"] = rep.mae_psi_hat;
    r["mae_psi_bc"] = rep.mae_psi_bc;
    r["runtime"] = rep.runtime_seconds;
    r["warnings"] = warnings_record(rep.warnings);
    r["seed"] = config.seed;
    r["config"] = config_record(config);
    return r;
}

Record run_command(const RunConfig& config) {
    if (config.command == "simulate") return cmd_simulate(config);
    if (config.input.empty()) throw InvalidParameterError(config.command + " needs --input");
    const DataMatrix data = ingest_csv(config.input, config.header);
    if (config.command == "estimate") return cmd_estimate(data, config);
    if (config.command == "ci") return cmd_ci(data, config);
    if (config.command == "test") return cmd_test(data, config);
    if (config.command == "samc") return cmd_samc(data, config);
    throw InvalidParameterError("unknown command '" + config.command + "'");
}

std::string render(const Record& record, const std::string& format) {
    if (format == "json") return record.dump(2) + "\n";
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(record, "", cells);
    std::ostringstream os;
    if (format == "csv") {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i].first);
        os << '\n';
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i].second);
        os << '\n';
        return os.str();
    }
    if (format == "table") {
        std::size_t width = 0;
        for (const auto& c : cells) width = std::max(width, c.first.size());
        for (const auto& [key, value] : cells) os << std::left << std::setw(static_cast<int>(width) + 2) << key << value << '\n';
        return os.str();
    }
    throw InvalidParameterError("unknown output format '" + format + "'");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"Dependent-variable-free multiple correlation: estimation, intervals and independence tests"};
    app.add_option("command", config.command, "estimate | ci | test | samc | simulate")
        ->required()
        ->check(CLI::IsMember({"estimate", "ci", "test", "samc", "simulate"}));
    app.add_option("--input", config.input, "CSV file, rows are observations");
    app.add_flag("--header,!--no-header", config.header, "first CSV row holds column names (default on)");
    app.add_option("--format", config.format, "json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--output", config.output, "write the record here instead of stdout");
    app.add_option("--seed", config.seed, "RNG seed");
    app.add_option("--method", config.method, "ci: asymptotic|bootstrap; test: asymptotic|permutation|bootstrap|samc");
    app.add_option("--level", config.level, "confidence level")->check(CLI::Range(0.0, 1.0));
    app.add_option("--reps", config.reps, "resamples or simulation replications");
    app.add_flag("--zero-mean", config.zero_mean, "estimate kappa without centering the columns");
    app.add_option("--threads", config.threads, "worker threads (default: all cores)");
    app.add_option("--varpi", config.samc.varpi, "SAMC proportion of rows/columns updated");
    app.add_option("--m", config.samc.m, "SAMC subregions");
    app.add_option("--t0", config.samc.t0, "SAMC gain constant");
    app.add_option("--T", config.samc.T, "SAMC iterations");
    app.add_option("--chains", config.chains, "independent SAMC chains");
    app.add_flag("--incremental", config.samc.incremental, "SAMC: update the correlation matrix incrementally");
    app.add_option("--case", config.covariance_case, "simulate: 1 (AR), 2 (compound symmetry), 3 (M-dependent)");
    app.add_option("--psi", config.psi, "simulate: target psi");
    app.add_option("--p", config.p, "simulate: dimension");
    app.add_option("--q", config.q, "simulate: ratio p/n");
    app.add_option("--n", config.n, "simulate: sample size");
    app.add_option("--dist", config.dist, "simulate: normal | beta66 | t6 | t4 | mixed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Usage);
    }

    try {
        set_threads(config.threads);
        if (config.command == "simulate" && !config.p && !config.q) config.p = 10;
        const Record record = run_command(config);
        for (const auto& w : record["warnings"]) err << "warning: " << w.get<std::string>() << '\n';
        const std::string text = render(record, config.format);
        if (config.output.empty()) {
            out << text;
        } else {
            std::ofstream file(config.output);
            if (!file) throw InvalidParameterError("cannot write '" + config.output + "'");
            file << text;
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Numeric);
    }
}

}  // namespace mcorr
