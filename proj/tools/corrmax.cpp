// corrmax: max-entry statistics of sample correlation matrices, tail-series
// moment oracles, and reproducible Monte Carlo trend experiments.
//
// Exit codes: 0 success, 2 input/config error, 3 data degeneracy (e.g. a
// zero-variance column under the error policy), 4 assertion/verdict failure,
// 5 Monte Carlo refusal (too few expected hits).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrmax/dist.hpp"
#include "corrmax/errors.hpp"
#include "corrmax/matrix.hpp"
#include "corrmax/oracle.hpp"
#include "corrmax/seq.hpp"
#include "corrmax/sims.hpp"
#include "corrmax/stats.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitAssertion = 4;
constexpr int kExitRefusal = 5;

using nlohmann::json;

void apply_thread_cap(int threads) {
    if (threads > 0) {
        omp_set_num_threads(threads);
        return;
    }
    if (const char* env = std::getenv("CORRMAX_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) omp_set_num_threads(t);
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
}

// --- stat ------------------------------------------------------------------

struct StatArgs {
    std::string input;
    std::string statistic = "L";
    std::string zero_variance = "error";
    std::string output;
};

int run_stat(const StatArgs& args) {
    const auto policy = args.zero_variance == "drop" ? corrmax::stats::ZeroVariancePolicy::drop
                                                     : corrmax::stats::ZeroVariancePolicy::error;
    const auto m = corrmax::stats::read_csv(args.input);
    if (m.rows() < 2) throw std::invalid_argument("need at least 2 rows (samples)");
    if (m.cols() < 2) throw std::invalid_argument("need at least 2 columns (variables)");

    if (args.statistic == "W") {
        const auto r = corrmax::stats::w_statistic(m);
        std::printf("W = %.17g at pair (%lld, %lld)\n", r.value, static_cast<long long>(r.i + 1),
                    static_cast<long long>(r.j + 1));
        return kExitOk;
    }
    if (args.statistic != "L" && args.statistic != "corr") {
        throw std::invalid_argument("unknown statistic: " + args.statistic);
    }

    // Reported pair indices always refer to the input file's columns, also
    // when the drop policy removed some.
    const auto [reduced, report] = corrmax::stats::standardize_columns(m, policy);
    std::vector<std::int64_t> original(static_cast<std::size_t>(reduced.cols()));
    {
        std::size_t next_dropped = 0;
        std::int64_t dst = 0;
        for (std::int64_t i = 1; i <= m.cols(); ++i) {
            if (next_dropped < report.zero_variance_cols.size() &&
                report.zero_variance_cols[next_dropped] == i) {
                ++next_dropped;
                continue;
            }
            original[static_cast<std::size_t>(dst++)] = i;
        }
    }
    if (!report.zero_variance_cols.empty()) {
        std::fprintf(stderr, "dropped zero-variance column(s):");
        for (auto c : report.zero_variance_cols) {
            std::fprintf(stderr, " %lld", static_cast<long long>(c));
        }
        std::fprintf(stderr, "\n");
    }
    if (reduced.cols() < 2) {
        throw corrmax::DegenerateDataError("fewer than 2 columns left after drops");
    }

    if (args.statistic == "L") {
        const auto r = corrmax::stats::l_statistic(reduced);
        std::printf("L = %.17g at pair (%lld, %lld)\n", r.value,
                    static_cast<long long>(original[static_cast<std::size_t>(r.i)]),
                    static_cast<long long>(original[static_cast<std::size_t>(r.j)]));
        return kExitOk;
    }

    const auto corr = corrmax::stats::correlation_matrix(reduced);
    if (args.output.empty()) {
        std::printf("i,j,value\n");
        for (std::int64_t i = 0; i < corr.p; ++i) {
            for (std::int64_t j = i + 1; j < corr.p; ++j) {
                std::printf("%lld,%lld,%.17g\n",
                            static_cast<long long>(original[static_cast<std::size_t>(i)]),
                            static_cast<long long>(original[static_cast<std::size_t>(j)]),
                            corr.at(i, j));
            }
        }
    } else {
        // column ids in the file refer to the retained columns in order
        corrmax::stats::write_upper_triangle_csv(args.output, corr.p, corr.upper);
        json manifest;
        manifest["artifact_version"] = kVersion;
        manifest["subcommand"] = "stat";
        manifest["config"] = {{"input", args.input},
                              {"statistic", args.statistic},
                              {"zero_variance_policy", args.zero_variance},
                              {"output", args.output}};
        manifest["outputs"] = {args.output};
        write_file(args.output + ".manifest.json", manifest.dump(2) + "\n");
        std::printf("wrote %s\n", args.output.c_str());
    }
    return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string dist_u;
    std::string dist_v;
    std::string mode; // W, T or empty (inferred)
    double c = 1.0;
    std::string n_list;
    std::int64_t reps = 0;
    double alpha = 0.0;
    bool alpha_set = false;
    std::string norm = "sqrt-nlogn";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = ".";
    std::string expect;
    double band_lo = 1.7;
    double band_hi = 2.2;
    double slack = 0.2;
    int threads = 0;
    std::string config_path;
};

std::vector<std::int64_t> parse_n_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    if (out.empty()) throw std::invalid_argument("empty n grid");
    return out;
}

json config_to_json(const corrmax::sims::SimConfig& cfg) {
    json j;
    j["dist"] = cfg.dist_u.to_string();
    if (cfg.dist_v) j["dist_v"] = cfg.dist_v->to_string();
    j["c"] = cfg.p_rule_c;
    j["n"] = cfg.n_grid;
    j["reps"] = cfg.reps;
    if (cfg.alpha) j["alpha"] = *cfg.alpha;
    j["norm"] = corrmax::sims::to_string(cfg.normalization);
    j["seed"] = cfg.master_seed;
    return j;
}

// Flags override config-file values; the manifest records the resolved union.
corrmax::sims::SimConfig resolve_sim_config(const SimulateArgs& args, const CLI::App* cmd) {
    json file;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + args.config_path);
        json doc = json::parse(in, nullptr, true, true);
        file = doc.contains("config") ? doc["config"] : doc;
    }

    corrmax::sims::SimConfig cfg;
    const bool have = !file.is_null();

    auto flag_given = [&](const std::string& name) { return cmd->count(name) > 0; };

    if (flag_given("--dist")) {
        cfg.dist_u = corrmax::dist::DistributionSpec::parse(args.dist_u);
    } else if (have && file.contains("dist")) {
        cfg.dist_u = corrmax::dist::DistributionSpec::parse(file["dist"].get<std::string>());
    } else {
        throw std::invalid_argument("simulate needs --dist (or a config file with \"dist\")");
    }

    if (flag_given("--dist-v")) {
        cfg.dist_v = corrmax::dist::DistributionSpec::parse(args.dist_v);
    } else if (have && file.contains("dist_v")) {
        cfg.dist_v = corrmax::dist::DistributionSpec::parse(file["dist_v"].get<std::string>());
    }

    if (flag_given("--c")) {
        cfg.p_rule_c = args.c;
    } else if (have && file.contains("c")) {
        cfg.p_rule_c = file["c"].get<double>();
    }

    if (flag_given("--n")) {
        cfg.n_grid = parse_n_list(args.n_list);
    } else if (have && file.contains("n")) {
        cfg.n_grid = file["n"].get<std::vector<std::int64_t>>();
    } else {
        throw std::invalid_argument("simulate needs --n");
    }

    if (flag_given("--reps")) {
        cfg.reps = args.reps;
    } else if (have && file.contains("reps")) {
        cfg.reps = file["reps"].get<std::int64_t>();
    } else {
        throw std::invalid_argument("simulate needs --reps");
    }

    if (flag_given("--alpha")) {
        cfg.alpha = args.alpha;
    } else if (have && file.contains("alpha")) {
        cfg.alpha = file["alpha"].get<double>();
    }

    if (flag_given("--norm")) {
        cfg.normalization = corrmax::sims::normalization_from_string(args.norm);
    } else if (have && file.contains("norm")) {
        cfg.normalization =
            corrmax::sims::normalization_from_string(file["norm"].get<std::string>());
    }

    if (flag_given("--seed")) {
        cfg.master_seed = args.seed;
    } else if (have && file.contains("seed")) {
        cfg.master_seed = file["seed"].get<std::uint64_t>();
    } else {
        throw std::invalid_argument("simulate needs --seed: all randomness flows from it");
    }

    if (!args.mode.empty()) {
        if (args.mode == "T" && !cfg.dist_v)
            throw std::invalid_argument("--mode T needs --dist-v");
        if (args.mode == "W" && cfg.dist_v)
            throw std::invalid_argument("--mode W conflicts with --dist-v");
        if (args.mode != "T" && args.mode != "W")
            throw std::invalid_argument("mode must be W or T");
    }
    return cfg;
}

int run_simulate(const SimulateArgs& args, const CLI::App* cmd) {
    apply_thread_cap(args.threads);
    const auto cfg = resolve_sim_config(args, cmd);
    corrmax::sims::validate(cfg);

    const auto result = corrmax::sims::run_experiment(cfg);
    const auto summary = corrmax::sims::summarize(result);

    namespace fs = std::filesystem;
    fs::create_directories(args.out_dir);
    const std::string records_path = (fs::path(args.out_dir) / "records.csv").string();
    const std::string summary_path = (fs::path(args.out_dir) / "summary.csv").string();
    const std::string plot_path = (fs::path(args.out_dir) / "plot.dat").string();
    const std::string manifest_path = (fs::path(args.out_dir) / "manifest.json").string();

    corrmax::sims::write_records_csv(records_path, result);
    corrmax::sims::write_summary_csv(summary_path, summary);
    corrmax::sims::write_plot_data(plot_path, summary);

    json manifest;
    manifest["artifact_version"] = kVersion;
    manifest["subcommand"] = "simulate";
    manifest["config"] = config_to_json(cfg);
    manifest["master_seed"] = cfg.master_seed;
    manifest["outputs"] = {records_path, summary_path, plot_path};
    write_file(manifest_path, manifest.dump(2) + "\n");

    for (const auto& row : summary) {
        std::printf("n=%-8lld median=%.6g q05=%.6g q95=%.6g\n", static_cast<long long>(row.n),
                    row.median, row.q05, row.q95);
    }

    if (!args.expect.empty()) {
        corrmax::sims::TrendOptions opt;
        opt.band_lo = args.band_lo;
        opt.band_hi = args.band_hi;
        opt.slack = args.slack;
        const auto trend = corrmax::sims::trend_assert(
            result, corrmax::sims::trend_from_string(args.expect), opt);
        std::printf("expect %s: %s\n%s\n", args.expect.c_str(), trend.pass ? "PASS" : "FAIL",
                    trend.message.c_str());
        if (!trend.pass) return kExitAssertion;
    }
    return kExitOk;
}

// --- oracle ------------------------------------------------------------------

struct OracleArgs {
    std::string subcheck;
    std::string dist;
    std::string alpha_seq = "const1";
    std::string beta_seq = "linear";
    std::int64_t n_terms = 100000;
    double alpha = 0.0;
    double beta = 0.0;
    int m = 2;
    std::string u_seq = "linear";
    std::int64_t n = 10;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    int threads = 0;
};

int run_oracle(const OracleArgs& args, const CLI::App* cmd) {
    apply_thread_cap(args.threads);
    const auto d = corrmax::dist::DistributionSpec::parse(args.dist);

    std::string payload;
    bool ok = false;

    // JSON goes to stdout; a short aligned table lands on stderr for humans.
    if (args.subcheck == "sandwich") {
        const auto alpha = corrmax::seq::parse(args.alpha_seq, args.n_terms);
        const auto beta = corrmax::seq::parse(args.beta_seq, args.n_terms);
        const auto rep = corrmax::oracle::sandwich_check(d, alpha, beta, args.n_terms);
        payload = rep.to_json();
        ok = rep.verdict == corrmax::oracle::Verdict::holds;
        std::fprintf(stderr, "%-10s %-22s %-13s %12s %12s %12s\n", "check", "dist", "verdict",
                     "lower", "E|X|", "upper");
        std::fprintf(stderr, "%-10s %-22s %-13s %12.6g %12.6g %12.6g\n", "sandwich",
                     d.to_string().c_str(), corrmax::oracle::to_string(rep.verdict).c_str(),
                     rep.lower_sum, rep.exact_moment, rep.upper_bound);
    } else if (args.subcheck == "series") {
        const auto rep = corrmax::oracle::series_classify(d, args.alpha, args.beta);
        payload = rep.to_json();
        ok = rep.agree;
        std::fprintf(stderr, "%-10s %-22s %-13s %-10s %-6s\n", "check", "dist", "series",
                     "moment", "agree");
        std::fprintf(stderr, "%-10s %-22s %-13s %-10s %-6s\n", "series", d.to_string().c_str(),
                     corrmax::oracle::to_string(rep.series).c_str(),
                     corrmax::oracle::to_string(rep.moment).c_str(), rep.agree ? "yes" : "no");
    } else if (args.subcheck == "lemma1") {
        if (cmd->count("--seed") == 0)
            throw std::invalid_argument("oracle lemma1 needs --seed: no silent nondeterminism");
        if (args.reps < 1) throw std::invalid_argument("oracle lemma1 needs --reps");
        const auto u = corrmax::seq::parse(args.u_seq, args.n);
        const auto rep =
            corrmax::oracle::lemma1_ratio(d, args.m, u, args.n, args.reps, args.seed);
        payload = rep.to_json();
        // Sub-additivity: the ratio may not sit above 1 beyond noise.
        ok = rep.ratio <= 1.0 + 3.0 * rep.ci_half_width;
        std::fprintf(stderr, "%-10s %-22s %12s %12s %12s\n", "check", "dist", "ratio", "ci",
                     "hits");
        std::fprintf(stderr, "%-10s %-22s %12.6f %12.6f %12lld\n", "lemma1",
                     d.to_string().c_str(), rep.ratio, rep.ci_half_width,
                     static_cast<long long>(rep.hits));
    } else if (args.subcheck == "sqrt-nlogn") {
        const auto rep = corrmax::oracle::sqrt_nlogn_condition(d, args.m);
        payload = rep.to_json();
        ok = rep.agree;
        std::fprintf(stderr, "%-10s %-22s %-13s %-10s %-6s %-8s\n", "check", "dist", "series",
                     "moment", "agree", "boundary");
        std::fprintf(stderr, "%-10s %-22s %-13s %-10s %-6s %-8s\n", "sqrt-nlogn",
                     d.to_string().c_str(), corrmax::oracle::to_string(rep.series).c_str(),
                     corrmax::oracle::to_string(rep.moment).c_str(), rep.agree ? "yes" : "no",
                     rep.boundary ? "yes" : "no");
    } else {
        throw std::invalid_argument("unknown oracle subcheck: " + args.subcheck);
    }

    std::printf("%s\n", payload.c_str());
    if (!args.out.empty()) {
        write_file(args.out, payload + "\n");
        json manifest;
        manifest["artifact_version"] = kVersion;
        manifest["subcommand"] = "oracle " + args.subcheck;
        manifest["config"] = {{"dist", d.to_string()}, {"alpha_seq", args.alpha_seq},
                              {"beta_seq", args.beta_seq}, {"N", args.n_terms},
                              {"alpha", args.alpha},       {"beta", args.beta},
                              {"m", args.m},               {"u", args.u_seq},
                              {"n", args.n},               {"reps", args.reps}};
        manifest["master_seed"] = args.seed;
        manifest["outputs"] = {args.out};
        write_file(args.out + ".manifest.json", manifest.dump(2) + "\n");
    }
    return ok ? kExitOk : kExitAssertion;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"max-entry correlation statistics, moment oracles, and limit simulations"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    StatArgs stat_args;
    auto* stat = app.add_subcommand("stat", "compute L, W, or the correlation matrix from a CSV");
    stat->add_option("-i,--input", stat_args.input, "input CSV, rows = samples")->required();
    stat->add_option("-s,--statistic", stat_args.statistic, "statistic: L, W, or corr")
        ->check(CLI::IsMember({"L", "W", "corr"}));
    stat->add_option("--zero-variance-policy", stat_args.zero_variance,
                     "zero-variance column policy: error or drop")
        ->check(CLI::IsMember({"error", "drop"}));
    stat->add_option("-o,--output", stat_args.output, "output CSV path (corr only)");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo trends of normalized W_n / T_n");
    sim->add_option("--dist", sim_args.dist_u, "distribution, e.g. pareto(a=3.2)");
    sim->add_option("--dist-v", sim_args.dist_v, "second distribution (enables T_n mode)");
    sim->add_option("--mode", sim_args.mode, "statistic mode: W or T (inferred from --dist-v)");
    sim->add_option("--c", sim_args.c, "p rule: p_n = round(c n)");
    sim->add_option("--n", sim_args.n_list, "comma-separated strictly increasing n grid");
    sim->add_option("--reps", sim_args.reps, "replications per n");
    sim->add_option("--alpha", sim_args.alpha, "power-normalization exponent in (1/2, 1]");
    sim->add_option("--norm", sim_args.norm, "normalizer: power or sqrt-nlogn")
        ->check(CLI::IsMember({"power", "sqrt-nlogn"}));
    sim->add_option("--seed", sim_args.seed, "master seed (required; sole source of randomness)");
    sim->add_option("--out-dir", sim_args.out_dir, "output directory");
    sim->add_option("--expect", sim_args.expect,
                    "assert a trend: to_zero, to_two, bounded_by_two, diverges")
        ->check(CLI::IsMember({"to_zero", "to_two", "bounded_by_two", "diverges"}));
    sim->add_option("--band-lo", sim_args.band_lo, "to_two acceptance band lower edge");
    sim->add_option("--band-hi", sim_args.band_hi, "to_two acceptance band upper edge");
    sim->add_option("--slack", sim_args.slack, "bounded_by_two slack above 2");
    sim->add_option("--threads", sim_args.threads, "OpenMP thread cap (or env CORRMAX_THREADS)");
    sim->add_option("--config", sim_args.config_path,
                    "JSON config (a manifest works); flags override file values");

    OracleArgs oracle_args;
    auto* orc = app.add_subcommand("oracle", "tail-series and moment equivalence checks");
    orc->add_option("subcheck", oracle_args.subcheck,
                    "one of: sandwich, series, lemma1, sqrt-nlogn")
        ->required()
        ->check(CLI::IsMember({"sandwich", "series", "lemma1", "sqrt-nlogn"}));
    orc->add_option("--dist", oracle_args.dist, "distribution, e.g. pareto(a=2)")->required();
    orc->add_option("--alpha-seq", oracle_args.alpha_seq,
                    "sandwich weight sequence (pow:E, powlog:E, const:V, explicit:...)");
    orc->add_option("--beta-seq", oracle_args.beta_seq, "sandwich threshold sequence");
    orc->add_option("--N", oracle_args.n_terms, "partial-sum length for sandwich");
    orc->add_option("--alpha", oracle_args.alpha, "series exponent alpha > 0");
    orc->add_option("--beta", oracle_args.beta, "series exponent beta > 0");
    orc->add_option("--m", oracle_args.m, "product order m");
    orc->add_option("--u", oracle_args.u_seq, "threshold sequence for lemma1");
    orc->add_option("--n", oracle_args.n, "sample length n for lemma1");
    orc->add_option("--reps", oracle_args.reps, "Monte Carlo replications for lemma1");
    orc->add_option("--seed", oracle_args.seed, "master seed (required for lemma1)");
    orc->add_option("-o,--out", oracle_args.out, "write the JSON report to this path");
    orc->add_option("--threads", oracle_args.threads, "OpenMP thread cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (stat->parsed()) return run_stat(stat_args);
        if (sim->parsed()) return run_simulate(sim_args, sim);
        if (orc->parsed()) return run_oracle(oracle_args, orc);
        return kExitInput;
    } catch (const corrmax::DegenerateDataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const corrmax::RefusalError& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return kExitRefusal;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
}
