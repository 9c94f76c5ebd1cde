#include "corrmax/sims.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "corrmax/matrix.hpp"
#include "corrmax/stats.hpp"

namespace corrmax::sims {

std::string to_string(Normalization n) {
    return n == Normalization::power ? "power" : "sqrt-nlogn";
}

std::string to_string(Trend t) {
    switch (t) {
        case Trend::to_zero: return "to_zero";
        case Trend::to_two: return "to_two";
        case Trend::bounded_by_two: return "bounded_by_two";
        case Trend::diverges: return "diverges";
    }
    return "?";
}

Normalization normalization_from_string(const std::string& s) {
    if (s == "power") return Normalization::power;
    if (s == "sqrt-nlogn" || s == "sqrtnlogn") return Normalization::sqrt_nlogn;
    throw std::invalid_argument("unknown normalization: " + s);
}

Trend trend_from_string(const std::string& s) {
    if (s == "to_zero") return Trend::to_zero;
    if (s == "to_two") return Trend::to_two;
    if (s == "bounded_by_two") return Trend::bounded_by_two;
    if (s == "diverges") return Trend::diverges;
    throw std::invalid_argument("unknown trend expectation: " + s);
}

std::int64_t p_of_n(const SimConfig& cfg, std::int64_t n) {
    return static_cast<std::int64_t>(std::llround(cfg.p_rule_c * static_cast<double>(n)));
}

double normalizer(const SimConfig& cfg, std::int64_t n) {
    if (cfg.normalization == Normalization::power) {
        return std::pow(static_cast<double>(n), *cfg.alpha);
    }
    return std::sqrt(static_cast<double>(n) * std::log(static_cast<double>(n)));
}

void validate(const SimConfig& cfg) {
    dist::validate(cfg.dist_u);
    if (cfg.dist_v) dist::validate(*cfg.dist_v);
    if (cfg.n_grid.empty()) throw std::invalid_argument("empty n grid");
    for (std::size_t i = 0; i + 1 < cfg.n_grid.size(); ++i) {
        if (cfg.n_grid[i] >= cfg.n_grid[i + 1])
            throw std::invalid_argument("n grid must be strictly increasing");
    }
    if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (cfg.normalization == Normalization::power) {
        if (!cfg.alpha) throw std::invalid_argument("power normalization needs alpha");
        if (!(*cfg.alpha > 0.5) || !(*cfg.alpha <= 1.0))
            throw std::invalid_argument("alpha must lie in (1/2, 1]");
    }
    if (cfg.normalization == Normalization::sqrt_nlogn && cfg.n_grid.front() < 3)
        throw std::invalid_argument("sqrt-nlogn normalization needs n >= 3");
    for (std::int64_t n : cfg.n_grid) {
        if (n < 2) throw std::invalid_argument("n must be >= 2");
        if (p_of_n(cfg, n) < 2)
            throw std::invalid_argument("p_n = round(c n) must be >= 2 on the whole grid");
    }
}

namespace {

stats::DataMatrix draw_matrix(const dist::DistributionSpec& d, std::int64_t n, std::int64_t p,
                              rng::Stream& stream) {
    stats::DataMatrix m(n, p);
    dist::sample(d, std::span<double>(m.data()), stream);
    return m;
}

} // namespace

SimResult run_experiment(const SimConfig& cfg) {
    validate(cfg);

    SimResult result;
    result.config = cfg;
    const std::int64_t levels = static_cast<std::int64_t>(cfg.n_grid.size());
    const std::int64_t tasks = levels * cfg.reps;
    result.records.resize(static_cast<std::size_t>(tasks));

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < tasks; ++t) {
        const std::int64_t gi = t / cfg.reps;
        const std::int64_t rep = t % cfg.reps;
        const std::int64_t n = cfg.n_grid[static_cast<std::size_t>(gi)];
        const std::int64_t p = p_of_n(cfg, n);

        auto stream_u = rng::Stream::derive(
            cfg.master_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep), 0});
        const auto u = draw_matrix(cfg.dist_u, n, p, stream_u);

        double stat = 0.0;
        if (cfg.t_mode()) {
            auto stream_v = rng::Stream::derive(
                cfg.master_seed,
                {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep), 1});
            const auto v = draw_matrix(*cfg.dist_v, n, p, stream_v);
            stat = stats::t_statistic(u, v).value;
        } else {
            stat = stats::w_statistic(u).value;
        }

        result.records[static_cast<std::size_t>(t)] = {n, rep, stat, stat / normalizer(cfg, n)};
    }
    return result;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (sorted.size() == 1) return sorted.front();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::vector<SummaryRow> summarize(const SimResult& result) {
    if (result.records.empty()) throw std::invalid_argument("empty simulation result");
    const auto& cfg = result.config;
    std::vector<SummaryRow> rows;
    rows.reserve(cfg.n_grid.size());
    for (std::size_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        std::vector<double> ratios;
        ratios.reserve(static_cast<std::size_t>(cfg.reps));
        for (std::int64_t r = 0; r < cfg.reps; ++r) {
            ratios.push_back(result.records[gi * cfg.reps + static_cast<std::size_t>(r)].ratio);
        }
        std::sort(ratios.begin(), ratios.end());
        rows.push_back({cfg.n_grid[gi], quantile_sorted(ratios, 0.5), quantile_sorted(ratios, 0.05),
                        quantile_sorted(ratios, 0.95)});
    }
    return rows;
}

TrendReport trend_assert(const SimResult& result, Trend expectation, TrendOptions opt) {
    const auto rows = summarize(result);
    if (rows.size() < 3) throw std::invalid_argument("trend_assert needs at least 3 grid points");

    TrendReport rep;
    for (const auto& r : rows) rep.medians.push_back(r.median);

    std::ostringstream os;
    os << "medians:";
    for (double m : rep.medians) os << ' ' << m;

    const double first = rep.medians.front();
    const double last = rep.medians.back();

    switch (expectation) {
        case Trend::to_zero: {
            bool decreasing = true;
            for (std::size_t i = 0; i + 1 < rep.medians.size(); ++i) {
                if (!(rep.medians[i + 1] < rep.medians[i])) decreasing = false;
            }
            rep.pass = decreasing && last < 0.5 * first;
            os << " | to_zero: strictly decreasing=" << (decreasing ? "yes" : "no")
               << ", final/first=" << (last / first) << " (need < 0.5)";
            break;
        }
        case Trend::to_two: {
            const std::size_t k = rep.medians.size();
            const double gap_prev = std::fabs(rep.medians[k - 2] - 2.0);
            const double gap_last = std::fabs(rep.medians[k - 1] - 2.0);
            const bool in_band = last >= opt.band_lo && last <= opt.band_hi;
            rep.pass = in_band && gap_last <= gap_prev;
            os << " | to_two: final=" << last << " in [" << opt.band_lo << ", " << opt.band_hi
               << "]=" << (in_band ? "yes" : "no") << ", |median-2| " << gap_prev << " -> "
               << gap_last;
            break;
        }
        case Trend::bounded_by_two: {
            const double q95 = rows.back().q95;
            rep.pass = q95 <= 2.0 + opt.slack;
            os << " | bounded_by_two: q95(final)=" << q95 << " (need <= " << 2.0 + opt.slack
               << ")";
            break;
        }
        case Trend::diverges: {
            rep.pass = last > 2.0 * first;
            os << " | diverges: final/first=" << (last / first) << " (need > 2)";
            break;
        }
    }
    rep.message = os.str();
    return rep;
}

void write_records_csv(const std::string& path, const SimResult& result) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    std::fprintf(f, "n,rep,statistic,ratio\n");
    for (const auto& r : result.records) {
        std::fprintf(f, "%lld,%lld,%.17g,%.17g\n", static_cast<long long>(r.n),
                     static_cast<long long>(r.rep), r.statistic, r.ratio);
    }
    std::fclose(f);
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    std::fprintf(f, "n,median,q05,q95\n");
    for (const auto& r : rows) {
        std::fprintf(f, "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(r.n), r.median, r.q05,
                     r.q95);
    }
    std::fclose(f);
}

void write_plot_data(const std::string& path, const std::vector<SummaryRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    std::fprintf(f, "# n median_ratio\n");
    for (const auto& r : rows) {
        std::fprintf(f, "%lld %.17g\n", static_cast<long long>(r.n), r.median);
    }
    std::fclose(f);
}

} // namespace corrmax::sims
