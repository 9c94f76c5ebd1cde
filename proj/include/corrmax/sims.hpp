#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrmax/dist.hpp"

namespace corrmax::sims {

enum class Normalization { power, sqrt_nlogn };
enum class Trend { to_zero, to_two, bounded_by_two, diverges };

std::string to_string(Normalization n);
std::string to_string(Trend t);
Normalization normalization_from_string(const std::string& s);
Trend trend_from_string(const std::string& s);

// One Monte Carlo experiment: draw fresh n x p_n arrays per (n, rep), compute
// W_n (or T_n when dist_v is set), and record the normalized ratio. p_n is
// round(c * n), which keeps n/p_n bounded away from 0 and infinity.
struct SimConfig {
    dist::DistributionSpec dist_u;
    std::optional<dist::DistributionSpec> dist_v; // set => T_n mode
    double p_rule_c = 1.0;
    std::vector<std::int64_t> n_grid;
    std::int64_t reps = 1;
    std::optional<double> alpha; // required for power normalization
    Normalization normalization = Normalization::sqrt_nlogn;
    std::uint64_t master_seed = 0;

    bool t_mode() const { return dist_v.has_value(); }
};

// Throws std::invalid_argument on violated invariants: n_grid not strictly
// increasing, reps < 1, alpha outside (1/2, 1] in power mode, n < 3 in
// sqrt-nlogn mode, p_n < 2 anywhere on the grid.
void validate(const SimConfig& cfg);

std::int64_t p_of_n(const SimConfig& cfg, std::int64_t n);
double normalizer(const SimConfig& cfg, std::int64_t n);

struct SimRecord {
    std::int64_t n = 0;
    std::int64_t rep = 0;
    double statistic = 0.0;
    double ratio = 0.0;
};

struct SimResult {
    SimConfig config;
    std::vector<SimRecord> records; // ordered by (grid position, rep)
};

// Deterministic for a fixed master_seed regardless of the OpenMP thread
// count: each (n, rep) task derives its own rng stream and writes its own
// slot.
SimResult run_experiment(const SimConfig& cfg);

struct SummaryRow {
    std::int64_t n = 0;
    double median = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
};

// Per-n medians and 5%/95% quantiles, linear interpolation (type 7).
std::vector<SummaryRow> summarize(const SimResult& result);

// Type-7 quantile of a sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double p);

struct TrendOptions {
    double band_lo = 1.7;  // to_two acceptance band
    double band_hi = 2.2;
    double slack = 0.2;    // bounded_by_two: q95 at final n <= 2 + slack
};

struct TrendReport {
    bool pass = false;
    std::string message;
    std::vector<double> medians;
};

// Checks the configured trend of the per-n medians (>= 3 grid points):
//   to_zero        strictly decreasing medians, final < 0.5 * first
//   to_two         final median in [band_lo, band_hi] and |median - 2|
//                  nonincreasing over the last two grid points
//   bounded_by_two q95 at final n <= 2 + slack
//   diverges       final median > 2 * first median
TrendReport trend_assert(const SimResult& result, Trend expectation, TrendOptions opt = {});

// CSV / plot-data exports; all numbers printed with %.17g so identical
// results produce identical bytes.
void write_records_csv(const std::string& path, const SimResult& result);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
void write_plot_data(const std::string& path, const std::vector<SummaryRow>& rows);

} // namespace corrmax::sims
