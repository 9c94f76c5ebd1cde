// Acceptance suite: one PASS/FAIL line per criterion, exit code = number of
// failed criteria. Tolerances and seeds are frozen from pilot runs on the
// reference 2-core build machine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <omp.h>

#include "corrmax/dist.hpp"
#include "corrmax/oracle.hpp"
#include "corrmax/rng.hpp"
#include "corrmax/seq.hpp"
#include "corrmax/sims.hpp"
#include "corrmax/stats.hpp"

using namespace corrmax;

namespace {

int g_failures = 0;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void report(int id, const char* name, bool pass, double seconds, const std::string& detail) {
    std::printf("%s  criterion %d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", id, name, seconds,
                detail.c_str());
    if (!pass) ++g_failures;
}

stats::DataMatrix random_matrix(std::int64_t n, std::int64_t p, std::uint64_t seed,
                                const dist::DistributionSpec& d) {
    stats::DataMatrix m(n, p);
    auto stream = rng::Stream::derive(seed, {static_cast<std::uint64_t>(n),
                                             static_cast<std::uint64_t>(p)});
    dist::sample(d, std::span<double>(m.data()), stream);
    return m;
}

// --- criterion 1: tail-series sandwich holds across the configuration grid --

void criterion_1() {
    const double t0 = now_seconds();
    const std::vector<dist::DistributionSpec> dists = {
        dist::DistributionSpec::pareto(1.5), dist::DistributionSpec::pareto(2.0),
        dist::DistributionSpec::pareto(4.0), dist::DistributionSpec::gaussian(),
        dist::DistributionSpec::rademacher()};
    struct SeqPair {
        seq::SequenceSpec alpha, beta;
        double alpha_exp; // exponent of the power pair, < 0 for the unit pair
    };
    const std::vector<SeqPair> pairs = {
        {seq::SequenceSpec::power(0.0), seq::SequenceSpec::power(1.0), -1.0},
        {seq::SequenceSpec::power(0.6), seq::SequenceSpec::power(1.6), 0.6},
        {seq::SequenceSpec::power(1.0), seq::SequenceSpec::power(2.0), 1.0},
    };

    int configs = 0;
    int holds = 0;
    std::string note;
    for (const auto& d : dists) {
        for (const auto& sp : pairs) {
            const std::int64_t n_terms =
                d.family == dist::Family::pareto ? 1000000 : 100000;
            const auto rep = oracle::sandwich_check(d, sp.alpha, sp.beta, n_terms);
            ++configs;
            bool ok = rep.verdict == oracle::Verdict::holds && std::isfinite(rep.exact_moment);
            // Power pairs must reproduce the fitted-constant bounds of the
            // alpha_n = n^a, beta_n = n^(a+1) reduction: c <= 2, B <= 2^(a+1)-1.
            if (sp.alpha_exp > 0.0) {
                ok = ok && rep.c <= 2.0 + 1e-9 &&
                     rep.growth_bound <= std::pow(2.0, sp.alpha_exp + 1.0) - 1.0 + 1e-9;
            }
            if (ok) {
                ++holds;
            } else if (note.empty()) {
                note = d.to_string() + " verdict " + oracle::to_string(rep.verdict);
            }
        }
    }
    const double dt = now_seconds() - t0;
    char buf[256];
    std::snprintf(buf, sizeof buf, "- %d/%d configurations hold%s%s", holds, configs,
                  note.empty() ? "" : "; first failure: ", note.c_str());
    report(1, "tail-series sandwich grid", holds == configs && configs >= 12 && dt < 30.0, dt, buf);
}

// --- criterion 2: series/moment iff-classifier on the pareto grid -----------

void criterion_2() {
    const double t0 = now_seconds();
    int cells = 0;
    int agree = 0;
    for (double a = 1.0; a <= 8.0 + 1e-9; a += 0.5) {
        for (double alpha : {0.6, 1.0, 2.0, 3.0}) {
            for (double beta : {0.5, 1.0, 2.0}) {
                const auto r =
                    oracle::series_classify(dist::DistributionSpec::pareto(a), alpha, beta);
                ++cells;
                if (r.agree) ++agree;
            }
        }
    }
    const double dt = now_seconds() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "- %d/%d cells agree (boundaries included)", agree, cells);
    report(2, "series/moment classifier grid", agree == cells && dt < 5.0, dt, buf);
}

// --- criterion 3: subset-maximum ratio against the pair-tail denominator ----

// Exact P(top-two product >= u) for n iid Pareto(a); independent oracle used
// to annotate the Monte Carlo estimates.
double exact_top2_product_tail(double a, std::int64_t n, double u) {
    const double w1 = 0.5 * std::log(u);
    const int panels = 100000;
    const double h = w1 / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double w = i * h;
        acc += std::pow(1.0 - std::exp(-a * w), static_cast<double>(n - 2)) *
               ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double i1 = acc * h / 3.0;
    const double s0 = std::pow(u, -a / 2.0);
    const double nn = static_cast<double>(n);
    return nn * (nn - 1.0) * a * std::pow(u, -a) * i1 +
           (1.0 - std::pow(1.0 - s0, nn - 1.0) * (1.0 + (nn - 1.0) * s0));
}

void criterion_3() {
    const double t0 = now_seconds();
    const auto d = dist::DistributionSpec::pareto(3.2);
    const std::vector<std::int64_t> grid = {10, 20, 40};
    std::vector<oracle::RatioEstimate> est;
    for (std::int64_t n : grid) {
        est.push_back(oracle::lemma1_ratio(d, 2, seq::SequenceSpec::power(1.0), n, 1000000, 42));
    }

    // (a) the estimates are compatible with a monotone nondecreasing sequence
    bool monotone_feasible = true;
    double floor_value = -1e300;
    for (const auto& e : est) {
        floor_value = std::max(floor_value, e.ratio - e.ci_half_width);
        if (floor_value > e.ratio + e.ci_half_width) monotone_feasible = false;
    }
    // (b) final point inside the pinned band
    const bool final_in_band = est.back().ratio >= 0.9 && est.back().ratio <= 1.02;
    // (c) sub-additivity cap
    bool below_cap = true;
    for (const auto& e : est) below_cap = below_cap && e.ratio <= 1.0 + 3.0 * e.ci_half_width;

    const double dt = now_seconds() - t0;
    std::string detail = "- ratios";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        char buf[96];
        std::snprintf(buf, sizeof buf, " n=%lld: %.4f+-%.4f (exact %.4f)",
                      static_cast<long long>(grid[i]), est[i].ratio, est[i].ci_half_width,
                      exact_top2_product_tail(3.2, grid[i], static_cast<double>(grid[i])) /
                          est[i].denominator);
        detail += buf;
    }
    detail += monotone_feasible ? "; monotone: yes" : "; monotone: no";
    detail += final_in_band ? "; final in [0.9,1.02]: yes" : "; final in [0.9,1.02]: no";
    detail += below_cap ? "; sub-additivity cap: yes" : "; sub-additivity cap: no";
    if (!final_in_band) {
        // The exact order-statistic probability shows the ratio tending to
        // 1 - 2/a (clumping of overlapping pair events), not to 1; the band
        // is unreachable for any admissible parameters, so this line stays
        // red with the evidence attached.
        detail += "; exact limit 1-2/a = 0.375";
    }
    report(3, "subset-maximum ratio trend", monotone_feasible && final_in_band && below_cap && dt < 120.0,
           dt, detail);
}

// --- criterion 4: W_n/sqrt(n ln n) -> 2 at desk scale ------------------------

void criterion_4() {
    const double t0 = now_seconds();
    sims::SimConfig cfg;
    cfg.dist_u = dist::DistributionSpec::gaussian();
    cfg.p_rule_c = 1.0;
    cfg.n_grid = {250, 500, 1000, 2000};
    cfg.reps = 20;
    cfg.normalization = sims::Normalization::sqrt_nlogn;
    cfg.master_seed = 42;
    const auto result = sims::run_experiment(cfg);
    const auto trend = sims::trend_assert(result, sims::Trend::to_two); // band [1.7, 2.2]
    const double dt = now_seconds() - t0;
    report(4, "W_n/sqrt(n ln n) -> 2 desk scale", trend.pass && dt < 180.0, dt,
           "- " + trend.message);
}

// --- criterion 5: fourth-moment dichotomy of W_n/n^alpha ---------------------

void criterion_5() {
    const double t0 = now_seconds();
    sims::SimConfig cfg;
    cfg.p_rule_c = 3.6;
    cfg.n_grid = {9, 90, 450, 2000};
    cfg.reps = 10;
    cfg.alpha = 0.75;
    cfg.normalization = sims::Normalization::power;
    cfg.master_seed = 42;

    cfg.dist_u = dist::DistributionSpec::rademacher(); // E|X|^4 = 1 < inf
    const auto conv = sims::trend_assert(sims::run_experiment(cfg), sims::Trend::to_zero);

    cfg.dist_u = dist::DistributionSpec::symmetric_pareto(3.0); // E|X|^4 = inf
    const auto div = sims::trend_assert(sims::run_experiment(cfg), sims::Trend::diverges);

    const double dt = now_seconds() - t0;
    report(5, "W_n/n^0.75 moment dichotomy", conv.pass && div.pass && dt < 180.0, dt,
           "- rademacher " + conv.message + " | symmetric-pareto(3) " + div.message);
}

// --- criterion 6: oracle equivalence on random fixtures ----------------------

void criterion_6() {
    const double t0 = now_seconds();
    const auto gaussian = dist::DistributionSpec::gaussian();
    int checked = 0;
    int matched = 0;
    std::string note;
    auto idx_stream = rng::Stream::derive(606, {0});
    for (int f = 0; f < 50; ++f) {
        const std::int64_t n = 4 + static_cast<std::int64_t>(idx_stream.next_u64() % 27); // <= 30
        const std::int64_t p = 2 + static_cast<std::int64_t>(idx_stream.next_u64() % 11); // <= 12
        const auto m = random_matrix(n, p, 7000 + static_cast<std::uint64_t>(f), gaussian);
        const auto v = random_matrix(n, p, 8000 + static_cast<std::uint64_t>(f), gaussian);

        bool ok = true;
        const auto corr = stats::correlation_matrix(m);
        const auto corr_ref = stats_ref::correlation_matrix(m);
        for (std::size_t t = 0; t < corr.upper.size(); ++t) {
            ok = ok && std::fabs(corr.upper[t] - corr_ref.upper[t]) <= 1e-12;
        }
        ok = ok && std::fabs(stats::l_statistic(m).value - stats_ref::l_statistic(m).value) <=
                       1e-12;
        ok = ok && std::fabs(stats::w_statistic(m).value - stats_ref::w_statistic(m).value) <=
                       1e-12 * std::max(1.0, stats_ref::w_statistic(m).value);
        ok = ok &&
             std::fabs(stats::t_statistic(m, v).value - stats_ref::t_statistic(m, v).value) <=
                 1e-12 * std::max(1.0, stats_ref::t_statistic(m, v).value);

        auto stream = rng::Stream::derive(9000 + static_cast<std::uint64_t>(f), {0});
        const auto x = dist::sample(gaussian, 15, stream);
        for (int mm = 1; mm <= 3; ++mm) {
            ok = ok && std::fabs(stats::max_product_statistic(x, mm) -
                                 stats_ref::max_product_statistic(x, mm)) <= 1e-12;
        }
        ++checked;
        if (ok) {
            ++matched;
        } else if (note.empty()) {
            note = " first mismatch at fixture " + std::to_string(f);
        }
    }
    const double dt = now_seconds() - t0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "- %d/%d fixtures match within 1e-12%s", matched, checked,
                  note.c_str());
    report(6, "blocked kernels vs brute force", matched == checked && dt < 5.0, dt, buf);
}

// --- criterion 7: invariance and determinism properties ----------------------

void criterion_7() {
    const double t0 = now_seconds();
    const auto gaussian = dist::DistributionSpec::gaussian();
    int fails = 0;

    // affine invariance of the correlation matrix, 200 randomized cases
    for (int f = 0; f < 200; ++f) {
        auto size_stream = rng::Stream::derive(100 + static_cast<std::uint64_t>(f), {1});
        const std::int64_t n = 5 + static_cast<std::int64_t>(size_stream.next_u64() % 36);
        const std::int64_t p = 2 + static_cast<std::int64_t>(size_stream.next_u64() % 9);
        auto m = random_matrix(n, p, 200 + static_cast<std::uint64_t>(f), gaussian);
        auto mapped = m;
        for (std::int64_t i = 0; i < p; ++i) {
            const double a = 0.1 + 3.0 * size_stream.next_unit();
            const double b = 10.0 * (size_stream.next_unit() - 0.5);
            for (std::int64_t k = 0; k < n; ++k) mapped.at(k, i) = a * m.at(k, i) + b;
        }
        const auto c1 = stats::correlation_matrix(m);
        const auto c2 = stats::correlation_matrix(mapped);
        for (std::size_t t = 0; t < c1.upper.size(); ++t) {
            if (std::fabs(c1.upper[t] - c2.upper[t]) > 1e-10) ++fails;
        }
        if (std::fabs(stats::l_statistic(m).value - stats::l_statistic(mapped).value) > 1e-10)
            ++fails;
    }

    // sign invariance of L and W, 200 cases
    for (int f = 0; f < 200; ++f) {
        auto flip_stream = rng::Stream::derive(300 + static_cast<std::uint64_t>(f), {1});
        auto m = random_matrix(18, 6, 400 + static_cast<std::uint64_t>(f), gaussian);
        auto flipped = m;
        for (std::int64_t i = 0; i < m.cols(); ++i) {
            if (flip_stream.next_u64() & 1) {
                for (std::int64_t k = 0; k < m.rows(); ++k) flipped.at(k, i) = -m.at(k, i);
            }
        }
        if (std::fabs(stats::l_statistic(m).value - stats::l_statistic(flipped).value) > 1e-12)
            ++fails;
        if (std::fabs(stats::w_statistic(m).value - stats::w_statistic(flipped).value) > 1e-12)
            ++fails;
    }

    // degree-2 homogeneity of W, 200 cases
    for (int f = 0; f < 200; ++f) {
        auto g_stream = rng::Stream::derive(500 + static_cast<std::uint64_t>(f), {1});
        auto m = random_matrix(22, 7, 600 + static_cast<std::uint64_t>(f), gaussian);
        const double gamma = 0.2 + 4.0 * g_stream.next_unit();
        auto scaled = m;
        for (auto& x : scaled.data()) x *= gamma;
        const double w = stats::w_statistic(m).value;
        const double ws = stats::w_statistic(scaled).value;
        if (std::fabs(ws - gamma * gamma * w) > 1e-12 * std::max(1.0, gamma * gamma * w))
            ++fails;
    }

    // determinism across thread counts: kernels on 200 random matrices plus
    // 4 full experiments, bitwise equal between 1 and 2 OpenMP threads
    const int saved_threads = omp_get_max_threads();
    for (int f = 0; f < 200; ++f) {
        auto m = random_matrix(40 + (f % 60), 30 + (f % 40), 700 + static_cast<std::uint64_t>(f),
                               gaussian);
        omp_set_num_threads(1);
        const auto w1 = stats::w_statistic(m);
        omp_set_num_threads(2);
        const auto w2 = stats::w_statistic(m);
        if (w1.value != w2.value || w1.i != w2.i || w1.j != w2.j) ++fails;
    }
    for (int f = 0; f < 4; ++f) {
        sims::SimConfig cfg;
        cfg.dist_u = f % 2 ? dist::DistributionSpec::rademacher() : gaussian;
        cfg.n_grid = {8, 16, 32};
        cfg.reps = 5;
        cfg.alpha = 1.0;
        cfg.normalization = sims::Normalization::power;
        cfg.master_seed = 4242 + static_cast<std::uint64_t>(f);
        omp_set_num_threads(1);
        const auto r1 = sims::run_experiment(cfg);
        omp_set_num_threads(2);
        const auto r2 = sims::run_experiment(cfg);
        for (std::size_t i = 0; i < r1.records.size(); ++i) {
            if (r1.records[i].statistic != r2.records[i].statistic) ++fails;
        }
    }
    omp_set_num_threads(saved_threads);

    const double dt = now_seconds() - t0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "- %d property violations across 800+ cases", fails);
    report(7, "invariance and determinism suite", fails == 0 && dt < 30.0, dt, buf);
}

// --- criterion 8: blocked kernel performance ---------------------------------

void criterion_8() {
    const double t0 = now_seconds();
    // Budget frozen at 5x the measured blocked-kernel pilot (0.48 s on the
    // reference machine).
    constexpr double kBudgetSeconds = 2.4;

    const auto m = random_matrix(2000, 2000, 321, dist::DistributionSpec::gaussian());

    const double tb0 = now_seconds();
    const auto blocked = stats::w_statistic(m);
    const double blocked_time = now_seconds() - tb0;

    const double tn0 = now_seconds();
    const auto naive = stats_ref::w_statistic(m);
    const double naive_time = now_seconds() - tn0;

    const bool same = std::fabs(blocked.value - naive.value) <=
                      1e-9 * std::max(1.0, naive.value);
    const double speedup = naive_time / blocked_time;
    const double dt = now_seconds() - t0;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "- blocked %.2fs (budget %.1fs), naive %.2fs, speedup %.1fx (need >= 3), "
                  "values agree: %s",
                  blocked_time, kBudgetSeconds, naive_time, speedup, same ? "yes" : "no");
    report(8, "2000x2000 kernel performance", blocked_time <= kBudgetSeconds && speedup >= 3.0 &&
                                                  same,
           dt, buf);
}

} // namespace

int main() {
    std::printf("acceptance suite (threads: %d)\n", omp_get_max_threads());
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%d of 8 criteria failed\n", g_failures);
    return g_failures;
}
