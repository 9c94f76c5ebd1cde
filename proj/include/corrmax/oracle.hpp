#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrmax/dist.hpp"
#include "corrmax/seq.hpp"

namespace corrmax::oracle {

enum class Verdict { holds, fails, inconclusive };
enum class SeriesVerdict { convergent, divergent };
enum class MomentVerdict { finite, infinite };

std::string to_string(Verdict v);
std::string to_string(SeriesVerdict v);
std::string to_string(MomentVerdict v);

struct McCi {
    double estimate = 0.0;
    double half_width = 0.0;
    std::int64_t reps = 0;
};

// Outcome of a sandwich/series/ratio check. lower_sum and upper_bound are
// the two sides of the tail-series estimate of E|X|:
//   c^-1 sum a_n P(|X| >= b_n)  <=  E|X|  <=  b_1 + (B+1) c sum a_n P(...).
// upper_bound folds in a closed-form bound on the tail of the series beyond
// N_terms, so a `holds` verdict is a certificate up to that remainder; the
// fitted constants certify the hypotheses on the tested range only.
struct OracleReport {
    double lower_sum = 0.0;
    double exact_moment = 0.0; // +inf when the moment diverges
    double upper_bound = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::int64_t N_terms = 0;
    std::optional<McCi> mc_ci;

    double c = 1.0;
    double growth_bound = 0.0;  // B measured on the tested range
    double partial_sum = 0.0;   // uncorrected sum of the first N_terms
    double remainder_bound = 0.0; // +inf when no closed-form bound exists
    bool finite_range_certificate = true;

    std::string to_json() const;
};

// Two-sided check of the generalized tail-series sandwich for E|X|.
OracleReport sandwich_check(const dist::DistributionSpec& d, const seq::SequenceSpec& alpha,
                            const seq::SequenceSpec& beta, std::int64_t n_terms);

// Series-vs-moment classifier for sum n^alpha P(|X| > n^beta) against
// E|X|^((alpha+1)/beta). Verdicts are analytic exponent comparisons; the
// partial sums are reported as numeric evidence only, since no finite sum
// separates a divergent series from a barely convergent one.
struct SeriesClassification {
    SeriesVerdict series = SeriesVerdict::divergent;
    MomentVerdict moment = MomentVerdict::infinite;
    bool agree = false;
    bool boundary = false;
    double moment_exponent = 0.0;
    // (N, partial sum) evidence at N = 100, 1000, 10000.
    std::vector<std::pair<std::int64_t, double>> partial_sums;

    std::string to_json() const;
};
SeriesClassification series_classify(const dist::DistributionSpec& d, double alpha_exp,
                                     double beta_exp);

// Monte Carlo estimate of
//   P(max over m-subsets of prod |X| >= u_n) / [ C(n,m) P(prod |X| >= u_n) ],
// whose limit is 1. Throws RefusalError when fewer than 10 hits can be
// expected: rare-event estimates below that are noise.
struct RatioEstimate {
    double ratio = 0.0;
    double ci_half_width = 0.0;
    double p_hat = 0.0;
    std::int64_t hits = 0;
    std::int64_t reps = 0;
    double denominator = 0.0; // C(n,m) * product tail

    std::string to_json() const;
};
RatioEstimate lemma1_ratio(const dist::DistributionSpec& d, int m, const seq::SequenceSpec& u,
                           std::int64_t n, std::int64_t reps, std::uint64_t master_seed);

// Both sides of the sqrt(n ln n) threshold equivalence: the series
// sum n^m P(prod >= sqrt(n ln n)) against the log-adjusted moment
// E[ Z^(2(m+1)) / ln(e+Z)^(m+1) ], classified by independent exponent
// arguments and compared. boundary marks a = 2(m+1), where the log factor
// decides both sides.
struct SqrtNLogNReport {
    SeriesVerdict series = SeriesVerdict::divergent;
    MomentVerdict moment = MomentVerdict::infinite;
    bool agree = false;
    bool boundary = false;
    std::vector<std::pair<std::int64_t, double>> partial_sums;

    std::string to_json() const;
};
SqrtNLogNReport sqrt_nlogn_condition(const dist::DistributionSpec& d, int m);

// C(n, m) in double precision.
double binomial_coefficient(std::int64_t n, int m);

} // namespace corrmax::oracle
