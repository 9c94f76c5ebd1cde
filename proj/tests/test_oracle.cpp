#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "corrmax/dist.hpp"
#include "corrmax/errors.hpp"
#include "corrmax/oracle.hpp"
#include "corrmax/seq.hpp"

using namespace corrmax;
using dist::DistributionSpec;
using oracle::MomentVerdict;
using oracle::SeriesVerdict;
using oracle::Verdict;
using seq::SequenceSpec;

TEST_CASE("binomial coefficients") {
    CHECK(oracle::binomial_coefficient(10, 2) == doctest::Approx(45.0));
    CHECK(oracle::binomial_coefficient(40, 2) == doctest::Approx(780.0));
    CHECK(oracle::binomial_coefficient(15, 3) == doctest::Approx(455.0));
    CHECK(oracle::binomial_coefficient(5, 1) == doctest::Approx(5.0));
    CHECK(oracle::binomial_coefficient(1, 2) == 0.0);
}

TEST_CASE("sandwich: pareto(2) with unit weights and linear thresholds") {
    // Partial sum approaches zeta(2); E|X| = 2; c = B = 1, so the certified
    // bracket is [zeta(2), 1 + 2 zeta(2)] ~ [1.6449, 4.290].
    const auto rep = oracle::sandwich_check(DistributionSpec::pareto(2.0),
                                            SequenceSpec::power(0.0), SequenceSpec::power(1.0),
                                            1000000);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.c == doctest::Approx(1.0));
    CHECK(rep.growth_bound == doctest::Approx(1.0));
    CHECK(rep.exact_moment == doctest::Approx(2.0));
    const double zeta2 = 1.6449340668482264;
    CHECK(rep.lower_sum == doctest::Approx(zeta2).epsilon(1e-5));
    CHECK(rep.upper_bound == doctest::Approx(1.0 + 2.0 * zeta2).epsilon(1e-4));
    CHECK(rep.lower_sum <= rep.exact_moment);
    CHECK(rep.exact_moment <= rep.upper_bound);
    CHECK(rep.remainder_bound <= 2e-6); // integral bound N^-1 at N = 10^6
}

TEST_CASE("sandwich: gaussian with unit weights, N = 100") {
    const auto rep = oracle::sandwich_check(DistributionSpec::gaussian(),
                                            SequenceSpec::power(0.0), SequenceSpec::power(1.0),
                                            100);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.lower_sum == doctest::Approx(0.3655).epsilon(1e-3));
    CHECK(rep.exact_moment == doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846)));
    CHECK(rep.remainder_bound < 1e-300);
}

TEST_CASE("sandwich: rademacher collapses to the single n = 1 term") {
    const auto rep = oracle::sandwich_check(DistributionSpec::rademacher(),
                                            SequenceSpec::power(0.0), SequenceSpec::power(1.0),
                                            10000);
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.partial_sum == doctest::Approx(1.0));
    CHECK(rep.exact_moment == doctest::Approx(1.0));
    CHECK(rep.upper_bound == doctest::Approx(3.0));
    CHECK(rep.remainder_bound == 0.0);
}

TEST_CASE("sandwich: infinite mean with unbounded remainder is inconclusive") {
    // pareto(1): E|X| = inf and the series diverges; no finite remainder
    // bound exists, so the check reports inconclusive rather than a verdict
    // it cannot certify.
    const auto rep = oracle::sandwich_check(DistributionSpec::pareto(1.0),
                                            SequenceSpec::power(0.0), SequenceSpec::power(1.0),
                                            10000);
    CHECK(rep.verdict == Verdict::inconclusive);
    CHECK(std::isinf(rep.exact_moment));
}

TEST_CASE("sandwich: hypothesis failure surfaces as an error") {
    // Constant thresholds give zero increments against positive weights.
    CHECK_THROWS_AS(oracle::sandwich_check(DistributionSpec::pareto(2.0),
                                           SequenceSpec::power(0.0),
                                           SequenceSpec::explicit_values({1, 1, 1, 1}), 4),
                    std::invalid_argument);
    // (n ln n)^e sequences start at 0, so they cannot satisfy the increment
    // sandwich from n = 1: as weights the first weight is zero against a
    // positive increment, as thresholds the first increment is zero.
    CHECK_THROWS_AS(oracle::sandwich_check(DistributionSpec::pareto(2.0),
                                           SequenceSpec::power_with_log(0.5),
                                           SequenceSpec::power(1.0), 100),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle::sandwich_check(DistributionSpec::pareto(2.0),
                                           SequenceSpec::power(0.0),
                                           SequenceSpec::power_with_log(1.0), 100),
                    std::invalid_argument);
}

TEST_CASE("sandwich holds across the full configuration grid") {
    // Unconditional property: whenever E|X| is finite the two-sided bound
    // must hold; any violation beyond numeric slack is a bug.
    const std::vector<DistributionSpec> dists = {
        DistributionSpec::pareto(1.5),  DistributionSpec::pareto(2.0),
        DistributionSpec::pareto(4.0),  DistributionSpec::gaussian(),
        DistributionSpec::rademacher(), DistributionSpec::student_t(3.0),
    };
    struct SeqPair {
        SequenceSpec alpha, beta;
    };
    const std::vector<SeqPair> seqs = {
        {SequenceSpec::power(0.0), SequenceSpec::power(1.0)},
        {SequenceSpec::power(0.6), SequenceSpec::power(1.6)},
        {SequenceSpec::power(1.0), SequenceSpec::power(2.0)},
    };
    for (const auto& d : dists) {
        for (const auto& sp : seqs) {
            const auto rep = oracle::sandwich_check(d, sp.alpha, sp.beta, 200000);
            CAPTURE(d.to_string());
            CHECK(rep.verdict == Verdict::holds);
            CHECK(rep.lower_sum <= rep.exact_moment * (1.0 + 1e-9) + 1e-9);
            CHECK(rep.exact_moment <= rep.upper_bound * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("series classifier: spot cases") {
    SUBCASE("pareto(3.2), alpha=2, beta=1: both sides converge/finite") {
        const auto r = oracle::series_classify(DistributionSpec::pareto(3.2), 2.0, 1.0);
        CHECK(r.series == SeriesVerdict::convergent);
        CHECK(r.moment == MomentVerdict::finite);
        CHECK(r.agree);
        CHECK(r.moment_exponent == doctest::Approx(3.0));
        CHECK_FALSE(r.boundary);
    }
    SUBCASE("pareto(3), alpha=2, beta=1: harmonic boundary, both divergent") {
        const auto r = oracle::series_classify(DistributionSpec::pareto(3.0), 2.0, 1.0);
        CHECK(r.series == SeriesVerdict::divergent);
        CHECK(r.moment == MomentVerdict::infinite);
        CHECK(r.agree);
        CHECK(r.boundary);
    }
    SUBCASE("gaussian: converges for any exponents") {
        const auto r = oracle::series_classify(DistributionSpec::gaussian(), 3.0, 0.5);
        CHECK(r.series == SeriesVerdict::convergent);
        CHECK(r.moment == MomentVerdict::finite);
        CHECK(r.agree);
    }
    SUBCASE("partial sums are reported and increase with N") {
        const auto r = oracle::series_classify(DistributionSpec::pareto(2.0), 1.0, 1.0);
        REQUIRE(r.partial_sums.size() == 3);
        CHECK(r.partial_sums[0].first == 100);
        CHECK(r.partial_sums[2].first == 10000);
        CHECK(r.partial_sums[0].second < r.partial_sums[1].second);
        CHECK(r.partial_sums[1].second < r.partial_sums[2].second);
    }
}

TEST_CASE("series classifier: iff holds on the full pareto grid") {
    for (double a = 1.0; a <= 8.0 + 1e-9; a += 0.5) {
        for (double alpha : {0.6, 1.0, 2.0, 3.0}) {
            for (double beta : {0.5, 1.0, 2.0}) {
                const auto r = oracle::series_classify(DistributionSpec::pareto(a), alpha, beta);
                CAPTURE(a);
                CAPTURE(alpha);
                CAPTURE(beta);
                CHECK(r.agree);
            }
        }
    }
}

TEST_CASE("lemma1 ratio: m = 1 with n = 1 is the same event on both sides") {
    const auto est = oracle::lemma1_ratio(DistributionSpec::pareto(2.0), 1,
                                          SequenceSpec::explicit_values({2.0}), 1, 200000, 11);
    // Both sides estimate P(|X| >= 2) = 0.25; the ratio is 1 in expectation.
    CHECK(est.denominator == doctest::Approx(0.25));
    CHECK(std::fabs(est.ratio - 1.0) <= 3.0 * est.ci_half_width);
}

// Exact P(top-two product >= u) for n iid Pareto(a): with S(x) = x^-a the
// top-two order-statistic density integrates to
//   P = n(n-1) a u^-a I1 + [1 - (1-s0)^(n-1) (1 + (n-1) s0)],
//   I1 = int_0^{ln(u)/2} (1 - e^{-a w})^{n-2} dw,  s0 = u^{-a/2}.
// Independent of the library code path; the Monte Carlo estimator must agree.
static double exact_top2_product_tail(double a, std::int64_t n, double u) {
    const double w1 = 0.5 * std::log(u);
    const int panels = 100000;
    const double h = w1 / panels;
    double acc = 0.0;
    for (int i = 0; i <= panels; ++i) {
        const double w = i * h;
        const double f = std::pow(1.0 - std::exp(-a * w), static_cast<double>(n - 2));
        acc += f * ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double i1 = acc * h / 3.0;
    const double s0 = std::pow(u, -a / 2.0);
    const double nn = static_cast<double>(n);
    return nn * (nn - 1.0) * a * std::pow(u, -a) * i1 +
           (1.0 - std::pow(1.0 - s0, nn - 1.0) * (1.0 + (nn - 1.0) * s0));
}

TEST_CASE("lemma1 ratio: estimator matches the exact order-statistic oracle") {
    for (std::int64_t n : {10, 20, 40}) {
        const auto est = oracle::lemma1_ratio(DistributionSpec::pareto(3.2), 2,
                                              SequenceSpec::power(1.0), n, 200000, 12);
        CAPTURE(n);
        // sub-additivity: the estimate may not sit above 1 beyond noise
        CHECK(est.ratio <= 1.0 + 3.0 * est.ci_half_width);
        CHECK(est.hits >= 10);

        const double p_exact = exact_top2_product_tail(3.2, n, static_cast<double>(n));
        const double se = std::sqrt(est.p_hat * (1.0 - est.p_hat) /
                                    static_cast<double>(est.reps));
        CHECK(std::fabs(est.p_hat - p_exact) <= 4.0 * se);
    }
}

TEST_CASE("lemma1 ratio: zero-probability event refuses") {
    CHECK_THROWS_AS(oracle::lemma1_ratio(DistributionSpec::rademacher(), 2,
                                         SequenceSpec::explicit_values({2, 2, 2, 2, 2, 2, 2, 2,
                                                                        2, 2}),
                                         10, 1000, 13),
                    RefusalError);
}

TEST_CASE("lemma1 ratio: deterministic for a fixed seed") {
    const auto a = oracle::lemma1_ratio(DistributionSpec::pareto(3.2), 2,
                                        SequenceSpec::power(1.0), 10, 50000, 99);
    const auto b = oracle::lemma1_ratio(DistributionSpec::pareto(3.2), 2,
                                        SequenceSpec::power(1.0), 10, 50000, 99);
    CHECK(a.hits == b.hits);
    CHECK(a.ratio == b.ratio);
}

TEST_CASE("sqrt(n ln n) condition: exponent dichotomy at 2(m+1)") {
    SUBCASE("pareto(7), m=2: above the threshold, both finite/convergent") {
        const auto r = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(7.0), 2);
        CHECK(r.series == SeriesVerdict::convergent);
        CHECK(r.moment == MomentVerdict::finite);
        CHECK(r.agree);
        CHECK_FALSE(r.boundary);
    }
    SUBCASE("pareto(5), m=2: below the threshold, both infinite/divergent") {
        const auto r = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(5.0), 2);
        CHECK(r.series == SeriesVerdict::divergent);
        CHECK(r.moment == MomentVerdict::infinite);
        CHECK(r.agree);
        // necessary-direction moments: E|X|^b < inf for all b < 5 < 2(m+1)
        for (double b = 0.0; b < 5.0; b += 0.5) {
            CHECK(std::isfinite(dist::moment(DistributionSpec::pareto(5.0), b)));
        }
    }
    SUBCASE("pareto(6), m=2: boundary decided convergent by the log factor") {
        const auto r = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(6.0), 2);
        CHECK(r.boundary);
        CHECK(r.series == SeriesVerdict::convergent);
        CHECK(r.moment == MomentVerdict::finite);
        CHECK(r.agree);
    }
    SUBCASE("rademacher: trivially finite for any m") {
        for (int m : {1, 2, 3}) {
            const auto r = oracle::sqrt_nlogn_condition(DistributionSpec::rademacher(), m);
            CHECK(r.series == SeriesVerdict::convergent);
            CHECK(r.moment == MomentVerdict::finite);
            CHECK(r.agree);
        }
    }
    SUBCASE("agreement across a pareto sweep for m = 1, 2, 3") {
        for (int m : {1, 2, 3}) {
            for (double a = 1.0; a <= 12.0 + 1e-9; a += 0.5) {
                const auto r = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(a), m);
                CAPTURE(m);
                CAPTURE(a);
                CHECK(r.agree);
                CHECK(r.boundary == (a == 2.0 * (m + 1)));
            }
        }
    }
}

TEST_CASE("sqrt(n ln n) partial sums look convergent above threshold") {
    const auto above = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(7.0), 2);
    REQUIRE(above.partial_sums.size() == 3);
    // increments shrink fast when convergent
    const double inc1 = above.partial_sums[1].second - above.partial_sums[0].second;
    const double inc2 = above.partial_sums[2].second - above.partial_sums[1].second;
    CHECK(inc2 < inc1);

    const auto below = oracle::sqrt_nlogn_condition(DistributionSpec::pareto(3.0), 2);
    const double binc1 = below.partial_sums[1].second - below.partial_sums[0].second;
    const double binc2 = below.partial_sums[2].second - below.partial_sums[1].second;
    CHECK(binc2 > binc1); // divergent series keeps accelerating in N
}

TEST_CASE("reports serialize to JSON with the expected fields") {
    const auto rep = oracle::sandwich_check(DistributionSpec::pareto(2.0),
                                            SequenceSpec::power(0.0), SequenceSpec::power(1.0),
                                            1000);
    const auto j = rep.to_json();
    for (const char* field : {"lower_sum", "exact_moment", "upper_bound", "verdict", "N_terms",
                              "mc_ci"}) {
        CAPTURE(field);
        CHECK(j.find(field) != std::string::npos);
    }
    const auto cls = oracle::series_classify(DistributionSpec::pareto(2.0), 1.0, 1.0);
    CHECK(cls.to_json().find("series_verdict") != std::string::npos);
}
