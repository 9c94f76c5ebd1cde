#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corrmax/rng.hpp"

namespace corrmax::dist {

enum class Family { gaussian, rademacher, student_t, pareto, symmetric_pareto };

// A distribution family with parameters and, where they exist, exact tail and
// moment functionals. Pareto here means P(|X| > t) = t^-a for t >= 1; the
// symmetric variant attaches a random sign, giving mean zero with the same
// absolute-value law. `standardized` rescales draws to unit variance and is
// only legal when the variance is finite.
struct DistributionSpec {
    Family family = Family::gaussian;
    double a = 0.0;   // pareto tail exponent
    double df = 0.0;  // student-t degrees of freedom
    bool standardized = false;

    static DistributionSpec gaussian();
    static DistributionSpec rademacher();
    static DistributionSpec student_t(double df);
    static DistributionSpec pareto(double a);
    static DistributionSpec symmetric_pareto(double a);

    // Multiplier applied to raw draws: 1/sd when standardized, else 1.
    double scale() const;

    // Compact text form used by CLI flags and config files, e.g.
    // "pareto(a=3.2)", "symmetric-pareto(a=3,std=1)", "gaussian".
    std::string to_string() const;
    static DistributionSpec parse(const std::string& text);
};

// Throws std::invalid_argument for bad parameters (a <= 0, df <= 0,
// standardization without finite variance).
void validate(const DistributionSpec& spec);

bool mean_zero(const DistributionSpec& spec);
double variance(const DistributionSpec& spec); // +inf when divergent

// --- sampling ------------------------------------------------------------

// iid draws; the output is a pure function of (spec, out.size(), stream key
// and position), so distinct streams can be consumed concurrently.
void sample(const DistributionSpec& spec, std::span<double> out, rng::Stream& stream);
std::vector<double> sample(const DistributionSpec& spec, std::size_t count,
                           rng::Stream& stream);

// --- exact functionals ----------------------------------------------------

// P(|X| > t), t >= 0. Exact closed forms; student-t via the regularized
// incomplete beta function.
double tail_prob(const DistributionSpec& spec, double t);

// P(|X| >= t). Differs from tail_prob only for families with atoms
// (rademacher at t = scale); tail-weighted series use this form.
double tail_prob_ge(const DistributionSpec& spec, double t);

// P(X <= x) for the continuous families; used by goodness-of-fit tests.
double cdf(const DistributionSpec& spec, double x);

// True when product_tail_prob has a closed form for this family (any m).
bool has_closed_product_tail(const DistributionSpec& spec);

// P(prod_{h=1..m} |X_h| >= u) for iid factors, u > 0.
//   m = 1       : tail_prob_ge for any family
//   pareto-like : exact Gamma(m, a) survival of sum of exponentials
//   rademacher  : indicator u <= scale^m
// Throws std::domain_error for families without a closed form.
double product_tail_prob(const DistributionSpec& spec, int m, double u);

// Monte Carlo estimate of the same probability, for cross-checks and for
// families without a closed form. Returns the hit fraction.
double product_tail_prob_mc(const DistributionSpec& spec, int m, double u,
                            std::int64_t reps, rng::Stream& stream);

// E|X|^q, q >= 0; +inf when the moment diverges. Exact closed forms for all
// five families.
double moment(const DistributionSpec& spec, double q);

// Tail shape used by the analytic series/moment classifiers.
struct TailClass {
    bool polynomial = false;  // P(|X| > t) decays like t^-exponent
    double exponent = 0.0;
    bool all_moments = false; // tail decays faster than every polynomial
};
TailClass tail_class(const DistributionSpec& spec);

// --- log-adjusted moments ---------------------------------------------------

// Finiteness of E[ Z^q / (ln(e+Z))^r ] with Z = prod_{h=1..m} |X_h|.
// Decided analytically from the tail exponent: for polynomial tails the
// moment is finite iff q < a, and at the boundary q = a the integrand is
// u^-1 (ln u)^(m-1-r), which converges iff r > m. Never inferred from
// quadrature behavior.
bool log_adjusted_moment_finite(const DistributionSpec& spec, double q, double r, int m = 1);

// Value of E[ Z^q / (ln(e+Z))^r ] when finite (+inf returned when not).
// Adaptive quadrature on the log-transformed variable, relative tolerance
// 1e-8, with explicit truncation bounded through the closed-form tail.
double log_adjusted_moment(const DistributionSpec& spec, double q, double r, int m = 1);

// --- special functions (exposed for reuse and direct testing) -------------

double regularized_incomplete_beta(double a, double b, double x);
double normal_tail(double t); // P(|Z| > t) for standard normal

} // namespace corrmax::dist
