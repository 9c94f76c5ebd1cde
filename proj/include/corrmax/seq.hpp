#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace corrmax::seq {

// Deterministic index sequences: the weight/threshold sequences feeding the
// tail-series machinery. Values are indexed from `offset` (default 1).
//
//   power(e)          a_n = n^e
//   power_with_log(e) a_n = (n ln n)^e   (so e = 1/2 gives sqrt(n ln n))
//   explicit_list     caller-supplied values, a_offset, a_offset+1, ...
enum class Kind { power, power_with_log, explicit_list };

struct SequenceSpec {
    Kind kind = Kind::power;
    double exponent = 1.0;
    std::vector<double> values; // explicit_list only
    std::int64_t offset = 1;

    static SequenceSpec power(double e, std::int64_t offset = 1);
    static SequenceSpec power_with_log(double e, std::int64_t offset = 1);
    static SequenceSpec explicit_values(std::vector<double> v, std::int64_t offset = 1);

    std::string to_string() const;
};

// Value at a single index n (n >= offset). Power kinds are evaluated on the
// fly so million-term partial sums need no materialized vector.
double value_at(const SequenceSpec& spec, std::int64_t n);

// Values for n = offset..n_max. Throws std::invalid_argument if n_max < offset,
// if an explicit list is too short to cover the range, or if an explicit list
// contains a negative value.
std::vector<double> gen_sequence(const SequenceSpec& spec, std::int64_t n_max);

// Fitted constants for the two-sided increment sandwich
//     c^-1 a_n <= b_n - b_{n-1} <= c a_n,   n in n_range,
// together with the largest observed relative growth (b_{n+1}-b_n)/b_n.
// The certificate is finite-range only: it proves the hypotheses on the
// tested indices and says nothing about larger n.
struct SandwichConstants {
    double c = 1.0;             // smallest admissible c >= 1 on the range
    double growth_bound = 0.0;  // max_n (b_{n+1}-b_n)/b_n over b_n > 0 ("B")
    std::pair<std::int64_t, std::int64_t> n_range{1, 1};
    bool finite_range_certificate = true;
};

// alpha and beta hold a_1..a_N and b_1..b_N; b_0 = 0 is implied.
// Throws std::invalid_argument when no finite c exists: a nonpositive
// increment against a_n > 0, or a_n = 0 against a positive increment.
SandwichConstants fit_sandwich_constants(const std::vector<double>& alpha,
                                         const std::vector<double>& beta);

// f(x) = x / ln(e + sqrt(x)), increasing and continuous on [0, inf).
// f(n ln n)/n stays in [1/2, 2) for n >= 3 and tends to 2.
double f_log_adjusted(double x);

// min and max of values[i] / (first_n + i)^exponent. The caller judges
// whether the spread certifies "bounded away from 0 and infinity".
std::pair<double, double> check_bounded_away(const std::vector<double>& values,
                                             double exponent,
                                             std::int64_t first_n = 1);

// Text forms used by the CLI: "pow:E", "powlog:E", "explicit:v1,v2,...",
// "const:V" plus the aliases "const<V>" (e.g. const1), "linear", "sqrtnlogn".
// A const spec materializes as an explicit list of length n_max.
SequenceSpec parse(const std::string& text, std::int64_t n_max);

} // namespace corrmax::seq
