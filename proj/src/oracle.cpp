#include "corrmax/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <omp.h>

#include <json.hpp>

#include "corrmax/errors.hpp"
#include "corrmax/kahan.hpp"
#include "corrmax/stats.hpp"

namespace corrmax::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using nlohmann::json;

json number_or_flag(double v) {
    if (std::isinf(v)) return json("infinity");
    return json(v);
}

// Upper bound on P(|X| >= t) of the form A t^-a, valid for every t > 0.
// Exact for pareto; an integrated density envelope for student-t.
struct PolyEnvelope {
    bool valid = false;
    double coeff = 0.0;
    double exponent = 0.0;
};

PolyEnvelope poly_envelope(const dist::DistributionSpec& d) {
    PolyEnvelope env;
    const auto tc = dist::tail_class(d);
    if (!tc.polynomial) return env;
    const double s = d.scale();
    env.valid = true;
    env.exponent = tc.exponent;
    switch (d.family) {
        case dist::Family::pareto:
        case dist::Family::symmetric_pareto:
            env.coeff = std::pow(s, tc.exponent);
            break;
        case dist::Family::student_t: {
            const double df = d.df;
            const double c = std::exp(std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df)) /
                             std::sqrt(df * 3.14159265358979323846);
            env.coeff = std::pow(s, df) * 2.0 * c * std::pow(df, 0.5 * (df + 1.0)) / df;
            break;
        }
        default:
            env.valid = false;
    }
    return env;
}

// n^e upper/lower envelopes for the sequence kinds, valid from n_from on.
struct PowerEnvelope {
    bool valid = false;
    double exponent = 0.0;
    double coeff = 1.0;
};

PowerEnvelope upper_power_envelope(const seq::SequenceSpec& s, std::int64_t n_from) {
    PowerEnvelope e;
    switch (s.kind) {
        case seq::Kind::power:
            e = {true, s.exponent, 1.0};
            break;
        case seq::Kind::power_with_log:
            // (n ln n)^e <= n^(2e) for n >= 2 and e >= 0.
            if (s.exponent >= 0.0 && n_from >= 2) e = {true, 2.0 * s.exponent, 1.0};
            break;
        case seq::Kind::explicit_list: {
            // A constant list is n^0 times its value; anything else has no
            // usable envelope beyond the materialized range.
            bool constant = !s.values.empty();
            for (double v : s.values) constant = constant && (v == s.values.front());
            if (constant) e = {true, 0.0, s.values.front()};
            break;
        }
    }
    return e;
}

PowerEnvelope lower_power_envelope(const seq::SequenceSpec& s, std::int64_t n_from) {
    PowerEnvelope e;
    switch (s.kind) {
        case seq::Kind::power:
            e = {true, s.exponent, 1.0};
            break;
        case seq::Kind::power_with_log:
            // (n ln n)^e >= n^e for n >= 3 and e >= 0.
            if (s.exponent >= 0.0 && n_from >= 3) e = {true, s.exponent, 1.0};
            break;
        case seq::Kind::explicit_list:
            break;
    }
    return e;
}

// Closed-form bound on sum_{n > N} alpha_n P(|X| >= beta_n); +inf when no
// bound is available for this (distribution, sequences) combination.
double tail_series_remainder(const dist::DistributionSpec& d, const seq::SequenceSpec& alpha,
                             const seq::SequenceSpec& beta, std::int64_t n_terms) {
    const auto tc = dist::tail_class(d);
    const double s = d.scale();
    const std::int64_t n1 = n_terms + 1;

    if (d.family == dist::Family::rademacher) {
        // Bounded support: terms vanish once beta exceeds the support bound.
        if (beta.kind == seq::Kind::explicit_list) return kInf;
        if (beta.exponent <= 0.0) return kInf; // not increasing
        return seq::value_at(beta, n1) > s ? 0.0 : kInf;
    }

    if (tc.polynomial) {
        const auto env = poly_envelope(d);
        const auto ae = upper_power_envelope(alpha, n1);
        const auto be = lower_power_envelope(beta, n1);
        if (!env.valid || !ae.valid || !be.valid) return kInf;
        const double q = ae.exponent - env.exponent * be.exponent;
        if (q >= -1.0) return kInf;
        const double coeff = env.coeff * ae.coeff / std::pow(be.coeff, env.exponent);
        // sum_{n>N} n^q <= integral_N^inf x^q dx for q < -1.
        return coeff * std::pow(static_cast<double>(n_terms), q + 1.0) / (-q - 1.0);
    }

    if (d.family == dist::Family::gaussian) {
        // P(|X| >= t) <= exp(-t^2 / 2); geometric tail bound valid when the
        // squared thresholds have nondecreasing increments.
        if (alpha.kind == seq::Kind::explicit_list || beta.kind == seq::Kind::explicit_list)
            return kInf;
        if (beta.exponent < 0.5) return kInf;
        if (alpha.exponent < 0.0) return kInf;
        auto term_bound = [&](std::int64_t n) {
            const double b = seq::value_at(beta, n) / s;
            return seq::value_at(alpha, n) * std::exp(-0.5 * b * b);
        };
        const double t1 = term_bound(n1);
        if (t1 == 0.0) return 0.0;
        const double rho = term_bound(n1 + 1) / t1;
        if (!(rho < 1.0)) return kInf;
        return t1 / (1.0 - rho);
    }

    return kInf;
}

} // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string to_string(SeriesVerdict v) {
    return v == SeriesVerdict::convergent ? "convergent" : "divergent";
}

std::string to_string(MomentVerdict v) {
    return v == MomentVerdict::finite ? "finite" : "infinite";
}

double binomial_coefficient(std::int64_t n, int m) {
    if (m < 0 || n < m) return 0.0;
    double c = 1.0;
    for (int k = 1; k <= m; ++k) {
        c *= static_cast<double>(n - m + k) / static_cast<double>(k);
    }
    return c;
}

OracleReport sandwich_check(const dist::DistributionSpec& d, const seq::SequenceSpec& alpha,
                            const seq::SequenceSpec& beta, std::int64_t n_terms) {
    if (n_terms < 1) throw std::invalid_argument("sandwich_check needs N >= 1");
    dist::validate(d);

    OracleReport rep;
    rep.N_terms = n_terms;

    // Hypothesis certificate on the tested range (throws when unsatisfiable).
    const auto alpha_vals = seq::gen_sequence(alpha, n_terms);
    const auto beta_vals = seq::gen_sequence(beta, n_terms);
    const auto sc = seq::fit_sandwich_constants(alpha_vals, beta_vals);
    rep.c = sc.c;
    rep.growth_bound = sc.growth_bound;
    rep.finite_range_certificate = true;

    // For the monotone kinds, once a term and the final term are both zero
    // every intermediate term is zero too and the scan can stop early.
    const bool beta_monotone = beta.kind != seq::Kind::explicit_list;
    const double final_tail =
        beta_monotone ? dist::tail_prob_ge(d, beta_vals.back()) : 1.0;
    StableSum sum;
    for (std::int64_t n = 1; n <= n_terms; ++n) {
        const double a = alpha_vals[static_cast<std::size_t>(n - 1)];
        if (a == 0.0) continue;
        const double term = a * dist::tail_prob_ge(d, beta_vals[static_cast<std::size_t>(n - 1)]);
        sum.add(term);
        if (term == 0.0 && beta_monotone && final_tail == 0.0 && n > 64) break;
    }
    rep.partial_sum = sum.get();
    rep.remainder_bound = tail_series_remainder(d, alpha, beta, n_terms);
    rep.exact_moment = dist::moment(d, 1.0);

    const double beta1 = beta_vals.front();
    const double factor = (rep.growth_bound + 1.0) * rep.c;
    rep.lower_sum = rep.partial_sum / rep.c;
    rep.upper_bound = beta1 + factor * (rep.partial_sum + rep.remainder_bound);

    constexpr double kSlack = 1e-9;
    const auto le = [](double x, double y) { return x <= y * (1.0 + kSlack) + kSlack; };

    if (std::isinf(rep.exact_moment)) {
        // The series must diverge with the moment; a finite certified series
        // total would contradict the equivalence.
        if (std::isinf(rep.remainder_bound)) {
            rep.verdict = Verdict::inconclusive;
        } else {
            rep.verdict = Verdict::fails;
        }
        return rep;
    }

    // Lower side: c^-1 S_N <= c^-1 S_inf <= E|X| must hold; certify with the
    // remainder, flag a straddle as inconclusive.
    Verdict lower;
    if (!le(rep.lower_sum, rep.exact_moment)) {
        lower = Verdict::fails;
    } else if (std::isinf(rep.remainder_bound)) {
        lower = Verdict::inconclusive;
    } else if (le((rep.partial_sum + rep.remainder_bound) / rep.c, rep.exact_moment)) {
        lower = Verdict::holds;
    } else {
        lower = Verdict::inconclusive;
    }

    // Upper side: E|X| <= beta_1 + (B+1) c S_inf; the partial sum already
    // certifies it, the remainder only helps.
    Verdict upper;
    if (le(rep.exact_moment, beta1 + factor * rep.partial_sum)) {
        upper = Verdict::holds;
    } else if (!std::isinf(rep.remainder_bound) &&
               !le(rep.exact_moment, rep.upper_bound)) {
        upper = Verdict::fails;
    } else {
        upper = Verdict::inconclusive;
    }

    if (lower == Verdict::fails || upper == Verdict::fails) {
        rep.verdict = Verdict::fails;
    } else if (lower == Verdict::holds && upper == Verdict::holds) {
        rep.verdict = Verdict::holds;
    } else {
        rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

SeriesClassification series_classify(const dist::DistributionSpec& d, double alpha_exp,
                                     double beta_exp) {
    if (!(alpha_exp > 0.0) || !(beta_exp > 0.0))
        throw std::invalid_argument("series_classify needs alpha > 0 and beta > 0");
    dist::validate(d);
    const auto tc = dist::tail_class(d);
    if (!tc.polynomial && !tc.all_moments)
        throw std::invalid_argument("distribution has no usable tail classification");

    SeriesClassification out;
    out.moment_exponent = (alpha_exp + 1.0) / beta_exp;

    if (tc.all_moments) {
        out.series = SeriesVerdict::convergent;
        out.moment = MomentVerdict::finite;
        out.boundary = false;
    } else {
        const double a = tc.exponent;
        out.series = (a * beta_exp - alpha_exp > 1.0) ? SeriesVerdict::convergent
                                                      : SeriesVerdict::divergent;
        out.moment = (out.moment_exponent < a) ? MomentVerdict::finite : MomentVerdict::infinite;
        out.boundary = std::fabs(a * beta_exp - alpha_exp - 1.0) < 1e-12;
    }
    out.agree = (out.series == SeriesVerdict::convergent) == (out.moment == MomentVerdict::finite);

    for (std::int64_t cap : {std::int64_t{100}, std::int64_t{1000}, std::int64_t{10000}}) {
        StableSum s;
        for (std::int64_t n = 1; n <= cap; ++n) {
            const double t = std::pow(static_cast<double>(n), beta_exp);
            s.add(std::pow(static_cast<double>(n), alpha_exp) * dist::tail_prob(d, t));
        }
        out.partial_sums.emplace_back(cap, s.get());
    }
    return out;
}

RatioEstimate lemma1_ratio(const dist::DistributionSpec& d, int m, const seq::SequenceSpec& u,
                           std::int64_t n, std::int64_t reps, std::uint64_t master_seed) {
    if (m < 1) throw std::invalid_argument("lemma1_ratio needs m >= 1");
    if (n < m) throw std::invalid_argument("lemma1_ratio needs n >= m");
    if (reps < 1) throw std::invalid_argument("lemma1_ratio needs reps >= 1");
    dist::validate(d);
    if (!dist::has_closed_product_tail(d) && m > 1)
        throw std::invalid_argument("lemma1_ratio needs a closed-form product tail");

    const double u_n = seq::value_at(u, n);
    if (!(u_n > 0.0)) throw std::invalid_argument("threshold u_n must be positive");

    const double tail = dist::product_tail_prob(d, m, u_n);
    const double denom = binomial_coefficient(n, m) * tail;

    const double expected_hits = static_cast<double>(reps) * std::min(1.0, denom);
    if (expected_hits < 10.0) {
        throw RefusalError("expected hit count below 10; the estimate would be unreliable");
    }

    std::int64_t hits = 0;
#pragma omp parallel
    {
        std::vector<double> draws(static_cast<std::size_t>(n));
        std::int64_t local = 0;
#pragma omp for schedule(static)
        for (std::int64_t r = 0; r < reps; ++r) {
            auto stream = rng::Stream::derive(master_seed, {0x4c31u, static_cast<std::uint64_t>(r)});
            dist::sample(d, std::span<double>(draws), stream);
            if (stats::max_product_statistic(draws, m) >= u_n) ++local;
        }
#pragma omp atomic
        hits += local;
    }

    if (hits < 10) throw RefusalError("observed hit count below 10; refusing the estimate");

    RatioEstimate est;
    est.hits = hits;
    est.reps = reps;
    est.denominator = denom;
    est.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
    const double se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(reps));
    est.ratio = est.p_hat / denom;
    est.ci_half_width = 1.96 * se / denom;
    return est;
}

SqrtNLogNReport sqrt_nlogn_condition(const dist::DistributionSpec& d, int m) {
    if (m < 1) throw std::invalid_argument("sqrt_nlogn_condition needs m >= 1");
    dist::validate(d);
    const auto tc = dist::tail_class(d);
    if (!tc.polynomial && !tc.all_moments)
        throw std::invalid_argument("distribution has no usable tail classification");

    SqrtNLogNReport out;
    const double q = 2.0 * (m + 1);

    if (tc.all_moments) {
        out.series = SeriesVerdict::convergent;
        out.moment = MomentVerdict::finite;
        out.boundary = false;
    } else {
        const double a = tc.exponent;
        // Series side: n^m P(prod >= sqrt(n ln n)) ~ n^(m - a/2) (ln n)^(m-1-a/2)
        // up to constants, so it converges iff m - a/2 < -1, with the
        // boundary m - a/2 = -1 decided by the log power m-1-a/2 < -1.
        const double pow_margin = static_cast<double>(m) - 0.5 * a;
        if (pow_margin < -1.0) {
            out.series = SeriesVerdict::convergent;
        } else if (pow_margin == -1.0) {
            out.series = (static_cast<double>(m) - 1.0 - 0.5 * a < -1.0)
                             ? SeriesVerdict::convergent
                             : SeriesVerdict::divergent;
        } else {
            out.series = SeriesVerdict::divergent;
        }
        // Moment side through the generic log-adjusted finiteness rule.
        out.moment = dist::log_adjusted_moment_finite(d, q, static_cast<double>(m + 1), m)
                         ? MomentVerdict::finite
                         : MomentVerdict::infinite;
        out.boundary = (q == tc.exponent);
    }
    out.agree = (out.series == SeriesVerdict::convergent) == (out.moment == MomentVerdict::finite);

    if (dist::has_closed_product_tail(d)) {
        for (std::int64_t cap : {std::int64_t{100}, std::int64_t{1000}, std::int64_t{10000}}) {
            StableSum s;
            for (std::int64_t n = 1; n <= cap; ++n) {
                const double nn = static_cast<double>(n);
                const double u = std::sqrt(nn * std::log(nn));
                const double tail =
                    u > 0.0 ? dist::product_tail_prob(d, m, u) : 1.0;
                s.add(std::pow(nn, static_cast<double>(m)) * tail);
            }
            out.partial_sums.emplace_back(cap, s.get());
        }
    }
    return out;
}

std::string OracleReport::to_json() const {
    json j;
    j["lower_sum"] = lower_sum;
    j["exact_moment"] = number_or_flag(exact_moment);
    j["upper_bound"] = number_or_flag(upper_bound);
    j["verdict"] = to_string(verdict);
    j["N_terms"] = N_terms;
    if (mc_ci) {
        j["mc_ci"] = {{"estimate", mc_ci->estimate},
                      {"half_width", mc_ci->half_width},
                      {"reps", mc_ci->reps}};
    } else {
        j["mc_ci"] = nullptr;
    }
    j["detail"] = {{"c", c},
                   {"growth_bound", growth_bound},
                   {"partial_sum", partial_sum},
                   {"remainder_bound", number_or_flag(remainder_bound)},
                   {"finite_range_certificate", finite_range_certificate}};
    return j.dump(2);
}

std::string SeriesClassification::to_json() const {
    json j;
    j["series_verdict"] = to_string(series);
    j["moment_verdict"] = to_string(moment);
    j["agree"] = agree;
    j["boundary"] = boundary;
    j["moment_exponent"] = moment_exponent;
    json sums = json::array();
    for (const auto& [n, s] : partial_sums) sums.push_back({{"N", n}, {"sum", s}});
    j["partial_sums"] = sums;
    return j.dump(2);
}

std::string RatioEstimate::to_json() const {
    json j;
    j["ratio"] = ratio;
    j["ci_half_width"] = ci_half_width;
    j["p_hat"] = p_hat;
    j["hits"] = hits;
    j["reps"] = reps;
    j["denominator"] = denominator;
    return j.dump(2);
}

std::string SqrtNLogNReport::to_json() const {
    json j;
    j["series_verdict"] = to_string(series);
    j["moment_verdict"] = to_string(moment);
    j["agree"] = agree;
    j["boundary"] = boundary;
    json sums = json::array();
    for (const auto& [n, s] : partial_sums) sums.push_back({{"N", n}, {"sum", s}});
    j["partial_sums"] = sums;
    return j.dump(2);
}

} // namespace corrmax::oracle
