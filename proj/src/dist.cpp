#include "corrmax/dist.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace corrmax::dist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045235360287;
constexpr double kPi = 3.141592653589793238462643;

double lanczos_lgamma(double x) { return std::lgamma(x); }

// Continued fraction for the regularized incomplete beta (Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// Adaptive Simpson with Richardson acceptance.
double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Adaptive refinement on unit-length segments: a single Simpson probe over a
// wide domain can miss integrand mass concentrated near one end.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
    if (a == b) return 0.0;
    const int nseg = std::max(1, static_cast<int>(std::ceil(b - a)));
    const double seg_tol = tol / nseg;
    const double h = (b - a) / nseg;
    double total = 0.0;
    for (int i = 0; i < nseg; ++i) {
        const double x0 = a + i * h;
        const double x1 = (i + 1 == nseg) ? b : x0 + h;
        const double fa = f(x0);
        const double fb = f(x1);
        const double fm = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(f, x0, x1, fa, fm, fb, whole, seg_tol, 40);
    }
    return total;
}

// Upper incomplete gamma for integer shape: Gamma(m, x) = (m-1)! e^-x sum x^k/k!.
double upper_gamma_int(int m, double x) {
    double fact = 1.0;
    double sum = 0.0;
    double pow_term = 1.0;
    for (int k = 0; k < m; ++k) {
        if (k > 0) {
            fact *= k;
            pow_term *= x;
        }
        sum += pow_term / fact;
    }
    double full_fact = 1.0;
    for (int k = 2; k <= m - 1; ++k) full_fact *= k;
    return full_fact * std::exp(-x) * sum;
}

double base_variance(const DistributionSpec& s) {
    switch (s.family) {
        case Family::gaussian: return 1.0;
        case Family::rademacher: return 1.0;
        case Family::student_t: return s.df > 2.0 ? s.df / (s.df - 2.0) : kInf;
        case Family::pareto: {
            if (s.a <= 2.0) return kInf;
            const double m1 = s.a / (s.a - 1.0);
            const double m2 = s.a / (s.a - 2.0);
            return m2 - m1 * m1;
        }
        case Family::symmetric_pareto: return s.a > 2.0 ? s.a / (s.a - 2.0) : kInf;
    }
    return kInf;
}

// P(|X| > t) for the unscaled family.
double base_tail(const DistributionSpec& s, double t) {
    switch (s.family) {
        case Family::gaussian: return std::erfc(t / std::sqrt(2.0));
        case Family::rademacher: return t < 1.0 ? 1.0 : 0.0;
        case Family::student_t: {
            if (t == 0.0) return 1.0;
            const double x = s.df / (s.df + t * t);
            return regularized_incomplete_beta(0.5 * s.df, 0.5, x);
        }
        case Family::pareto:
        case Family::symmetric_pareto:
            return t < 1.0 ? 1.0 : std::pow(t, -s.a);
    }
    return 0.0;
}

double base_moment(const DistributionSpec& s, double q) {
    if (q == 0.0) return 1.0;
    switch (s.family) {
        case Family::gaussian:
            return std::exp(0.5 * q * std::log(2.0) + lanczos_lgamma(0.5 * (q + 1.0)) -
                            0.5 * std::log(kPi));
        case Family::rademacher: return 1.0;
        case Family::student_t:
            if (q >= s.df) return kInf;
            return std::exp(0.5 * q * std::log(s.df) + lanczos_lgamma(0.5 * (q + 1.0)) +
                            lanczos_lgamma(0.5 * (s.df - q)) - 0.5 * std::log(kPi) -
                            lanczos_lgamma(0.5 * s.df));
        case Family::pareto:
        case Family::symmetric_pareto:
            return q < s.a ? s.a / (s.a - q) : kInf;
    }
    return kInf;
}

double sample_gamma(double shape, rng::Stream& stream);

double sample_normal(rng::Stream& stream) {
    const double u1 = stream.next_unit();
    const double u2 = stream.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Marsaglia-Tsang; consumes a variable number of draws but is a
// deterministic function of the stream position.
double sample_gamma(double shape, rng::Stream& stream) {
    if (shape < 1.0) {
        const double u = stream.next_unit();
        return sample_gamma(shape + 1.0, stream) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        const double x = sample_normal(stream);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = stream.next_unit();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = lanczos_lgamma(a + b) - lanczos_lgamma(a) - lanczos_lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double normal_tail(double t) { return std::erfc(t / std::sqrt(2.0)); }

DistributionSpec DistributionSpec::gaussian() {
    DistributionSpec s;
    s.family = Family::gaussian;
    return s;
}

DistributionSpec DistributionSpec::rademacher() {
    DistributionSpec s;
    s.family = Family::rademacher;
    return s;
}

DistributionSpec DistributionSpec::student_t(double df) {
    DistributionSpec s;
    s.family = Family::student_t;
    s.df = df;
    return s;
}

DistributionSpec DistributionSpec::pareto(double a) {
    DistributionSpec s;
    s.family = Family::pareto;
    s.a = a;
    return s;
}

DistributionSpec DistributionSpec::symmetric_pareto(double a) {
    DistributionSpec s;
    s.family = Family::symmetric_pareto;
    s.a = a;
    return s;
}

double DistributionSpec::scale() const {
    if (!standardized) return 1.0;
    const double v = base_variance(*this);
    if (!std::isfinite(v)) {
        throw std::invalid_argument("cannot standardize a distribution with infinite variance");
    }
    return 1.0 / std::sqrt(v);
}

std::string DistributionSpec::to_string() const {
    std::ostringstream os;
    switch (family) {
        case Family::gaussian: os << "gaussian"; break;
        case Family::rademacher: os << "rademacher"; break;
        case Family::student_t: os << "student-t(df=" << df; break;
        case Family::pareto: os << "pareto(a=" << a; break;
        case Family::symmetric_pareto: os << "symmetric-pareto(a=" << a; break;
    }
    const bool has_params = family == Family::student_t || family == Family::pareto ||
                            family == Family::symmetric_pareto;
    if (has_params) {
        if (standardized) os << ",std=1";
        os << ")";
    } else if (standardized) {
        os << "(std=1)";
    }
    return os.str();
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
    std::string name = text;
    std::string params;
    const auto open = text.find('(');
    if (open != std::string::npos) {
        if (text.back() != ')') throw std::invalid_argument("malformed distribution spec: " + text);
        name = text.substr(0, open);
        params = text.substr(open + 1, text.size() - open - 2);
    }

    DistributionSpec s;
    if (name == "gaussian" || name == "standard-gaussian") {
        s.family = Family::gaussian;
    } else if (name == "rademacher") {
        s.family = Family::rademacher;
    } else if (name == "student-t") {
        s.family = Family::student_t;
    } else if (name == "pareto") {
        s.family = Family::pareto;
    } else if (name == "symmetric-pareto") {
        s.family = Family::symmetric_pareto;
    } else {
        throw std::invalid_argument("unknown distribution family: " + name);
    }

    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in distribution spec: " + item);
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        if (key == "a") {
            s.a = std::stod(val);
        } else if (key == "df") {
            s.df = std::stod(val);
        } else if (key == "std") {
            s.standardized = (val == "1" || val == "true");
        } else {
            throw std::invalid_argument("unknown distribution parameter: " + key);
        }
    }
    validate(s);
    return s;
}

void validate(const DistributionSpec& spec) {
    switch (spec.family) {
        case Family::gaussian:
        case Family::rademacher:
            break;
        case Family::student_t:
            if (!(spec.df > 0.0)) throw std::invalid_argument("student-t needs df > 0");
            break;
        case Family::pareto:
        case Family::symmetric_pareto:
            if (!(spec.a > 0.0)) throw std::invalid_argument("pareto needs a > 0");
            break;
    }
    if (spec.standardized) spec.scale(); // throws when variance is infinite
}

bool mean_zero(const DistributionSpec& spec) {
    switch (spec.family) {
        case Family::gaussian:
        case Family::rademacher:
        case Family::symmetric_pareto:
            return true;
        case Family::student_t:
            return spec.df > 1.0;
        case Family::pareto:
            return false;
    }
    return false;
}

double variance(const DistributionSpec& spec) {
    const double v = base_variance(spec);
    if (!spec.standardized) return v;
    return 1.0;
}

void sample(const DistributionSpec& spec, std::span<double> out, rng::Stream& stream) {
    validate(spec);
    const double s = spec.scale();
    switch (spec.family) {
        case Family::gaussian: {
            std::size_t i = 0;
            while (i + 1 < out.size()) {
                const double u1 = stream.next_unit();
                const double u2 = stream.next_unit();
                const double r = std::sqrt(-2.0 * std::log(u1));
                out[i++] = s * r * std::cos(2.0 * kPi * u2);
                out[i++] = s * r * std::sin(2.0 * kPi * u2);
            }
            if (i < out.size()) out[i] = s * sample_normal(stream);
            break;
        }
        case Family::rademacher:
            for (double& x : out) x = (stream.next_u64() >> 63) ? s : -s;
            break;
        case Family::student_t:
            for (double& x : out) {
                const double z = sample_normal(stream);
                const double chi2 = 2.0 * sample_gamma(0.5 * spec.df, stream);
                x = s * z * std::sqrt(spec.df / chi2);
            }
            break;
        case Family::pareto:
            for (double& x : out) x = s * std::pow(stream.next_unit(), -1.0 / spec.a);
            break;
        case Family::symmetric_pareto:
            for (double& x : out) {
                const double sign = (stream.next_u64() >> 63) ? 1.0 : -1.0;
                x = sign * s * std::pow(stream.next_unit(), -1.0 / spec.a);
            }
            break;
    }
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t count,
                           rng::Stream& stream) {
    std::vector<double> out(count);
    sample(spec, std::span<double>(out), stream);
    return out;
}

double tail_prob(const DistributionSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("tail_prob needs t >= 0");
    validate(spec);
    return base_tail(spec, t / spec.scale());
}

double tail_prob_ge(const DistributionSpec& spec, double t) {
    if (t < 0.0) throw std::invalid_argument("tail_prob_ge needs t >= 0");
    validate(spec);
    const double tb = t / spec.scale();
    if (spec.family == Family::rademacher) return tb <= 1.0 ? 1.0 : 0.0;
    return base_tail(spec, tb); // continuous families: P(|X| >= t) = P(|X| > t)
}

double cdf(const DistributionSpec& spec, double x) {
    validate(spec);
    const double s = spec.scale();
    const double xb = x / s;
    switch (spec.family) {
        case Family::gaussian:
            return 0.5 * std::erfc(-xb / std::sqrt(2.0));
        case Family::student_t:
            return xb >= 0.0 ? 1.0 - 0.5 * base_tail(spec, xb) : 0.5 * base_tail(spec, -xb);
        case Family::pareto:
            return xb < 1.0 ? 0.0 : 1.0 - std::pow(xb, -spec.a);
        case Family::symmetric_pareto:
            if (xb >= 1.0) return 1.0 - 0.5 * std::pow(xb, -spec.a);
            if (xb <= -1.0) return 0.5 * std::pow(-xb, -spec.a);
            return 0.5;
        case Family::rademacher:
            if (xb < -1.0) return 0.0;
            if (xb < 1.0) return 0.5;
            return 1.0;
    }
    return 0.0;
}

bool has_closed_product_tail(const DistributionSpec& spec) {
    return spec.family == Family::pareto || spec.family == Family::symmetric_pareto ||
           spec.family == Family::rademacher;
}

double product_tail_prob(const DistributionSpec& spec, int m, double u) {
    if (m < 1) throw std::invalid_argument("product order m must be >= 1");
    if (!(u > 0.0)) throw std::invalid_argument("product_tail_prob needs u > 0");
    validate(spec);
    if (m == 1) return tail_prob_ge(spec, u);

    const double s = spec.scale();
    const double ub = u / std::pow(s, m); // P(prod |sX| >= u) = P(prod |X| >= u/s^m)
    switch (spec.family) {
        case Family::rademacher:
            return ub <= 1.0 ? 1.0 : 0.0;
        case Family::pareto:
        case Family::symmetric_pareto: {
            if (ub <= 1.0) return 1.0;
            // ln|X_h| are iid Exponential(a); their sum is Gamma(m, a), so the
            // product tail is the Gamma survival function at ln u.
            const double x = spec.a * std::log(ub);
            double term = 1.0;
            double sum = 1.0;
            for (int k = 1; k < m; ++k) {
                term *= x / k;
                sum += term;
            }
            return std::exp(-x) * sum;
        }
        default:
            throw std::domain_error("no closed-form product tail for " + spec.to_string());
    }
}

double product_tail_prob_mc(const DistributionSpec& spec, int m, double u,
                            std::int64_t reps, rng::Stream& stream) {
    if (m < 1 || reps < 1) throw std::invalid_argument("bad Monte Carlo parameters");
    validate(spec);
    std::vector<double> draws(static_cast<std::size_t>(m));
    std::int64_t hits = 0;
    for (std::int64_t r = 0; r < reps; ++r) {
        sample(spec, std::span<double>(draws), stream);
        double prod = 1.0;
        for (double x : draws) prod *= std::fabs(x);
        if (prod >= u) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(reps);
}

double moment(const DistributionSpec& spec, double q) {
    if (q < 0.0) throw std::invalid_argument("moment needs q >= 0");
    validate(spec);
    const double base = base_moment(spec, q);
    if (!std::isfinite(base)) return kInf;
    return std::pow(spec.scale(), q) * base;
}

TailClass tail_class(const DistributionSpec& spec) {
    validate(spec);
    TailClass tc;
    switch (spec.family) {
        case Family::gaussian:
        case Family::rademacher:
            tc.all_moments = true;
            break;
        case Family::student_t:
            tc.polynomial = true;
            tc.exponent = spec.df;
            break;
        case Family::pareto:
        case Family::symmetric_pareto:
            tc.polynomial = true;
            tc.exponent = spec.a;
            break;
    }
    return tc;
}

bool log_adjusted_moment_finite(const DistributionSpec& spec, double q, double r, int m) {
    if (!(q > 0.0) || r < 0.0 || m < 1) throw std::invalid_argument("bad log-adjusted moment parameters");
    validate(spec);
    const TailClass tc = tail_class(spec);
    if (tc.all_moments) return true;
    if (spec.family == Family::student_t && m > 1)
        throw std::domain_error("no closed-form product tail for student-t with m > 1");
    if (q < tc.exponent) return true;
    if (q > tc.exponent) return false;
    // Boundary q = a: integrand behaves like u^-1 (ln u)^(m-1-r).
    return r > static_cast<double>(m);
}

namespace {

// E[ Z^q / ln(e+Z)^r ] for Z = scale^m * exp(S), S ~ Gamma(m, rate a).
// In the transformed variable the integrand is
//   (a^m / (m-1)!) t^(m-1) exp((q-a) t) * sf^q * ln(e + sf e^t)^-r.
double pareto_product_log_moment(double a, int m, double q, double r, double sf) {
    // a^m / (m-1)!
    const double log_norm = m * std::log(a) - lanczos_lgamma(static_cast<double>(m));
    const double norm = std::exp(log_norm) * std::pow(sf, q);

    const auto integrand = [&](double t) {
        const double lnfac = std::log(kE + sf * std::exp(t));
        return std::pow(t, static_cast<double>(m - 1)) * std::exp((q - a) * t) *
               std::pow(lnfac, -r);
    };

    if (q < a) {
        const double lambda = a - q;
        // Grow the window until the closed-form remainder bound is negligible.
        double T = std::max(4.0, 8.0 / lambda);
        double value = 0.0;
        for (;;) {
            value = adaptive_simpson(integrand, 0.0, T, 1e-12);
            const double ln_cut = std::pow(std::log(kE + sf * std::exp(std::min(T, 700.0))), -r);
            const double rem = ln_cut * upper_gamma_int(m, lambda * T) /
                               std::pow(lambda, static_cast<double>(m));
            if (rem <= 1e-10 * std::max(value, 1e-300)) break;
            T *= 2.0;
            if (T > 1e6) break;
        }
        return norm * value;
    }

    // Boundary q = a (finite only when r > m): integrand ~ t^(m-1-r).
    // Head on [0, 1], then substitute t = e^w so the tail decays like
    // e^((m-r) w); remainder beyond e^W is bounded by T^(m-r)/(r-m).
    const double head = adaptive_simpson(integrand, 0.0, 1.0, 1e-12);
    const double W = std::max(2.0, 30.0 / (r - m));
    const auto tail_integrand = [&](double w) {
        const double t = std::exp(w);
        return t * integrand(t);
    };
    const double tail = adaptive_simpson(tail_integrand, 0.0, W, 1e-12);
    return norm * (head + tail);
}

} // namespace

double log_adjusted_moment(const DistributionSpec& spec, double q, double r, int m) {
    if (!log_adjusted_moment_finite(spec, q, r, m)) return kInf;
    const double s = spec.scale();
    const double sf = std::pow(s, m);

    switch (spec.family) {
        case Family::rademacher:
            // Z is identically scale^m.
            return std::pow(sf, q) * std::pow(std::log(kE + sf), -r);
        case Family::pareto:
        case Family::symmetric_pareto:
            return pareto_product_log_moment(spec.a, m, q, r, sf);
        case Family::gaussian: {
            if (m > 1) throw std::domain_error("log-adjusted product moments need a closed-form tail");
            const auto f = [&](double x) {
                const double z = s * x;
                return std::pow(z, q) * std::pow(std::log(kE + z), -r) *
                       std::sqrt(2.0 / kPi) * std::exp(-0.5 * x * x);
            };
            return adaptive_simpson(f, 0.0, 42.0, 1e-12);
        }
        case Family::student_t: {
            if (m > 1) throw std::domain_error("log-adjusted product moments need a closed-form tail");
            if (q == spec.df)
                throw std::domain_error("boundary-case value not implemented for student-t");
            const double c = std::exp(lanczos_lgamma(0.5 * (spec.df + 1.0)) -
                                      lanczos_lgamma(0.5 * spec.df)) /
                             std::sqrt(spec.df * kPi);
            const auto f = [&](double x) {
                const double z = s * x;
                return std::pow(z, q) * std::pow(std::log(kE + z), -r) * 2.0 * c *
                       std::pow(1.0 + x * x / spec.df, -0.5 * (spec.df + 1.0));
            };
            double T = 64.0;
            double value = 0.0;
            for (;;) {
                value = adaptive_simpson(f, 0.0, T, 1e-12);
                const double rem = 2.0 * c * std::pow(spec.df, 0.5 * (spec.df + 1.0)) *
                                   std::pow(s, q) * std::pow(T, q - spec.df) /
                                   (spec.df - q);
                if (rem <= 1e-10 * std::max(value, 1e-300)) break;
                T *= 2.0;
                if (T > 1e12) break;
            }
            return value;
        }
    }
    return kInf;
}

} // namespace corrmax::dist
