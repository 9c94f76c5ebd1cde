#include "corrmax/seq.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace corrmax::seq {

SequenceSpec SequenceSpec::power(double e, std::int64_t offset) {
    SequenceSpec s;
    s.kind = Kind::power;
    s.exponent = e;
    s.offset = offset;
    return s;
}

SequenceSpec SequenceSpec::power_with_log(double e, std::int64_t offset) {
    SequenceSpec s;
    s.kind = Kind::power_with_log;
    s.exponent = e;
    s.offset = offset;
    return s;
}

SequenceSpec SequenceSpec::explicit_values(std::vector<double> v, std::int64_t offset) {
    SequenceSpec s;
    s.kind = Kind::explicit_list;
    s.values = std::move(v);
    s.offset = offset;
    return s;
}

std::string SequenceSpec::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::power: os << "pow:" << exponent; break;
        case Kind::power_with_log: os << "powlog:" << exponent; break;
        case Kind::explicit_list:
            os << "explicit:";
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) os << ',';
                os << values[i];
            }
            break;
    }
    return os.str();
}

double value_at(const SequenceSpec& spec, std::int64_t n) {
    if (n < spec.offset) throw std::invalid_argument("sequence index below offset");
    if (spec.kind != Kind::explicit_list && spec.exponent < 0.0) {
        // power kinds promise nondecreasing values
        throw std::invalid_argument("power sequences need a nonnegative exponent");
    }
    switch (spec.kind) {
        case Kind::power:
            return std::pow(static_cast<double>(n), spec.exponent);
        case Kind::power_with_log: {
            const double x = static_cast<double>(n) * std::log(static_cast<double>(n));
            return std::pow(x, spec.exponent);
        }
        case Kind::explicit_list: {
            const std::size_t i = static_cast<std::size_t>(n - spec.offset);
            if (i >= spec.values.size())
                throw std::invalid_argument("explicit sequence shorter than requested index");
            const double v = spec.values[i];
            if (v < 0.0) throw std::invalid_argument("explicit sequence has a negative value");
            return v;
        }
    }
    return 0.0;
}

std::vector<double> gen_sequence(const SequenceSpec& spec, std::int64_t n_max) {
    if (n_max < spec.offset) throw std::invalid_argument("n_max smaller than sequence offset");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_max - spec.offset + 1));
    for (std::int64_t n = spec.offset; n <= n_max; ++n) out.push_back(value_at(spec, n));
    return out;
}

SandwichConstants fit_sandwich_constants(const std::vector<double>& alpha,
                                         const std::vector<double>& beta) {
    if (alpha.size() != beta.size())
        throw std::invalid_argument("alpha and beta must have equal length");
    if (alpha.empty()) throw std::invalid_argument("empty sequences");

    SandwichConstants sc;
    sc.n_range = {1, static_cast<std::int64_t>(alpha.size())};

    double prev_beta = 0.0; // b_0 = 0 by convention
    double c = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a = alpha[i];
        const double incr = beta[i] - prev_beta;
        if (incr < 0.0)
            throw std::invalid_argument("beta sequence is not nondecreasing");
        if (a < 0.0) throw std::invalid_argument("alpha sequence has a negative value");
        if (a > 0.0 && incr <= 0.0)
            throw std::invalid_argument("zero beta increment against positive alpha: no finite c");
        if (a == 0.0 && incr > 0.0)
            throw std::invalid_argument("alpha is zero against a positive beta increment: no finite c");
        if (a > 0.0) {
            c = std::max(c, std::max(incr / a, a / incr));
        }
        prev_beta = beta[i];
    }
    sc.c = c;

    double growth = 0.0;
    for (std::size_t i = 0; i + 1 < beta.size(); ++i) {
        if (beta[i] > 0.0) growth = std::max(growth, (beta[i + 1] - beta[i]) / beta[i]);
    }
    sc.growth_bound = growth;
    return sc;
}

double f_log_adjusted(double x) {
    if (x < 0.0) throw std::invalid_argument("f_log_adjusted needs x >= 0");
    if (x == 0.0) return 0.0;
    return x / std::log(std::exp(1.0) + std::sqrt(x));
}

std::pair<double, double> check_bounded_away(const std::vector<double>& values,
                                             double exponent,
                                             std::int64_t first_n) {
    if (values.empty()) throw std::invalid_argument("empty value list");
    if (first_n < 1) throw std::invalid_argument("first_n must be >= 1");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double n = static_cast<double>(first_n + static_cast<std::int64_t>(i));
        const double r = values[i] / std::pow(n, exponent);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

SequenceSpec parse(const std::string& text, std::int64_t n_max) {
    auto parse_real = [&](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("bad number in sequence spec: " + s);
        return v;
    };

    if (text == "linear") return SequenceSpec::power(1.0);
    if (text == "sqrtnlogn") return SequenceSpec::power_with_log(0.5);

    const auto colon = text.find(':');
    const std::string head = colon == std::string::npos ? text : text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "pow") return SequenceSpec::power(parse_real(rest));
    if (head == "powlog") return SequenceSpec::power_with_log(parse_real(rest));
    if (head == "const") {
        const double v = parse_real(rest);
        if (v < 0.0) throw std::invalid_argument("const sequence value must be nonnegative");
        return SequenceSpec::explicit_values(
            std::vector<double>(static_cast<std::size_t>(n_max), v));
    }
    if (head == "explicit") {
        std::vector<double> vals;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(parse_real(item));
        if (vals.empty()) throw std::invalid_argument("explicit sequence spec has no values");
        return SequenceSpec::explicit_values(std::move(vals));
    }
    // "const1", "const2", ... shorthand
    if (text.rfind("const", 0) == 0 && text.size() > 5) {
        const double v = parse_real(text.substr(5));
        return SequenceSpec::explicit_values(
            std::vector<double>(static_cast<std::size_t>(n_max), v));
    }
    throw std::invalid_argument("unrecognized sequence spec: " + text);
}

} // namespace corrmax::seq
