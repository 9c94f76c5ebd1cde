#pragma once

#include <cmath>

namespace corrmax {

// Neumaier-compensated accumulator. Unlike plain Kahan the correction
// survives when the addend exceeds the running sum.
class StableSum {
public:
    StableSum() = default;
    explicit StableSum(double init) : sum_(init) {}

    void add(double v) {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double get() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace corrmax
