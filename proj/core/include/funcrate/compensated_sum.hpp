#pragma once

#ifdef __FAST_MATH__
#error "fast-math reassociates floating point and defeats compensated summation"
#endif

namespace funcrate {

// Neumaier's variant of Kahan summation. Merging two partial sums is
// associative up to the final rounding, which the block reducers rely on.
class CompensatedSum {
public:
    constexpr CompensatedSum() = default;
    constexpr explicit CompensatedSum(double value) : sum_(value) {}

    constexpr CompensatedSum& operator+=(double value) {
        const double t = sum_ + value;
        if (magnitude(sum_) >= magnitude(value)) {
            carry_ += (sum_ - t) + value;
        } else {
            carry_ += (value - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    constexpr CompensatedSum& operator+=(const CompensatedSum& other) {
        *this += other.sum_;
        carry_ += other.carry_;
        return *this;
    }

    [[nodiscard]] constexpr double value() const { return sum_ + carry_; }

private:
    static constexpr double magnitude(double x) { return x < 0.0 ? -x : x; }

    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace funcrate
