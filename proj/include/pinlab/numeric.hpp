#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace pinlab::numeric {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLog2 = 0.69314718055994530942;

/// log(1 + e^x) without overflow or loss of precision for very negative x.
inline double log1p_exp(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

/// log((1 + e^x) / 2), the log of a sign-averaged excursion weight.
inline double log_half_one_plus_exp(double x) { return log1p_exp(x) - kLog2; }

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

/// Streaming max-shift log-sum-exp accumulator. Rescales only when a new
/// maximum appears, so each term costs one exp.
class LogSumExp {
public:
    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max_) {
            sum_ += std::exp(x - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - x) + 1.0;
            max_ = x;
        }
    }

    double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Dot product with four independent accumulators. Every linear-domain
/// recursion in the library goes through this one kernel, so two recursions
/// over identical inputs produce bit-identical outputs.
inline double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

/// Pairwise sum; order fixed by the input order only.
double pairwise_sum(std::span<const double> xs);

}  // namespace pinlab::numeric
