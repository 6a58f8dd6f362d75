#pragma once

#include <cstdint>
#include <vector>

namespace subdetect {

/// Neumaier compensated summation. All constraint/identity sums in the
/// library go through this so tolerances in the 1e-12 range are meaningful.
class KahanSum {
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

/// Streaming log-sum-exp: feeds terms one at a time, never overflows
/// as long as individual terms are finite.
class LogSumExp {
public:
    void add(double log_term);
    /// log(sum of exp(terms)); -inf when no terms were added.
    double value() const;
    std::size_t count() const { return count_; }

private:
    double max_ = 0.0;
    double acc_ = 0.0; // sum of exp(term - max_)
    std::size_t count_ = 0;
};

double log_binomial(int n, int k);

/// Standard normal quantile / cdf (Boost.Math behind the scenes).
double normal_quantile(double p);
double normal_cdf(double x);

/// log(cosh(x)) without overflow for large |x|.
double log_cosh(double x);

/// Lexicographic enumeration of k-subsets of {1..n}. `first_subset` yields
/// {1,...,k}; `next_subset` advances in place, returning false after the
/// last subset {n-k+1,...,n}.
std::vector<int> first_subset(int k);
bool next_subset(std::vector<int>& subset, int n);

} // namespace subdetect
