#include "subdetect/numeric.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace subdetect {

void LogSumExp::add(double log_term) {
    if (count_ == 0) {
        max_ = log_term;
        acc_ = 1.0;
    } else if (log_term <= max_) {
        acc_ += std::exp(log_term - max_);
    } else {
        acc_ = acc_ * std::exp(max_ - log_term) + 1.0;
        max_ = log_term;
    }
    ++count_;
}

double LogSumExp::value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(acc_);
}

double log_binomial(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
    static const boost::math::normal_distribution<double> unit;
    return boost::math::quantile(unit, p);
}

double normal_cdf(double x) {
    static const boost::math::normal_distribution<double> unit;
    return boost::math::cdf(unit, x);
}

double log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - M_LN2;
}

std::vector<int> first_subset(int k) {
    std::vector<int> s(static_cast<std::size_t>(k));
    std::iota(s.begin(), s.end(), 1);
    return s;
}

bool next_subset(std::vector<int>& subset, int n) {
    const int k = static_cast<int>(subset.size());
    int i = k - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - (k - 1 - i)) --i;
    if (i < 0) return false;
    ++subset[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

} // namespace subdetect
