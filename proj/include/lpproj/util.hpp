#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

namespace lpproj {

/// Shortest decimal text that parses back to exactly x ("inf", "-inf", "nan" for specials).
std::string format_real(double x);
double parse_real(const std::string& text, const std::string& what);
std::string lowercase(std::string text);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Runs task(i) for i in [0, count) on up to `workers` threads. Tasks must
/// write to disjoint outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

/// Default worker count (hardware concurrency, at least 1).
std::size_t default_workers();

}  // namespace lpproj
