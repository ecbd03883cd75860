#pragma once

#include <cmath>

namespace usd {

// Neumaier-compensated accumulator; power sums over up to ~1e6 opinion
// classes must stay well below the 1e-9 oracle tolerances.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline bool close_rel(double a, double b, double rtol, double atol = 1e-14) {
    const double scale = std::fmax(std::fabs(a), std::fabs(b));
    return std::fabs(a - b) <= rtol * scale + atol;
}

}  // namespace usd
