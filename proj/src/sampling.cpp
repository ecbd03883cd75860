#include "usd/sampling.hpp"

#include <cmath>

namespace usd {
namespace {

// CDF inversion; requires p <= 0.5 and n*p modest so q^n stays normal.
std::uint64_t binomial_inversion(Rng& rng, std::uint64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    for (;;) {
        double r = std::pow(q, static_cast<double>(n));
        double u = rng.next_double();
        std::uint64_t x = 0;
        bool stuck = false;
        while (u > r) {
            u -= r;
            ++x;
            if (x > n) {  // accumulated rounding ate the tail; redraw
                stuck = true;
                break;
            }
            r *= (a / static_cast<double>(x)) - s;
        }
        if (!stuck) return x;
    }
}

// BTPE; requires p <= 0.5 and n*p >= 30.
std::uint64_t binomial_btpe(Rng& rng, std::uint64_t n, double p) {
    const double r = p;
    const double q = 1.0 - r;
    const double nd = static_cast<double>(n);
    const double fm = nd * r + r;
    const double m = std::floor(fm);
    const double nrq = nd * r * q;
    const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
    const double xm = m + 0.5;
    const double xl = xm - p1;
    const double xr = xm + p1;
    const double c = 0.134 + 20.5 / (15.3 + m);
    double a = (fm - xl) / (fm - xl * r);
    const double laml = a * (1.0 + a / 2.0);
    a = (xr - fm) / (xr * q);
    const double lamr = a * (1.0 + a / 2.0);
    const double p2 = p1 * (1.0 + 2.0 * c);
    const double p3 = p2 + c / laml;
    const double p4 = p3 + c / lamr;

    for (;;) {
        const double u = rng.next_double() * p4;
        double v = rng.next_double();
        double y;

        if (u <= p1) {
            y = std::floor(xm - p1 * v + u);
            return static_cast<std::uint64_t>(y);
        }
        if (u <= p2) {  // parallelogram region
            const double x = xl + (u - p1) / c;
            v = v * c + 1.0 - std::fabs(m - x + 0.5) / p1;
            if (v > 1.0) continue;
            y = std::floor(x);
        } else if (u <= p3) {  // left exponential tail
            y = std::floor(xl + std::log(v) / laml);
            if (y < 0.0) continue;
            v = v * (u - p2) * laml;
        } else {  // right exponential tail
            y = std::floor(xr - std::log(v) / lamr);
            if (y > nd) continue;
            v = v * (u - p3) * lamr;
        }

        // Acceptance test for v against f(y)/f(m).
        const double k = std::fabs(y - m);
        if (k <= 20.0 || k >= nrq / 2.0 - 1.0) {
            // Evaluate f(y)/f(m) by explicit recurrence.
            const double s = r / q;
            const double aa = s * (nd + 1.0);
            double f = 1.0;
            if (m < y) {
                for (double i = m + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
            } else if (m > y) {
                for (double i = y + 1.0; i <= m; i += 1.0) f /= (aa / i - s);
            }
            if (v <= f) return static_cast<std::uint64_t>(y);
            continue;
        }

        // Squeeze, then the full Stirling-corrected log test.
        const double rho = (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.1666666666666) / nrq + 0.5);
        const double t = -k * k / (2.0 * nrq);
        const double alv = std::log(v);
        if (alv < t - rho) return static_cast<std::uint64_t>(y);
        if (alv > t + rho) continue;

        const double x1 = y + 1.0;
        const double f1 = m + 1.0;
        const double z = nd + 1.0 - m;
        const double w = nd - y + 1.0;
        const double z2 = z * z;
        const double x2 = x1 * x1;
        const double f2 = f1 * f1;
        const double w2 = w * w;
        const double bound =
            xm * std::log(f1 / x1) + (nd - m + 0.5) * std::log(z / w) +
            (y - m) * std::log(w * r / (x1 * q)) +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / f2) / f2) / f2) / f2) / f1 / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / z2) / z2) / z2) / z2) / z / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x1 / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / w2) / w2) / w2) / w2) / w / 166320.0;
        if (alv <= bound) return static_cast<std::uint64_t>(y);
    }
}

}  // namespace

std::uint64_t binomial(Rng& rng, std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(rng, n, 1.0 - p);
    if (static_cast<double>(n) * p < 30.0) return binomial_inversion(rng, n, p);
    return binomial_btpe(rng, n, p);
}

}  // namespace usd
