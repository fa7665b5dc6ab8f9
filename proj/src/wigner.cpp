#include "isoflow/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace isoflow {

namespace {

// Arguments arrive as doubles but must be integers or half-integers.
// Work in doubled units so everything is integral.
bool to_twice(double x, long& out) {
    double t = 2.0 * x;
    double r = std::round(t);
    if (std::abs(t - r) > 1e-9) return false;
    out = long(r);
    return true;
}

long double ln_fact(long n) {
    return std::lgammal((long double)n + 1.0L);
}

}  // namespace

double wigner3j(double l1, double l2, double l3, double m1, double m2, double m3) {
    long tl1, tl2, tl3, tm1, tm2, tm3;
    if (!to_twice(l1, tl1) || !to_twice(l2, tl2) || !to_twice(l3, tl3) || !to_twice(m1, tm1) ||
        !to_twice(m2, tm2) || !to_twice(m3, tm3))
        return 0.0;

    // selection rules
    if (tm1 + tm2 + tm3 != 0) return 0.0;
    if (std::abs(tm1) > tl1 || std::abs(tm2) > tl2 || std::abs(tm3) > tl3) return 0.0;
    if (tl3 < std::abs(tl1 - tl2) || tl3 > tl1 + tl2) return 0.0;
    // l_i +- m_i must be integral (same parity in doubled units)
    if ((tl1 + tm1) % 2 || (tl2 + tm2) % 2 || (tl3 + tm3) % 2) return 0.0;
    // l1+l2+l3 must be an integer
    if ((tl1 + tl2 + tl3) % 2) return 0.0;

    // all the factorial arguments below are integers; compute them in plain units
    const long a1 = (tl1 + tl2 - tl3) / 2;
    const long a2 = (tl1 - tl2 + tl3) / 2;
    const long a3 = (-tl1 + tl2 + tl3) / 2;
    const long a4 = (tl1 + tl2 + tl3) / 2 + 1;

    const long b1 = (tl1 + tm1) / 2, b2 = (tl1 - tm1) / 2;
    const long b3 = (tl2 + tm2) / 2, b4 = (tl2 - tm2) / 2;
    const long b5 = (tl3 + tm3) / 2, b6 = (tl3 - tm3) / 2;

    const long double ln_pref = 0.5L * (ln_fact(a1) + ln_fact(a2) + ln_fact(a3) - ln_fact(a4) + ln_fact(b1) +
                                        ln_fact(b2) + ln_fact(b3) + ln_fact(b4) + ln_fact(b5) + ln_fact(b6));

    // Racah sum over k
    const long c1 = a1;                      // l1+l2-l3
    const long c2 = b2;                      // l1-m1
    const long c3 = b3;                      // l2+m2
    const long c4 = (tl3 - tl2 + tm1) / 2;   // l3-l2+m1 (lower bound -c4)
    const long c5 = (tl3 - tl1 - tm2) / 2;   // l3-l1-m2 (lower bound -c5)

    const long kmin = std::max({0L, -c4, -c5});
    const long kmax = std::min({c1, c2, c3});
    if (kmin > kmax) return 0.0;

    long double sum = 0.0L;
    for (long k = kmin; k <= kmax; ++k) {
        const long double ln_den =
            ln_fact(k) + ln_fact(c1 - k) + ln_fact(c2 - k) + ln_fact(c3 - k) + ln_fact(c4 + k) + ln_fact(c5 + k);
        const long double term = std::exp(ln_pref - ln_den);
        sum += (k % 2) ? -term : term;
    }

    const long phase = (tl1 - tl2 - tm3) / 2;
    const long double sign = (std::labs(phase) % 2) ? -1.0L : 1.0L;
    return double(sign * sum);
}

}  // namespace isoflow
