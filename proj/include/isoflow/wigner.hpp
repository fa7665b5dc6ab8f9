#pragma once

namespace isoflow {

/// Wigner 3j symbol for integer or half-integer arguments.
///
/// Evaluated by the Racah single-sum formula with log-factorials. Returns 0
/// when a selection rule fails (m1+m2+m3 != 0, triangle inequality, |m|>l,
/// or inconsistent integer/half-integer combinations). Accurate to ~1e-12
/// for l up to a few tens; the quantized basis for large spin is built by a
/// separate recurrence and only validated against this sum where it is stable.
double wigner3j(double l1, double l2, double l3, double m1, double m2, double m3);

}  // namespace isoflow
