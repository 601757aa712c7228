#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include "tsdiff/csv.hpp"
#include "tsdiff/dynamics.hpp"
#include "tsdiff/gains.hpp"

namespace tsdiff {

using Complex = std::complex<double>;

/// |denominator| below this is treated as sitting on a pole.
inline constexpr double kPoleProximity = 1e-300;

/// X_{1,1}(s) / (e^{-s delay} V(s)): the stage-one low-pass, without the delay factor.
Complex stage1_tf(Complex s, const GainVector& k, double eps);

/// (e^{-s delay} V - X_{1,1}) / (e^{-s delay} V) = (s eps)^n / D(s eps).
Complex innovation_tf(Complex s, const GainVector& k, double eps);

/**
 * X_{i,2}(s) / V(s) for i = 1..n, including the measurement factor e^{-s delay}:
 *
 *     s^{i-1} e^{-s delay} N_i(s) / D(s)
 *
 * with N_i = sum_{j=i}^{n} (s eps)^{n-j} k_j T_{j-i}(s (delay + delta_g)) and
 * T_r the order-r partial sum of the exponential series.
 */
Complex stage2_tf(std::size_t i, Complex s, const GainVector& k, double eps, double delay, double delta_g = 0.0);

/// e^{-s delta} T_{n-i}(s delta) - 1: relative deviation of the eps -> 0 stage-two response.
Complex taylor_truncation(std::size_t n, std::size_t i, Complex s, double delta);

/// s^{i-1}: the ideal (i-1)-th differentiator.
Complex ideal_tf(std::size_t i, Complex s);

/// sum_{m=0}^{r} x^m / m!
Complex exp_partial_sum(Complex x, std::size_t r);

/**
 * Bode grid for the stage-two outputs of `spec` at eps = 1/R_max:
 * columns omega, mag_{i}, phase_deg_{i} per requested output, `points`
 * log-spaced frequencies on [w_min, w_max]. Phase is unwrapped along the grid.
 */
csv::Table bode_grid(const DifferentiatorSpec& spec, std::span<const std::size_t> outputs, double w_min,
                     double w_max, std::size_t points);

}  // namespace tsdiff
