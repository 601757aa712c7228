#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tsdiff {

/// Roots of the characteristic polynomial must satisfy Re(root) < -kHurwitzTolerance.
inline constexpr double kHurwitzTolerance = 1e-9;

/// Default floor on R = 1/eps for scheduled gains.
inline constexpr double kDefaultRMin = 1e-3;

/**
 * Observer coefficients k_1..k_n of the characteristic polynomial
 *
 *     s^n + k_1 s^{n-1} + ... + k_{n-1} s + k_n.
 *
 * Construction checks order (n >= 2) and finiteness only; stability is a
 * separate question answered by verify_hurwitz().
 */
class GainVector {
public:
    explicit GainVector(std::vector<double> k);

    std::size_t order() const noexcept { return k_.size(); }

    /// 1-based access, matching k_1..k_n.
    double operator()(std::size_t i) const { return k_.at(i - 1); }

    std::span<const double> values() const noexcept { return k_; }

    friend bool operator==(const GainVector&, const GainVector&) = default;

private:
    std::vector<double> k_;
};

struct HurwitzReport {
    bool stable = false;
    std::vector<std::complex<double>> roots;
};

/// Eigenvalues of the companion matrix, stable iff every Re(root) < -tolerance.
HurwitzReport verify_hurwitz(const GainVector& k, double tolerance = kHurwitzTolerance);

/// Stage-one injection gains k_i / eps^i, i = 1..n.
std::vector<double> injection_gains(const GainVector& k, double eps);

/**
 * Taylor-corrected injection gains for the predicting stage:
 *
 *     g_i = sum_{j=i}^{n} delta_eff^{j-i} k_j / ((j-i)! eps^j)
 *
 * With delta_eff == 0 the result is bit-identical to injection_gains().
 * Precondition: k is Hurwitz (not re-checked here).
 * Throws RangeError naming the first gain position that overflows.
 */
std::vector<double> second_step_gains(const GainVector& k, double eps, double delta_eff);

/**
 * Peaking-suppression ramp for R = 1/eps:
 *
 *     R(t) = max(R_min, R0 t^p)   for t <= t_max
 *     R(t) = R(t_max)             for t >  t_max
 */
struct GainSchedule {
    double r0 = 100.0;
    double p = 7.0;
    double t_max = 1.0;
    double r_min = kDefaultRMin;

    /// Throws invalid-input when a parameter is out of its domain.
    void validate() const;

    /// Peak value R(t_max).
    double r_max() const;

    friend bool operator==(const GainSchedule&, const GainSchedule&) = default;
};

double eval_schedule(const GainSchedule& sched, double t);

/// Stage-one and stage-two gains for one value of eps.
struct GainSet {
    double eps = 0.0;
    std::vector<double> stage1;
    std::vector<double> stage2;
};

/// Memoizes the last GainSet; recomputes only when eps changes.
class GainCache {
public:
    GainCache(GainVector k, double delta_eff);

    const GainSet& at(double eps);

    std::size_t recomputations() const noexcept { return recomputations_; }

private:
    GainVector k_;
    double delta_eff_;
    GainSet current_;
    bool valid_ = false;
    std::size_t recomputations_ = 0;
};

}  // namespace tsdiff
