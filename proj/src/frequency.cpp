#include "tsdiff/frequency.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tsdiff/error.hpp"

namespace tsdiff {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::invalid_input, "eps must be positive");
}

// z^n + k_1 z^{n-1} + ... + k_n with z = s eps.
Complex characteristic(Complex z, const GainVector& k) {
    Complex acc{1.0, 0.0};
    for (double kj : k.values()) acc = acc * z + kj;
    return acc;
}

Complex checked_denominator(Complex s, const GainVector& k, double eps) {
    check_eps(eps);
    const Complex d = characteristic(s * eps, k);
    if (!(std::abs(d) >= kPoleProximity))
        throw Error(ErrorKind::pole_proximity, "transfer function evaluated on a pole");
    return d;
}

}  // namespace

Complex exp_partial_sum(Complex x, std::size_t r) {
    Complex term{1.0, 0.0};
    Complex sum = term;
    for (std::size_t m = 1; m <= r; ++m) {
        term *= x / static_cast<double>(m);
        sum += term;
    }
    return sum;
}

Complex stage1_tf(Complex s, const GainVector& k, double eps) {
    const Complex d = checked_denominator(s, k, eps);
    const Complex z = s * eps;
    Complex num{0.0, 0.0};
    for (double kj : k.values()) num = num * z + kj;
    return num / d;
}

Complex innovation_tf(Complex s, const GainVector& k, double eps) {
    const Complex d = checked_denominator(s, k, eps);
    return std::pow(s * eps, static_cast<int>(k.order())) / d;
}

Complex stage2_tf(std::size_t i, Complex s, const GainVector& k, double eps, double delay, double delta_g) {
    const std::size_t n = k.order();
    if (i < 1 || i > n) throw Error(ErrorKind::invalid_input, "output index must be in 1..n");
    const Complex d = checked_denominator(s, k, eps);
    const Complex z = s * eps;
    const Complex x = s * (delay + delta_g);
    Complex num{0.0, 0.0};
    for (std::size_t j = i; j <= n; ++j) num = num * z + k(j) * exp_partial_sum(x, j - i);
    return ideal_tf(i, s) * std::exp(-s * delay) * num / d;
}

Complex taylor_truncation(std::size_t n, std::size_t i, Complex s, double delta) {
    if (i < 1 || i > n) throw Error(ErrorKind::invalid_input, "output index must be in 1..n");
    const std::size_t r = n - i;
    const Complex x = s * delta;
    if (std::abs(x) >= 1.0) return std::exp(-x) * exp_partial_sum(x, r) - 1.0;

    // Small |x|: sum the exponential tail directly to avoid cancellation against 1.
    Complex term{1.0, 0.0};
    for (std::size_t m = 1; m <= r; ++m) term *= x / static_cast<double>(m);
    Complex tail{0.0, 0.0};
    for (std::size_t m = r + 1; m < r + 200; ++m) {
        term *= x / static_cast<double>(m);
        tail += term;
        if (std::abs(term) <= 1e-18 * std::abs(tail)) break;
    }
    return -std::exp(-x) * tail;
}

Complex ideal_tf(std::size_t i, Complex s) {
    if (i < 1) throw Error(ErrorKind::invalid_input, "output index must be >= 1");
    return std::pow(s, static_cast<int>(i - 1));
}

csv::Table bode_grid(const DifferentiatorSpec& spec, std::span<const std::size_t> outputs, double w_min,
                     double w_max, std::size_t points) {
    if (!(w_min > 0.0) || !(w_max > w_min) || points < 2)
        throw Error(ErrorKind::invalid_input, "bode grid needs 0 < w_min < w_max and at least 2 points");
    if (outputs.empty()) throw Error(ErrorKind::invalid_input, "bode grid needs at least one output");
    spec.validate();
    const double eps = 1.0 / spec.r_max();
    // The baseline chain is the predicting stage with no Taylor correction.
    const double delta_g = spec.method == Method::baseline ? -spec.delta : spec.delta_g;

    csv::Table table;
    table.header.push_back("omega");
    for (auto i : outputs) {
        table.header.push_back("mag_" + std::to_string(i));
        table.header.push_back("phase_deg_" + std::to_string(i));
    }
    table.columns.assign(table.header.size(), std::vector<double>(points));

    const double log_min = std::log10(w_min);
    const double log_step = (std::log10(w_max) - log_min) / static_cast<double>(points - 1);
    for (std::size_t p = 0; p < points; ++p)
        table.columns[0][p] = std::pow(10.0, log_min + log_step * static_cast<double>(p));

    for (std::size_t o = 0; o < outputs.size(); ++o) {
        auto& mag = table.columns[1 + 2 * o];
        auto& phase = table.columns[2 + 2 * o];
        double previous = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
            const Complex h =
                stage2_tf(outputs[o], Complex{0.0, table.columns[0][p]}, spec.k, eps, spec.delta, delta_g);
            mag[p] = std::abs(h);
            double deg = std::arg(h) * 180.0 / std::numbers::pi;
            if (p > 0) deg -= 360.0 * std::round((deg - previous) / 360.0);
            phase[p] = previous = deg;
        }
    }
    return table;
}

}  // namespace tsdiff
