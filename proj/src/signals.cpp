#include "tsdiff/signals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "tsdiff/csv.hpp"
#include "tsdiff/error.hpp"

namespace tsdiff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double sine_derivative(const Sine& s, double t, unsigned order) {
    const double arg = s.frequency * t + s.phase;
    const double scale = s.amplitude * std::pow(s.frequency, static_cast<double>(order));
    switch (order % 4) {
        case 0: return scale * std::sin(arg);
        case 1: return scale * std::cos(arg);
        case 2: return -scale * std::sin(arg);
        default: return -scale * std::cos(arg);
    }
}

double polynomial_derivative(const Polynomial& p, double t, unsigned order) {
    const auto& c = p.coefficients;
    if (order >= c.size()) return 0.0;
    double acc = 0.0;
    for (std::size_t m = c.size(); m-- > order;) {
        // d^order/dt^order t^m = m!/(m-order)! t^{m-order}
        double falling = 1.0;
        for (std::size_t q = 0; q < order; ++q) falling *= static_cast<double>(m - q);
        acc = acc * t + falling * c[m];
    }
    return acc;
}

double recorded_value(const Recorded& r, double t) {
    if (r.samples.empty()) throw Error(ErrorKind::invalid_input, "recorded signal has no samples");
    return r.samples.sample(t, 0.0);
}

}  // namespace

void DelayBuffer::push(double t, double value) {
    if (!std::isfinite(t) || !std::isfinite(value))
        throw Error(ErrorKind::invalid_input, "buffer sample must be finite");
    if (!samples_.empty() && !(t > samples_.back().t))
        throw Error(ErrorKind::invalid_input, "buffer samples must be strictly increasing in time");
    samples_.push_back({t, value});
}

double DelayBuffer::sample(double t, double delta) const {
    const double query = t - delta;
    if (samples_.empty() || query < samples_.front().t)
        throw Error(ErrorKind::underflow, "delayed query at t=" + std::to_string(query) +
                                              " precedes the earliest buffered sample");
    if (query > samples_.back().t)
        throw Error(ErrorKind::invalid_input, "delayed query at t=" + std::to_string(query) +
                                                  " is past the latest buffered sample");
    auto upper = std::upper_bound(samples_.begin(), samples_.end(), query,
                                  [](double q, const Sample& s) { return q < s.t; });
    const Sample& lo = *std::prev(upper);
    if (lo.t == query || upper == samples_.end()) return lo.value;
    const Sample& hi = *upper;
    const double w = (query - lo.t) / (hi.t - lo.t);
    return lo.value + w * (hi.value - lo.value);
}

void DelayBuffer::discard_before(double t) {
    while (samples_.size() > 1 && samples_[1].t <= t) samples_.pop_front();
}

void SignalSpec::validate() const {
    if (!(delay >= 0.0) || !std::isfinite(delay))
        throw Error(ErrorKind::invalid_input, "signal delay must be non-negative and finite");
    if (noise && (!(noise->scale >= 0.0) || !std::isfinite(noise->scale)))
        throw Error(ErrorKind::invalid_input, "noise scale must be non-negative and finite");
    if (const auto* p = std::get_if<Polynomial>(&form); p && p->coefficients.empty())
        throw Error(ErrorKind::invalid_input, "polynomial signal needs at least one coefficient");
    if (const auto* s = std::get_if<SumOfSines>(&form); s && s->terms.empty())
        throw Error(ErrorKind::invalid_input, "sum-of-sines signal needs at least one term");
    if (const auto* r = std::get_if<Recorded>(&form); r && r->samples.empty())
        throw Error(ErrorKind::invalid_input, "recorded signal has no samples");
}

bool has_analytic_derivatives(const SignalSpec& spec) { return !std::holds_alternative<Recorded>(spec.form); }

double truth(const SignalSpec& spec, double t, unsigned order) {
    return std::visit(
        overloaded{
            [&](const Sine& s) { return sine_derivative(s, t, order); },
            [&](const Polynomial& p) { return polynomial_derivative(p, t, order); },
            [&](const SumOfSines& sum) {
                double acc = 0.0;
                for (const auto& s : sum.terms) acc += sine_derivative(s, t, order);
                return acc;
            },
            [&](const Recorded& r) {
                if (order != 0)
                    throw Error(ErrorKind::invalid_input, "recorded signals have no analytic derivatives");
                return recorded_value(r, t);
            },
        },
        spec.form);
}

NoiseStream::NoiseStream(const NoiseSpec& spec)
    : spec_(spec), engine_(spec.seed), uniform_(-spec.scale, spec.scale), gaussian_(0.0, spec.scale) {}

double NoiseStream::at(std::uint64_t step) {
    while (drawn_.size() <= step) {
        const double value = spec_.kind == NoiseSpec::Kind::uniform ? uniform_(engine_) : gaussian_(engine_);
        drawn_.push_back(spec_.scale == 0.0 ? 0.0 : value);
    }
    return drawn_[step];
}

double measure(const SignalSpec& spec, double t) {
    if (const auto* r = std::get_if<Recorded>(&spec.form)) {
        const double query = std::max(t - spec.delay, r->samples.front().t);
        return r->samples.sample(query, 0.0);
    }
    return truth(spec, t - spec.delay, 0);
}

double measure(const SignalSpec& spec, double t, NoiseStream& noise, std::uint64_t step) {
    return measure(spec, t) + noise.at(step);
}

Recorded load_recorded_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    const auto table = csv::parse(text.str());
    if (table.columns.size() != 2)
        throw Error(ErrorKind::invalid_input, path.string() + ": expected two columns (time, value)");
    Recorded rec;
    for (std::size_t r = 0; r < table.rows(); ++r) rec.samples.push(table.columns[0][r], table.columns[1][r]);
    if (rec.samples.empty()) throw Error(ErrorKind::invalid_input, path.string() + ": no samples");
    return rec;
}

}  // namespace tsdiff
