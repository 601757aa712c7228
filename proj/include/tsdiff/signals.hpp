#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <random>
#include <variant>
#include <vector>

namespace tsdiff {

/// amplitude * sin(frequency * t + phase); frequency in rad/s.
struct Sine {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;

    friend bool operator==(const Sine&, const Sine&) = default;
};

/// sum_m coefficients[m] * t^m
struct Polynomial {
    std::vector<double> coefficients;

    friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

struct SumOfSines {
    std::vector<Sine> terms;

    friend bool operator==(const SumOfSines&, const SumOfSines&) = default;
};

/// Time-ordered samples, linearly interpolated. Supports lookups at t - delay.
class DelayBuffer {
public:
    struct Sample {
        double t;
        double value;
        friend bool operator==(const Sample&, const Sample&) = default;
    };

    /// Samples must arrive in strictly increasing time.
    void push(double t, double value);

    /// Linear interpolation at t - delta. Throws underflow when t - delta
    /// precedes the earliest retained sample.
    double sample(double t, double delta) const;

    /// Drops samples no longer needed to interpolate at or after `t`.
    void discard_before(double t);

    bool empty() const noexcept { return samples_.empty(); }
    std::size_t size() const noexcept { return samples_.size(); }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }
    const std::deque<Sample>& samples() const noexcept { return samples_; }

    friend bool operator==(const DelayBuffer&, const DelayBuffer&) = default;

private:
    std::deque<Sample> samples_;
};

/// A signal known only through samples; derivatives are unavailable.
struct Recorded {
    DelayBuffer samples;

    friend bool operator==(const Recorded&, const Recorded&) = default;
};

using SignalForm = std::variant<Sine, Polynomial, SumOfSines, Recorded>;

struct NoiseSpec {
    enum class Kind { uniform, gaussian };
    Kind kind = Kind::uniform;
    /// Half-width for uniform, standard deviation for gaussian.
    double scale = 0.01;
    std::uint64_t seed = 42;

    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct SignalSpec {
    SignalForm form = Sine{};
    double delay = 0.0;
    std::optional<NoiseSpec> noise;

    void validate() const;

    friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

/// Whether truth() can supply derivatives of every order.
bool has_analytic_derivatives(const SignalSpec& spec);

/// Exact v^{(order)}(t). Recorded signals support order 0 only.
double truth(const SignalSpec& spec, double t, unsigned order);

/// Seeded per-step noise sequence. Values are generated lazily in step
/// order and retained, so at(k) is stable for the lifetime of the stream.
class NoiseStream {
public:
    explicit NoiseStream(const NoiseSpec& spec);

    double at(std::uint64_t step);

private:
    NoiseSpec spec_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> uniform_;
    std::normal_distribution<double> gaussian_;
    std::vector<double> drawn_;
};

/// Noise-free delayed measurement v(t - delay). Analytic forms extend to
/// negative arguments; recorded signals hold their first sample.
double measure(const SignalSpec& spec, double t);

/// v(t - delay) plus the noise value held for integration step `step`.
double measure(const SignalSpec& spec, double t, NoiseStream& noise, std::uint64_t step);

/// Two-column (time, value) CSV with one header row.
Recorded load_recorded_csv(const std::filesystem::path& path);

}  // namespace tsdiff
