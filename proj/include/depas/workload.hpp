#pragma once

#include "depas/rng.hpp"
#include "depas/sim_core.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace depas {

/// Raised for malformed trace or scenario input.
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct RateBreakpoint
{
    double offset = 0.0; // seconds from trace start
    double rate = 0.0;   // requests per second
};

/// Piecewise-constant request rate. Each breakpoint's rate holds until the
/// next one; the trace ends at `duration`.
struct RateTrace
{
    std::vector<RateBreakpoint> points;
    double duration = 0.0;

    static RateTrace constant(double rate, double duration);

    /// Throws ParseError when offsets are not strictly increasing from 0 or a rate is negative.
    void validate() const;
    double peak() const noexcept;
};

/// Multiplies rates by rate_scale and stretches (or compresses) time by time_scale.
struct TraceTransform
{
    double rate_scale = 1.0;
    double time_scale = 1.0;

    void validate() const;

    bool operator==(const TraceTransform&) const = default;
};

/// Applies `first` and then `second`.
TraceTransform compose(const TraceTransform& first, const TraceTransform& second) noexcept;

/// Parses "time_seconds rate_per_second" lines; '#' starts a comment.
RateTrace load_trace(std::istream& in, const std::string& source_name = "trace");
RateTrace load_trace_file(const std::string& path);
void write_trace(std::ostream& out, const RateTrace& trace);

/// Rate at transformed time t; 0 outside [0, transformed duration].
double rate_at(const RateTrace& trace, const TraceTransform& transform, SimTime t) noexcept;

double transformed_duration(const RateTrace& trace, const TraceTransform& transform) noexcept;

/// Time-averaged rate over the whole transformed trace.
double mean_rate(const RateTrace& trace, const TraceTransform& transform) noexcept;

/// Stand-in for the 48-hour collaborative-service trace: peak 700 req/s,
/// quiet start, steps around compressed seconds 100 and 600, a double-peaked
/// surge between 1600 and 2000 and a decaying tail. Breakpoints every minute.
RateTrace synthetic_town_hall_trace(std::uint64_t seed = 2008);

/// Compresses 48 hours into 45 minutes.
inline constexpr double town_hall_time_scale = 2700.0 / 172800.0;

/// Single-client Poisson arrival stream over a piecewise-constant rate.
class ArrivalProcess
{
public:
    ArrivalProcess(RateTrace trace, TraceTransform transform);

    /// Next issue time strictly after `now`, or nullopt when the trace is exhausted.
    std::optional<SimTime> next_after(SimTime now, RngStream& rng) const;

    double rate(SimTime t) const noexcept { return rate_at(trace_, transform_, t); }
    double duration() const noexcept { return duration_; }
    const RateTrace& trace() const noexcept { return trace_; }
    const TraceTransform& transform() const noexcept { return transform_; }

private:
    std::optional<SimTime> next_positive_breakpoint(SimTime t) const noexcept;

    RateTrace trace_;
    TraceTransform transform_;
    double duration_;
};

} // namespace depas
