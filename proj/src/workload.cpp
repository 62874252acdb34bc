#include "depas/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace depas {

RateTrace RateTrace::constant(double rate, double duration)
{
    RateTrace t;
    t.points.push_back({0.0, rate});
    t.duration = duration;
    return t;
}

void RateTrace::validate() const
{
    if (points.empty()) {
        throw ParseError("trace: no breakpoints");
    }
    if (points.front().offset != 0.0) {
        throw ParseError("trace: first breakpoint must be at time 0");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].rate >= 0.0)) {
            throw ParseError("trace: breakpoint " + std::to_string(i + 1) + " has a negative rate");
        }
        if (i > 0 && !(points[i].offset > points[i - 1].offset)) {
            throw ParseError("trace: breakpoint " + std::to_string(i + 1) + " is not after the previous one");
        }
    }
    if (duration < points.back().offset) {
        throw ParseError("trace: duration ends before the last breakpoint");
    }
}

double RateTrace::peak() const noexcept
{
    double p = 0.0;
    for (const auto& b : points) {
        p = std::max(p, b.rate);
    }
    return p;
}

void TraceTransform::validate() const
{
    if (!(rate_scale > 0.0)) {
        throw ParseError("workload.rate_scale: must be > 0");
    }
    if (!(time_scale > 0.0)) {
        throw ParseError("workload.time_scale: must be > 0");
    }
}

TraceTransform compose(const TraceTransform& first, const TraceTransform& second) noexcept
{
    return {first.rate_scale * second.rate_scale, first.time_scale * second.time_scale};
}

RateTrace load_trace(std::istream& in, const std::string& source_name)
{
    RateTrace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        double offset = 0.0;
        double rate = 0.0;
        if (!(fields >> offset)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": expected 'time rate'");
        }
        std::string rest;
        if (!(fields >> rate) || (fields >> rest)) {
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": expected exactly two numbers");
        }
        if (!(rate >= 0.0)) {
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": negative rate");
        }
        if (trace.points.empty() && offset != 0.0) {
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": first breakpoint must be at time 0");
        }
        if (!trace.points.empty() && !(offset > trace.points.back().offset)) {
            throw ParseError(source_name + ":" + std::to_string(lineno) + ": time is not increasing");
        }
        trace.points.push_back({offset, rate});
    }
    if (trace.points.empty()) {
        throw ParseError(source_name + ": empty trace");
    }
    trace.duration = trace.points.back().offset;
    return trace;
}

RateTrace load_trace_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open trace file '" + path + "'");
    }
    return load_trace(in, path);
}

void write_trace(std::ostream& out, const RateTrace& trace)
{
    char buf[64];
    for (const auto& b : trace.points) {
        std::snprintf(buf, sizeof buf, "%.10g %.10g\n", b.offset, b.rate);
        out << buf;
    }
}

double rate_at(const RateTrace& trace, const TraceTransform& transform, SimTime t) noexcept
{
    if (t < 0.0 || trace.points.empty()) {
        return 0.0;
    }
    const double original = t / transform.time_scale;
    if (original > trace.duration) {
        return 0.0;
    }
    auto it = std::upper_bound(trace.points.begin(), trace.points.end(), original,
                               [](double v, const RateBreakpoint& b) { return v < b.offset; });
    if (it == trace.points.begin()) {
        return 0.0;
    }
    return std::prev(it)->rate * transform.rate_scale;
}

double transformed_duration(const RateTrace& trace, const TraceTransform& transform) noexcept
{
    return trace.duration * transform.time_scale;
}

double mean_rate(const RateTrace& trace, const TraceTransform& transform) noexcept
{
    if (trace.points.empty() || trace.duration <= 0.0) {
        return trace.points.empty() ? 0.0 : trace.points.front().rate * transform.rate_scale;
    }
    double area = 0.0;
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
        const double end = i + 1 < trace.points.size() ? trace.points[i + 1].offset : trace.duration;
        area += trace.points[i].rate * (end - trace.points[i].offset);
    }
    return area / trace.duration * transform.rate_scale;
}

namespace {

double smooth_step(double t, double at, double width)
{
    return 1.0 / (1.0 + std::exp(-(t - at) / width));
}

} // namespace

RateTrace synthetic_town_hall_trace(std::uint64_t seed)
{
    constexpr double hours48 = 172800.0;
    constexpr double step = 60.0;
    RngStream rng(seed, StreamTag::workload);

    // Shape in compressed seconds (0..2700).
    auto shape = [](double tc) {
        double r = 150.0;
        r += 110.0 * smooth_step(tc, 100.0, 4.0);
        r += 120.0 * smooth_step(tc, 600.0, 6.0) + 0.05 * std::max(0.0, tc - 600.0) * (1.0 - smooth_step(tc, 1600.0, 4.0));
        r += 250.0 * smooth_step(tc, 1600.0, 5.0) * (1.0 - smooth_step(tc, 2000.0, 5.0));
        r += 90.0 * std::exp(-std::pow((tc - 1700.0) / 45.0, 2.0));
        r += 60.0 * std::exp(-std::pow((tc - 1900.0) / 40.0, 2.0));
        r -= 140.0 * smooth_step(tc, 2000.0, 5.0);
        r -= 0.12 * std::max(0.0, tc - 2000.0);
        return std::max(r, 20.0);
    };

    RateTrace trace;
    for (double t = 0.0; t <= hours48 + 1e-9; t += step) {
        const double noise = 1.0 + 0.04 * (2.0 * rng.uniform() - 1.0);
        trace.points.push_back({t, shape(t * town_hall_time_scale) * noise});
    }
    const double peak = trace.peak();
    for (auto& b : trace.points) {
        b.rate = std::round(b.rate * 700.0 / peak * 100.0) / 100.0;
    }
    trace.duration = trace.points.back().offset;
    return trace;
}

ArrivalProcess::ArrivalProcess(RateTrace trace, TraceTransform transform)
    : trace_(std::move(trace)), transform_(transform), duration_(transformed_duration(trace_, transform_))
{
}

std::optional<SimTime> ArrivalProcess::next_positive_breakpoint(SimTime t) const noexcept
{
    const double original = t / transform_.time_scale;
    for (const auto& b : trace_.points) {
        if (b.offset > original && b.rate > 0.0) {
            return b.offset * transform_.time_scale;
        }
    }
    return std::nullopt;
}

std::optional<SimTime> ArrivalProcess::next_after(SimTime now, RngStream& rng) const
{
    SimTime t = now;
    for (;;) {
        double r = rate(t);
        if (r <= 0.0) {
            auto next = next_positive_breakpoint(t);
            if (!next || *next > duration_) {
                return std::nullopt;
            }
            t = *next;
            r = rate(t);
        }
        SimTime issue = t + rng.exponential(1.0 / r);
        if (issue <= now) {
            issue = std::nextafter(now, now + 1.0);
        }
        if (issue > duration_) {
            return std::nullopt;
        }
        // Never issue inside a zero-rate segment; resume from the gap's end instead.
        if (rate(issue) > 0.0) {
            return issue;
        }
        t = issue;
    }
}

} // namespace depas
