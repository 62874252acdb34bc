#include "depas/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace depas {

double n_opt(double lambda, double c_avg, double load)
{
    return lambda / (c_avg * load);
}

double erlang_c(std::size_t m, double a)
{
    if (m == 0 || !(a < static_cast<double>(m))) {
        throw std::domain_error("erlang_c: offered load must be below the server count");
    }
    if (a <= 0.0) {
        return 0.0;
    }
    // Erlang-B by the standard recurrence, then converted to Erlang-C.
    double b = 1.0;
    for (std::size_t k = 1; k <= m; ++k) {
        b = a * b / (static_cast<double>(k) + a * b);
    }
    const double md = static_cast<double>(m);
    return md * b / (md - a * (1.0 - b));
}

double mmm_response_time(double lambda, double mu, std::size_t m, double network_latency)
{
    const double capacity = static_cast<double>(m) * mu;
    if (m == 0 || !(lambda < capacity)) {
        throw std::domain_error("mmm_response_time: arrival rate exceeds service capacity");
    }
    const double wait = erlang_c(m, lambda / mu) / (capacity - lambda);
    return 1.0 / mu + wait + 2.0 * network_latency;
}

MetricsRecorder::Bucket& MetricsRecorder::bucket(SimTime t)
{
    const auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
    if (k >= buckets_.size()) {
        buckets_.resize(k + 1);
    }
    return buckets_[k];
}

void MetricsRecorder::issued(SimTime t)
{
    bucket(t).issued += 1;
    if (t >= warmup_) {
        total_issued_ += 1;
    }
}

void MetricsRecorder::processed(SimTime t, double response_time)
{
    auto& b = bucket(t);
    b.processed += 1;
    b.resp_sum += response_time;
    if (t >= warmup_) {
        total_processed_ += 1;
        total_resp_ += response_time;
    }
}

void MetricsRecorder::rejected(SimTime t, std::size_t count)
{
    bucket(t).rejected += static_cast<double>(count);
    if (t >= warmup_) {
        total_rejected_ += static_cast<double>(count);
    }
}

void MetricsRecorder::lost(SimTime t, std::size_t count)
{
    bucket(t).lost += static_cast<double>(count);
    if (t >= warmup_) {
        total_lost_ += static_cast<double>(count);
    }
}

void MetricsRecorder::service_started(SimTime t, double pending_time)
{
    auto& b = bucket(t);
    b.pend_sum += pending_time;
    b.pend_count += 1;
}

void MetricsRecorder::sample(SimTime t, const Gauges& g)
{
    auto& b = bucket(t);
    b.gauges = g;
    b.sampled = true;
}

RunResult MetricsRecorder::finish(SimTime horizon, std::uint64_t seed) const
{
    RunResult out;
    out.seed = seed;
    const auto count = static_cast<std::size_t>(std::max(0.0, std::ceil(horizon)));
    out.frames.reserve(count);
    double in_system = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const Bucket empty{};
        const Bucket& b = k < buckets_.size() ? buckets_[k] : empty;
        MetricsFrame f;
        f.t = static_cast<double>(k);
        f.issued = b.issued;
        f.processed = b.processed;
        f.rejected = b.rejected;
        f.lost = b.lost;
        in_system += b.issued - b.processed - b.rejected - b.lost;
        f.in_system = in_system;
        if (b.processed > 0) {
            f.resp_time = b.resp_sum / b.processed;
        }
        if (b.pend_count > 0) {
            f.pend_time = b.pend_sum / b.pend_count;
        }
        if (b.sampled) {
            const auto& g = b.gauges;
            f.nodes = g.nodes;
            f.mean_load = g.mean_load;
            f.n_opt_des = n_opt(g.lambda, g.c_avg, g.l_des);
            f.n_opt_min = n_opt(g.lambda, g.c_avg, g.l_min);
            f.n_opt_max = n_opt(g.lambda, g.c_avg, g.l_max);
            const auto m = static_cast<std::size_t>(g.nodes);
            if (m > 0 && g.lambda < static_cast<double>(m) * g.c_avg) {
                f.opt_resp_time = mmm_response_time(g.lambda, g.c_avg, m, g.network_latency);
            }
        }
        out.frames.push_back(f);
    }
    auto& s = out.summary;
    s.issued = total_issued_;
    s.processed = total_processed_;
    s.rejected = total_rejected_;
    s.lost = total_lost_;
    s.avg_resp_time = total_processed_ > 0 ? total_resp_ / total_processed_ : 0.0;
    s.rejected_pct = total_issued_ > 0 ? 100.0 * total_rejected_ / total_issued_ : 0.0;
    s.lost_pct = total_issued_ > 0 ? 100.0 * total_lost_ / total_issued_ : 0.0;
    return out;
}

namespace {

struct EnvelopeBuilder
{
    double lo = 0.0, hi = 0.0, sum = 0.0;
    std::size_t n = 0;

    void add(std::optional<double> v)
    {
        if (!v) {
            return;
        }
        if (n == 0) {
            lo = hi = *v;
        } else {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
        sum += *v;
        ++n;
    }

    Envelope build() const
    {
        if (n == 0) {
            return {};
        }
        // Clamp so that rounding in the mean never escapes [min, max].
        const double avg = std::clamp(sum / static_cast<double>(n), lo, hi);
        return {lo, avg, hi};
    }
};

template <class Get>
Envelope envelope(const std::vector<RunResult>& runs, std::size_t k, Get get)
{
    EnvelopeBuilder b;
    for (const auto& r : runs) {
        b.add(get(r.frames[k]));
    }
    return b.build();
}

} // namespace

RunAggregate aggregate(const std::vector<RunResult>& runs, const std::string& scenario)
{
    RunAggregate agg;
    agg.scenario = scenario;
    agg.runs = runs.size();
    if (runs.empty()) {
        return agg;
    }
    const std::size_t len = runs.front().frames.size();
    for (const auto& r : runs) {
        if (r.frames.size() != len) {
            throw std::invalid_argument("aggregate: runs have different frame counts");
        }
    }
    agg.frames.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
        AggregateFrame f;
        f.t = runs.front().frames[k].t;
        f.issued = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.issued); });
        f.processed = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.processed); });
        f.rejected = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.rejected); });
        f.lost = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.lost); });
        f.nodes = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.nodes); });
        f.n_opt_des = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.n_opt_des); });
        f.n_opt_min = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.n_opt_min); });
        f.n_opt_max = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.n_opt_max); });
        f.mean_load = envelope(runs, k, [](const MetricsFrame& m) { return std::optional<double>(m.mean_load); });
        f.resp_time = envelope(runs, k, [](const MetricsFrame& m) { return m.resp_time; });
        f.pend_time = envelope(runs, k, [](const MetricsFrame& m) { return m.pend_time; });
        f.opt_resp_time = envelope(runs, k, [](const MetricsFrame& m) { return m.opt_resp_time; });
        agg.frames.push_back(f);
    }
    auto& s = agg.summary;
    const auto n = static_cast<double>(runs.size());
    for (const auto& r : runs) {
        s.avg_resp_time += r.summary.avg_resp_time / n;
        s.rejected_pct += r.summary.rejected_pct / n;
        s.lost_pct += r.summary.lost_pct / n;
        s.issued += r.summary.issued / n;
        s.processed += r.summary.processed / n;
        s.rejected += r.summary.rejected / n;
        s.lost += r.summary.lost / n;
    }
    return agg;
}

const std::vector<std::string>& frame_columns()
{
    static const std::vector<std::string> columns = [] {
        const std::vector<std::string> base{"issued",    "processed", "rejected",  "lost",      "nodes",
                                            "n_opt_des", "n_opt_min", "n_opt_max", "mean_load", "resp_time",
                                            "pend_time", "opt_resp_time"};
        std::vector<std::string> cols{"t"};
        cols.insert(cols.end(), base.begin(), base.end());
        for (const auto& b : base) {
            cols.push_back(b + "_min");
            cols.push_back(b + "_max");
        }
        return cols;
    }();
    return columns;
}

namespace {

void put(std::ostream& out, std::optional<double> v)
{
    out << ',';
    if (v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", *v);
        out << buf;
    }
}

} // namespace

void write_frames_csv(std::ostream& out, const RunAggregate& agg)
{
    const auto& cols = frame_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "") << cols[i];
    }
    out << '\n';
    for (const auto& f : agg.frames) {
        const Envelope* e[] = {&f.issued,    &f.processed, &f.rejected,  &f.lost,      &f.nodes,
                               &f.n_opt_des, &f.n_opt_min, &f.n_opt_max, &f.mean_load, &f.resp_time,
                               &f.pend_time, &f.opt_resp_time};
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", f.t);
        out << buf;
        for (const auto* x : e) {
            put(out, x->avg);
        }
        for (const auto* x : e) {
            put(out, x->min);
            put(out, x->max);
        }
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const RunAggregate& agg)
{
    out << "scenario,avg_resp_time_s,rejected_pct,lost_pct\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f\n", agg.scenario.c_str(), agg.summary.avg_resp_time,
                  agg.summary.rejected_pct, agg.summary.lost_pct);
    out << buf;
}

void emit_csv(const RunAggregate& agg, const std::string& dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    const std::string stem = agg.scenario.empty() ? "scenario" : agg.scenario;
    const fs::path frames = fs::path(dir) / (stem + "_frames.csv");
    const fs::path summary = fs::path(dir) / (stem + "_summary.csv");
    std::ofstream f(frames, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot write " + frames.string());
    }
    write_frames_csv(f, agg);
    std::ofstream s(summary, std::ios::binary);
    if (!s) {
        throw std::runtime_error("cannot write " + summary.string());
    }
    write_summary_csv(s, agg);
    if (!f || !s) {
        throw std::runtime_error("write failed under " + dir);
    }
}

} // namespace depas
