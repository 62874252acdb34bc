#pragma once

#include "depas/sim_core.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace depas {

/// Node count an omniscient controller would deploy: lambda / (c_avg * load).
double n_opt(double lambda, double c_avg, double load);

/// Probability that an arrival waits in an M/M/m queue with offered load a = lambda/mu.
/// Throws std::domain_error when a >= m.
double erlang_c(std::size_t m, double a);

/// Mean response time of an M/M/m system plus a round-trip network latency.
/// Throws std::domain_error when lambda >= m * mu.
double mmm_response_time(double lambda, double mu, std::size_t m, double network_latency);

/// One-second snapshot; frame t covers [t, t + 1). Gauges (nodes, load and
/// the optimal baselines) are sampled at the start of the frame.
struct MetricsFrame
{
    double t = 0.0;
    double issued = 0;
    double processed = 0;
    double rejected = 0;
    double lost = 0;
    double nodes = 0;
    double n_opt_des = 0.0;
    double n_opt_min = 0.0;
    double n_opt_max = 0.0;
    double mean_load = 0.0;
    std::optional<double> resp_time;
    std::optional<double> pend_time;
    std::optional<double> opt_resp_time;
    /// Requests issued but not yet terminated at the end of the frame.
    double in_system = 0;
};

/// Scalar summary of one run (or the run-weighted mean of several).
struct ScenarioSummary
{
    double avg_resp_time = 0.0;
    double rejected_pct = 0.0;
    double lost_pct = 0.0;
    double issued = 0;
    double processed = 0;
    double rejected = 0;
    double lost = 0;
};

struct RunResult
{
    std::vector<MetricsFrame> frames;
    ScenarioSummary summary;
    std::uint64_t seed = 0;
    /// One-second overlay connectivity checks (zero when not tracked).
    std::size_t connectivity_snapshots = 0;
    std::size_t connected_snapshots = 0;
};

/// Accumulates request and node lifecycle transitions into one-second frames.
class MetricsRecorder
{
public:
    explicit MetricsRecorder(double warmup = 0.0) : warmup_(warmup) {}

    void issued(SimTime t);
    void processed(SimTime t, double response_time);
    void rejected(SimTime t, std::size_t count = 1);
    void lost(SimTime t, std::size_t count = 1);
    void service_started(SimTime t, double pending_time);

    struct Gauges
    {
        double nodes = 0;
        double mean_load = 0.0;
        double lambda = 0.0;
        double c_avg = 1.0;
        double l_min = 0.6;
        double l_des = 0.7;
        double l_max = 0.8;
        double network_latency = 0.0;
    };
    /// Sets the gauges of the frame that starts at t.
    void sample(SimTime t, const Gauges& g);

    /// Finalizes frames [0, horizon) and the post-warmup summary.
    RunResult finish(SimTime horizon, std::uint64_t seed) const;

private:
    struct Bucket
    {
        double issued = 0;
        double processed = 0;
        double rejected = 0;
        double lost = 0;
        double resp_sum = 0.0;
        double pend_sum = 0.0;
        double pend_count = 0;
        bool sampled = false;
        MetricsRecorder::Gauges gauges{};
    };
    Bucket& bucket(SimTime t);

    double warmup_;
    std::vector<Bucket> buckets_;
    double total_issued_ = 0;
    double total_processed_ = 0;
    double total_rejected_ = 0;
    double total_lost_ = 0;
    double total_resp_ = 0.0;
};

/// Per-column statistic across runs.
struct Envelope
{
    std::optional<double> min;
    std::optional<double> avg;
    std::optional<double> max;
};

struct AggregateFrame
{
    double t = 0.0;
    Envelope issued, processed, rejected, lost, nodes, n_opt_des, n_opt_min, n_opt_max, mean_load, resp_time,
        pend_time, opt_resp_time;
};

struct RunAggregate
{
    std::string scenario;
    std::size_t runs = 0;
    std::vector<AggregateFrame> frames;
    ScenarioSummary summary;
};

/// Elementwise min/avg/max; throws std::invalid_argument on mismatched frame counts.
RunAggregate aggregate(const std::vector<RunResult>& runs, const std::string& scenario = "");

/// Column names of the frames file, in order.
const std::vector<std::string>& frame_columns();

void write_frames_csv(std::ostream& out, const RunAggregate& agg);
void write_summary_csv(std::ostream& out, const RunAggregate& agg);

/// Writes <dir>/<scenario>_frames.csv and <dir>/<scenario>_summary.csv.
/// Throws std::runtime_error when a file cannot be written.
void emit_csv(const RunAggregate& agg, const std::string& dir);

} // namespace depas
