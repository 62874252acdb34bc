#include "depas/checks.hpp"

#include "depas/mmm_cluster.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace depas {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

} // namespace

std::string format_check(const CheckResult& r)
{
    return std::string(r.pass ? "PASS " : "FAIL ") + r.name + ": " + r.detail;
}

double fraction_tracking_nopt(const RunAggregate& agg, double from, double tolerance)
{
    std::size_t total = 0;
    std::size_t close = 0;
    for (const auto& f : agg.frames) {
        if (f.t < from || !f.nodes.avg || !f.n_opt_des.avg) {
            continue;
        }
        ++total;
        const double target = *f.n_opt_des.avg;
        if (std::abs(*f.nodes.avg - target) <= tolerance * target) {
            ++close;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(close) / static_cast<double>(total);
}

ScenarioConfig convergence_config(double duration)
{
    ScenarioConfig c;
    c.name = "convergence";
    c.duration = duration;
    c.capacity = CapacityDistribution::homogeneous(1.0);
    c.workload.constant_rate = 100.0;
    c.workload.transform = {1.0, 1.0};
    return c;
}

CheckResult check_mmm_agreement(std::size_t m, double lambda, double mu, std::size_t completions,
                                std::uint64_t seed, double tolerance)
{
    const ConstantLatency latency{};
    const auto sim = simulate_mmm(m, lambda, mu, completions, seed, latency);
    const double expected = mmm_response_time(lambda, mu, m, latency.seconds);
    const double rel = std::abs(sim.mean_response - expected) / expected;
    CheckResult r;
    r.name = "mmm-agreement m=" + std::to_string(m) + fmt(" lambda=%g mu=%g", lambda, mu);
    r.pass = rel <= tolerance && sim.completed >= completions;
    r.detail = fmt("simulated %.4f s vs analytic %.4f s, relative error %.4f", sim.mean_response, expected, rel) +
               " over " + std::to_string(sim.completed) + " completions (limit 0.05)";
    return r;
}

std::vector<CheckResult> check_convergence(const RunResult& run, const ScenarioConfig& config, double settle)
{
    const double lambda = config.workload.constant_rate.value_or(0.0) * config.workload.transform.rate_scale;
    const double target = n_opt(lambda, config.capacity.mean(), config.scaler.l_des);
    double node_sum = 0.0;
    std::size_t frames = 0;
    std::size_t in_band = 0;
    for (const auto& f : run.frames) {
        if (f.t < settle) {
            continue;
        }
        ++frames;
        node_sum += f.nodes;
        if (f.mean_load >= config.scaler.l_min && f.mean_load <= config.scaler.l_max) {
            ++in_band;
        }
    }
    const double mean_nodes = frames ? node_sum / static_cast<double>(frames) : 0.0;
    const double band = frames ? static_cast<double>(in_band) / static_cast<double>(frames) : 0.0;

    CheckResult nodes;
    nodes.name = "convergence-nodes";
    nodes.pass = frames > 0 && std::abs(mean_nodes - target) <= 0.10 * target;
    nodes.detail = fmt("time-averaged nodes %.2f vs target %.2f (limit +-10%%, off by %.2f%%)", mean_nodes, target,
                       100.0 * std::abs(mean_nodes - target) / target);
    CheckResult load;
    load.name = "convergence-load-band";
    load.pass = band >= 0.80;
    load.detail = fmt("mean load in [%.2f, %.2f] in %.1f%% of frames (limit 80%%)", config.scaler.l_min,
                      config.scaler.l_max, 100.0 * band);
    return {nodes, load};
}

std::vector<CheckResult> check_reference(const RunAggregate& agg, const ScenarioConfig& config)
{
    const auto& s = agg.summary;
    CheckResult resp{"reference-response", s.avg_resp_time <= 1.6,
                     fmt("average response %.3f s (limit 1.6 s)", s.avg_resp_time)};
    CheckResult rej{"reference-rejected", s.rejected_pct <= 1.5, fmt("rejected %.3f%% (limit 1.5%%)", s.rejected_pct)};
    CheckResult lost{"reference-lost", s.lost == 0.0, fmt("lost %.0f requests (limit 0)", s.lost)};
    const double tracking = fraction_tracking_nopt(agg, config.warmup, 0.20);
    CheckResult track{"reference-node-tracking", tracking >= 0.80,
                      fmt("nodes within 20%% of n_opt_des in %.1f%% of post-warmup frames (limit 80%%)",
                          100.0 * tracking)};
    return {resp, rej, lost, track};
}

CheckResult check_heterogeneity(const RunAggregate& reference, const RunAggregate& extreme)
{
    const double ref = reference.summary.avg_resp_time;
    const double ext = extreme.summary.avg_resp_time;
    const double ratio = ref > 0.0 ? ext / ref : INFINITY;
    return {"heterogeneity-response", ratio <= 1.25,
            fmt("extreme %.3f s vs reference %.3f s, ratio %.3f (limit 1.25)", ext, ref, ratio)};
}

std::vector<CheckResult> check_churn(const RunAggregate& agg, const std::vector<RunResult>& runs, double limit_pct)
{
    const double failed = agg.summary.rejected_pct + agg.summary.lost_pct;
    CheckResult loss{agg.scenario + "-rejected-plus-lost", failed <= limit_pct,
                     fmt("rejected %.3f%% + lost %.3f%% = %.3f%%", agg.summary.rejected_pct, agg.summary.lost_pct,
                         failed) +
                         fmt(" (limit %g%%)", limit_pct)};
    std::size_t snaps = 0;
    std::size_t connected = 0;
    for (const auto& r : runs) {
        snaps += r.connectivity_snapshots;
        connected += r.connected_snapshots;
    }
    const double frac = snaps ? static_cast<double>(connected) / static_cast<double>(snaps) : 0.0;
    CheckResult conn{agg.scenario + "-overlay-connected", snaps > 0 && frac >= 0.99,
                     fmt("weakly connected in %.2f%% of %.0f snapshots (limit 99%%)", 100.0 * frac,
                         static_cast<double>(snaps))};
    return {loss, conn};
}

std::vector<CheckResult> check_disruption(const std::vector<RunResult>& runs, const ScenarioConfig& config)
{
    if (config.disruptions.empty()) {
        throw std::invalid_argument("check_disruption: scenario has no disruptive event");
    }
    const double at = config.disruptions.front().at;
    const double horizon = at + 50.0;
    const std::string name = config.name;

    double worst_gap = 0.0;
    bool recovered = !runs.empty();
    double issued = 0.0;
    double rejected = 0.0;
    double lost = 0.0;
    for (const auto& r : runs) {
        double pre = 0.0;
        std::size_t n = 0;
        const MetricsFrame* at_horizon = nullptr;
        for (const auto& f : r.frames) {
            if (f.t >= at - 50.0 && f.t < at) {
                pre += f.nodes;
                ++n;
            }
            if (f.t >= at && f.t < horizon) {
                issued += f.issued;
                rejected += f.rejected;
                lost += f.lost;
            }
            if (f.t == horizon) {
                at_horizon = &f;
            }
        }
        if (n == 0 || !at_horizon) {
            recovered = false;
            continue;
        }
        pre /= static_cast<double>(n);
        const double gap = std::abs(at_horizon->nodes - pre) / pre;
        worst_gap = std::max(worst_gap, gap);
        recovered = recovered && gap <= 0.10;
    }
    const double rej_pct = issued > 0 ? 100.0 * rejected / issued : 0.0;
    const double lost_pct = issued > 0 ? 100.0 * lost / issued : 0.0;
    CheckResult rec{name + "-recovery", recovered,
                    fmt("worst run %.2f%% away from its pre-kill mean node count at t=%.0f (limit 10%%)",
                        100.0 * worst_gap, horizon)};
    CheckResult rej{name + "-window-rejected", issued > 0 && rej_pct <= 10.0,
                    fmt("rejected %.2f%% of requests issued in [%.0f, %.0f) (limit 10%%)", rej_pct, at, horizon)};
    CheckResult los{name + "-window-lost", issued > 0 && lost_pct <= 5.0,
                    fmt("lost %.2f%% of requests issued in [%.0f, %.0f) (limit 5%%)", lost_pct, at, horizon)};
    return {rec, rej, los};
}

std::vector<CheckResult> checks_for(const ScenarioConfig& config, const RunAggregate& agg,
                                    const std::vector<RunResult>& runs, const RunAggregate* reference)
{
    const std::string& n = config.name;
    if (n == "reference") {
        return check_reference(agg, config);
    }
    if (n == "extreme-unbalanced") {
        if (!reference) {
            throw std::invalid_argument("checks_for: extreme-unbalanced needs the reference aggregate");
        }
        return {check_heterogeneity(*reference, agg)};
    }
    if (n == "churn-soft") {
        return check_churn(agg, runs, 3.0);
    }
    if (n == "churn-heavy") {
        return check_churn(agg, runs, 5.0);
    }
    if (n == "disruptive-soft" || n == "disruptive-heavy") {
        return check_disruption(runs, config);
    }
    return {};
}

} // namespace depas
