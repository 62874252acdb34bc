#pragma once

#include "depas/analytics.hpp"
#include "depas/scenario.hpp"

#include <string>
#include <vector>

namespace depas {

/// Outcome of one acceptance criterion.
struct CheckResult
{
    std::string name;
    bool pass = false;
    std::string detail;
};

/// "PASS name: detail" / "FAIL name: detail".
std::string format_check(const CheckResult& r);

/// Fraction of frames at or after `from` whose node count is within `tolerance`
/// (relative) of the n_opt_des curve. Uses the run-averaged series.
double fraction_tracking_nopt(const RunAggregate& agg, double from, double tolerance);

/// Constant 100 req/s on homogeneous capacity-1 nodes with default parameters.
ScenarioConfig convergence_config(double duration = 600.0);

CheckResult check_mmm_agreement(std::size_t m, double lambda, double mu, std::size_t completions,
                                std::uint64_t seed, double tolerance = 0.05);

/// Time-averaged node count after `settle` within 10% of lambda/(C*L_des) and
/// mean load inside [L_min, L_max] in at least 80% of those frames.
std::vector<CheckResult> check_convergence(const RunResult& run, const ScenarioConfig& config,
                                           double settle = 60.0);

/// Reference scenario: response, rejections, losses and node tracking.
std::vector<CheckResult> check_reference(const RunAggregate& agg, const ScenarioConfig& config);

/// Heterogeneous capacities cost at most 25% extra response time.
CheckResult check_heterogeneity(const RunAggregate& reference, const RunAggregate& extreme);

/// Churn: rejected + lost within `limit_pct`, overlay connected in >= 99% of snapshots.
std::vector<CheckResult> check_churn(const RunAggregate& agg, const std::vector<RunResult>& runs,
                                     double limit_pct);

/// Disruptive event: every run is back within 10% of its pre-kill mean 50 s after
/// the kill; rejections <= 10% and losses <= 5% of requests issued in that window.
std::vector<CheckResult> check_disruption(const std::vector<RunResult>& runs, const ScenarioConfig& config);

/// Checks that apply to a packaged scenario; empty when none do. `reference` is
/// required for extreme-unbalanced and ignored otherwise.
std::vector<CheckResult> checks_for(const ScenarioConfig& config, const RunAggregate& agg,
                                    const std::vector<RunResult>& runs, const RunAggregate* reference = nullptr);

} // namespace depas
