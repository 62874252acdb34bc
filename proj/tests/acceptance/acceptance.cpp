// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only when all pass.
// DEPAS_ACCEPT_THREADS sets how many runs execute concurrently (default 1).

#include "depas/autoscaler.hpp"
#include "depas/balancer.hpp"
#include "depas/checks.hpp"
#include "depas/overlay.hpp"
#include "depas/rng.hpp"
#include "depas/simulation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace depas;

namespace {

std::size_t threads()
{
    if (const char* v = std::getenv("DEPAS_ACCEPT_THREADS")) {
        const long n = std::strtol(v, nullptr, 10);
        if (n > 0) {
            return static_cast<std::size_t>(n);
        }
    }
    return 1;
}

struct Criterion
{
    int id;
    std::string title;
    std::vector<CheckResult> checks;
    double seconds = 0.0;
};

bool report(const Criterion& c)
{
    bool ok = !c.checks.empty();
    std::string detail;
    for (const auto& r : c.checks) {
        ok = ok && r.pass;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += (r.pass ? "" : "[FAIL] ") + r.name + ": " + r.detail;
    }
    std::printf("%s criterion %d (%s) [%.0f s] %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds,
                detail.c_str());
    std::fflush(stdout);
    return ok;
}

template <class F>
Criterion timed(int id, const std::string& title, F&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c{id, title, {}};
    try {
        c.checks = body();
    } catch (const std::exception& e) {
        c.checks = {{"exception", false, e.what()}};
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

struct ScenarioRun
{
    ScenarioConfig config;
    RunAggregate agg;
    std::vector<RunResult> runs;
};

ScenarioRun run_preset(const std::string& name)
{
    ScenarioRun s{*preset(name), {}, {}};
    s.agg = run_scenario(s.config, threads(), &s.runs);
    return s;
}

std::string csv_of(const RunAggregate& agg)
{
    std::ostringstream out;
    write_frames_csv(out, agg);
    write_summary_csv(out, agg);
    return out.str();
}

// Criterion 8 property sweeps; each returns one check.

CheckResult exchange_properties()
{
    RngStream rng(8, 1);
    const double caps[] = {0.1, 0.5, 1.0, 1.83, 1.9, 3.0};
    std::size_t cases = 0;
    for (int i = 0; i < 20000; ++i) {
        const long qa = static_cast<long>(rng.below(41));
        const long qb = static_cast<long>(rng.below(41));
        const double ca = caps[rng.below(6)];
        const double cb = caps[rng.below(6)];
        const long ab = exchange_amount(qa, qb, ca, cb);
        const long ba = exchange_amount(qb, qa, cb, ca);
        if (std::labs(ab + ba) > 1) {
            return {"dimension-exchange", false, "antisymmetry violated"};
        }
        // Oriented transfer from the longer weighted queue, as balance_step does.
        long a = qa, b = qb;
        if (ab >= 0) {
            a -= ab;
            b += ab;
        } else if (ba > 0) {
            a += ba;
            b -= ba;
        }
        if (a + b != qa + qb) {
            return {"dimension-exchange", false, "conservation violated"};
        }
        const double before = std::abs(qa / ca - qb / cb);
        const double after = std::abs(a / ca - b / cb);
        if (after > before + 1e-9) {
            return {"dimension-exchange", false, "weighted spread increased"};
        }
        ++cases;
    }
    return {"dimension-exchange", true, std::to_string(cases) + " random pairs conserve, antisymmetric, non-worsening"};
}

CheckResult admission_truth_table()
{
    const AdmissionPolicy p{2, 20, 3, 4.0};
    std::size_t cases = 0;
    for (std::size_t len = 0; len <= 25; ++len) {
        for (std::size_t hops = 0; hops <= 5; ++hops) {
            Admission expected;
            if (len < p.soft_limit || (hops >= p.forward_limit && len < p.hard_limit)) {
                expected = Admission::accept;
            } else if (hops < p.forward_limit) {
                expected = Admission::forward;
            } else {
                expected = Admission::reject;
            }
            if (admit(len, hops, p) != expected) {
                return {"admission", false, "mismatch at len=" + std::to_string(len) + " hops=" + std::to_string(hops)};
            }
            ++cases;
        }
    }
    return {"admission", true, std::to_string(cases) + " (len, hops) cells match the policy table"};
}

CheckResult removal_and_addition()
{
    RngStream rng(8, 2);
    // Removal probability equals |ratio| and stays in [0, 1].
    for (double r : {0.0, -0.3, -1.0}) {
        const int n = 100000;
        int removed = 0;
        for (int i = 0; i < n; ++i) {
            removed += analyze_removal(r, rng) ? 1 : 0;
        }
        const double p = std::abs(r);
        const double sigma = std::sqrt(p * (1 - p) / n);
        if (std::abs(removed / double(n) - p) > 3 * sigma + 1e-12) {
            return {"scaling-draws", false, "removal frequency off at ratio " + std::to_string(r)};
        }
    }
    for (double r : {0.3, 1.5, 2.0}) {
        const int n = 100000;
        double sum = 0;
        for (int i = 0; i < n; ++i) {
            const auto k = analyze_addition(r, rng);
            if (k != static_cast<std::size_t>(std::floor(r)) && k != static_cast<std::size_t>(std::floor(r)) + 1) {
                return {"scaling-draws", false, "addition outside {floor, floor+1}"};
            }
            sum += static_cast<double>(k);
        }
        const double f = r - std::floor(r);
        const double sigma = std::sqrt(f * (1 - f) / n);
        if (std::abs(sum / n - r) > 3 * sigma + 1e-12) {
            return {"scaling-draws", false, "addition mean off at ratio " + std::to_string(r)};
        }
    }
    return {"scaling-draws", true, "removal frequency and addition mean within 3 sigma (1e5 draws each)"};
}

CheckResult merge_invariants()
{
    RngStream rng(8, 3);
    OverlayParams params;
    for (int trial = 0; trial < 2000; ++trial) {
        const NodeId owner = 0;
        NeighborView local(owner, params.degree);
        std::vector<ViewEntry> received;
        const auto nl = rng.below(params.degree + 1);
        for (std::size_t i = 0; i < nl; ++i) {
            local.insert({static_cast<NodeId>(rng.below(150)), 1.0, 0.5, static_cast<int>(rng.below(40))});
        }
        const auto nr = rng.below(params.degree + 2);
        for (std::size_t i = 0; i < nr; ++i) {
            received.push_back({static_cast<NodeId>(rng.below(150)), 1.0, 0.5, static_cast<int>(rng.below(40))});
        }
        const auto merged = merge_views(local, received, params, rng);
        std::set<NodeId> seen;
        if (merged.size() > params.degree) {
            return {"overlay-merge", false, "size above c"};
        }
        for (const auto& e : merged.entries()) {
            if (e.node == owner || !seen.insert(e.node).second || e.age > params.max_age) {
                return {"overlay-merge", false, "self, duplicate or over-age entry"};
            }
        }
    }
    return {"overlay-merge", true, "2000 random merges: no self, no duplicate, size <= c, age <= o"};
}

CheckResult lifecycle_conservation()
{
    // Short busy run with churn; arrivals stop at the horizon and the system drains.
    auto c = *preset("churn-heavy");
    c.duration = 120.0;
    c.warmup = 0.0;
    c.workload.transform.time_scale = 1.0;
    c.workload.constant_rate = 150.0;
    Simulation sim(c, 99);
    sim.advance_to(c.duration + 60.0);
    const auto r = sim.finish();
    const auto& s = r.summary;
    const bool ok = s.issued > 0 && s.issued == s.processed + s.rejected + s.lost;
    char buf[200];
    std::snprintf(buf, sizeof buf, "issued %.0f = processed %.0f + rejected %.0f + lost %.0f", s.issued, s.processed,
                  s.rejected, s.lost);
    return {"request-lifecycle", ok, buf};
}

} // namespace

int main()
{
    std::vector<Criterion> results;

    results.push_back(timed(1, "analytic oracle agreement", [] {
        return std::vector<CheckResult>{check_mmm_agreement(1, 0.5, 1.0, 100000, 101),
                                        check_mmm_agreement(2, 1.0, 1.0, 100000, 102),
                                        check_mmm_agreement(10, 6.0, 1.0, 100000, 103)};
    }));
    report(results.back());

    results.push_back(timed(2, "scaling convergence", [] {
        const auto c = convergence_config();
        return check_convergence(run_once(c, c.run_seeds().front()), c);
    }));
    report(results.back());

    ScenarioRun reference;
    results.push_back(timed(3, "reference trace, desk scale", [&] {
        reference = run_preset("reference");
        return check_reference(reference.agg, reference.config);
    }));
    report(results.back());

    results.push_back(timed(4, "heterogeneity robustness", [&] {
        const auto extreme = run_preset("extreme-unbalanced");
        return std::vector<CheckResult>{check_heterogeneity(reference.agg, extreme.agg)};
    }));
    report(results.back());

    results.push_back(timed(5, "churn tolerance", [] {
        const auto soft = run_preset("churn-soft");
        const auto heavy = run_preset("churn-heavy");
        std::vector<CheckResult> out = check_churn(soft.agg, soft.runs, 3.0);
        const auto h = check_churn(heavy.agg, heavy.runs, 5.0);
        out.insert(out.end(), h.begin(), h.end());
        return out;
    }));
    report(results.back());

    results.push_back(timed(6, "disaster recovery", [] {
        std::vector<CheckResult> out;
        for (const char* name : {"disruptive-soft", "disruptive-heavy"}) {
            const auto s = run_preset(name);
            const auto r = check_disruption(s.runs, s.config);
            out.insert(out.end(), r.begin(), r.end());
        }
        return out;
    }));
    report(results.back());

    results.push_back(timed(7, "determinism", [] {
        auto c = *preset("disruptive-soft");
        c.runs = 2;
        const std::string first = csv_of(run_scenario(c, 1));
        const std::string second = csv_of(run_scenario(c, 2));
        return std::vector<CheckResult>{{"byte-identical-csv", first == second && !first.empty(),
                                         "two executions (1 and 2 threads) produced " +
                                             std::string(first == second ? "identical" : "different") + " CSV (" +
                                             std::to_string(first.size()) + " bytes)"}};
    }));
    report(results.back());

    results.push_back(timed(8, "unit invariant suites", [] {
        return std::vector<CheckResult>{exchange_properties(), admission_truth_table(), removal_and_addition(),
                                        merge_invariants(), lifecycle_conservation()};
    }));
    report(results.back());

    bool all = true;
    for (const auto& c : results) {
        for (const auto& r : c.checks) {
            all = all && r.pass;
        }
        all = all && !c.checks.empty();
    }
    std::printf("%s: %zu criteria evaluated\n", all ? "ALL PASS" : "SOME FAILED", results.size());
    return all ? 0 : 1;
}
