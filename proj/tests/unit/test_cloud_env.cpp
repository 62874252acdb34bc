#include "depas/cloud_env.hpp"
#include "depas/scenario.hpp"
#include "depas/simulation.hpp"

#include "doctest.h"
#include "support.hpp"

#include <set>
#include <vector>

using namespace depas;

TEST_CASE("dns resolves round robin")
{
    DnsRegistry dns(30);
    const auto always = [](NodeId) { return true; };
    CHECK_FALSE(dns.resolve());
    dns.try_register(2, always);
    CHECK(*dns.resolve() == 2);
    CHECK(*dns.resolve() == 2);
    dns.try_register(3, always);
    dns.try_register(4, always);
    std::vector<NodeId> seq;
    for (int i = 0; i < 6; ++i) {
        seq.push_back(*dns.resolve());
    }
    // a full cycle visits each entry once, then repeats
    CHECK(std::set<NodeId>(seq.begin(), seq.begin() + 3).size() == 3);
    CHECK(std::vector<NodeId>(seq.begin(), seq.begin() + 3) == std::vector<NodeId>(seq.begin() + 3, seq.end()));
}

TEST_CASE("dns purges dead entries only when full")
{
    DnsRegistry dns(3);
    const auto always = [](NodeId) { return true; };
    for (NodeId id : {2u, 3u, 4u}) {
        CHECK(dns.try_register(id, always));
    }
    CHECK_FALSE(dns.try_register(5, always));
    // already present: accepted without a second copy
    CHECK(dns.try_register(2, always));
    CHECK(dns.size() == 3);
    CHECK(dns.try_register(5, [](NodeId id) { return id != 3; }));
    CHECK(dns.contains(5));
    CHECK_FALSE(dns.contains(3));
    dns.unregister(4);
    CHECK(dns.size() == 2);
}

TEST_CASE("capacity mixtures")
{
    const auto mix = reference_capacity_mixture();
    CHECK(mix.mean() == doctest::Approx(0.999));
    RngStream rng(3, 1);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += mix.sample(rng);
    }
    const double second = 0.5 * 0.25 + 0.3 * 1.83 * 1.83 + 0.2 * 1.0;
    CHECK(std::abs(sum / n - 0.999) < test::three_sigma(second - 0.999 * 0.999, n));

    const auto homo = CapacityDistribution::homogeneous();
    for (int i = 0; i < 1000; ++i) {
        CHECK(homo.sample(rng) == 1.0);
    }
    CHECK_THROWS(CapacityDistribution{{{0.5, 1.0}}}.validate());
}

TEST_CASE("churn failures")
{
    RngStream rng(4, 1);
    std::vector<NodeId> live;
    for (NodeId i = 0; i < 1000; ++i) {
        live.push_back(i + 2);
    }
    CHECK(churn_failures(live, 0.0, rng).empty());
    CHECK(churn_failures(live, 1.0, rng).size() == 1000);
    const int ticks = 200;
    double total = 0.0;
    for (int t = 0; t < ticks; ++t) {
        total += static_cast<double>(churn_failures(live, 0.05, rng).size());
    }
    CHECK(std::abs(total / ticks - 50.0) < test::three_sigma(1000 * 0.05 * 0.95, ticks));
}

TEST_CASE("disruption victims")
{
    RngStream rng(5, 1);
    std::vector<NodeId> live;
    for (NodeId i = 0; i < 1000; ++i) {
        live.push_back(i + 2);
    }
    CHECK(disruption_victims(live, 0.0, rng).empty());
    const auto v = disruption_victims(live, 0.3, rng);
    CHECK(v.size() == 300);
    CHECK(std::set<NodeId>(v.begin(), v.end()).size() == 300);
}

TEST_CASE("providers are chosen uniformly and newborns boot after the delay")
{
    auto c = test::quiet_config(1);
    c.cloud.boot_delay = 2.0;
    Simulation sim(c, 21);
    sim.start();
    NodeState& root = *sim.node(sim.live_ids().front());
    const int n = 3000;
    sim.replicate(root, n);
    CHECK(sim.live_count() == 1);
    sim.advance_to(1.9);
    CHECK(sim.live_count() == 1);
    sim.advance_to(2.1);
    REQUIRE(sim.live_count() == std::size_t(n) + 1);

    std::vector<int> counts(c.cloud.providers.size());
    for (NodeId id : sim.live_ids()) {
        if (id != root.id) {
            ++counts[sim.node(id)->provider];
            CHECK(sim.node(id)->born_at == doctest::Approx(2.0));
        }
    }
    const double p = 1.0 / counts.size();
    for (int k : counts) {
        CHECK(std::abs(k / double(n) - p) < test::three_sigma(p * (1 - p), n));
    }
}

TEST_CASE("max_nodes caps provisioning")
{
    auto c = test::quiet_config(1);
    c.cloud.max_nodes = 3;
    Simulation sim(c, 22);
    sim.start();
    sim.replicate(*sim.node(sim.live_ids().front()), 5);
    sim.advance_to(5.0);
    CHECK(sim.live_count() == 3);
    CHECK(sim.stats().provision_refused == 3);
}
