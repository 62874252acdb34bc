#include "depas/rng.hpp"
#include "depas/sim_core.hpp"

#include "doctest.h"

#include <set>
#include <string>
#include <vector>

using namespace depas;

namespace {

struct Seen
{
    double at;
    EntityId target;
    std::string tag;
};

} // namespace

TEST_CASE("engine delivers in time order with insertion tie-break")
{
    Engine<std::string> e;
    std::vector<Seen> seen;
    auto record = [&](const Engine<std::string>::Event& ev) { seen.push_back({ev.fire_at, ev.target, ev.payload}); };

    e.schedule(5.0, 3, "a");
    e.schedule(5.0, 3, "b");
    e.schedule(0.3, 4, "gossip");
    e.run_until(4.0, record);
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].at == doctest::Approx(0.3));
    CHECK(e.now() == 4.0);

    e.run_until(5.0, [&](const Engine<std::string>::Event& ev) {
        record(ev);
        if (ev.payload == "a") {
            // zero delay at t=5 lands after the already pending "b"
            e.schedule(0.0, 3, "c");
        }
    });
    REQUIRE(seen.size() == 4);
    CHECK(seen[1].tag == "a");
    CHECK(seen[2].tag == "b");
    CHECK(seen[3].tag == "c");
    CHECK(seen[3].at == 5.0);
}

TEST_CASE("engine rejects negative delays and past times")
{
    Engine<int> e;
    CHECK_THROWS_AS(e.schedule(-0.1, 2, 0), std::invalid_argument);
    e.run_until(3.0, [](const auto&) {});
    CHECK_THROWS_AS(e.schedule_at(2.0, 2, 0), std::invalid_argument);
    CHECK_NOTHROW(e.schedule_at(3.0, 2, 0));
}

TEST_CASE("cancelled events never fire")
{
    Engine<int> e;
    int fired = 0;
    const auto h = e.schedule(1.0, 2, 7);
    e.schedule(2.0, 2, 8);
    e.cancel(h);
    e.run_until(10.0, [&](const auto& ev) {
        CHECK(ev.payload == 8);
        ++fired;
    });
    CHECK(fired == 1);
}

TEST_CASE("send applies the constant latency and round trips cost twice")
{
    Engine<int> e(ConstantLatency{0.01});
    e.run_until(1.0, [](const auto&) {});
    e.send(0, 5, 1);
    double delivered = -1.0;
    double reply = -1.0;
    e.run_until(2.0, [&](const auto& ev) {
        if (ev.payload == 1) {
            delivered = ev.fire_at;
            e.send(5, 0, 2);
        } else {
            reply = ev.fire_at;
        }
    });
    CHECK(delivered == doctest::Approx(1.01));
    CHECK(reply - 1.0 == doctest::Approx(0.02));
}

TEST_CASE("messages to killed entities are dropped")
{
    Engine<int> e(ConstantLatency{0.01});
    e.run_until(0.5, [](const auto&) {});
    e.schedule_at(1.0, 0, 0);
    e.kill(9);
    // the send happens after the kill; delivery would be due at 1.01
    e.run_until(1.0, [&](const auto&) { e.send(0, 9, 1); });
    int delivered = 0;
    int dropped = 0;
    e.run_until(2.0, [&](const auto&) { ++delivered; }, [&](const auto&) { ++dropped; });
    CHECK(delivered == 0);
    CHECK(dropped == 1);
    CHECK_FALSE(e.alive(9));
    CHECK(e.alive(10));
}

TEST_CASE("empty engine advances the clock to the horizon")
{
    Engine<int> e;
    e.run_until(2700.0, [](const auto&) {});
    CHECK(e.now() == 2700.0);
    CHECK(e.pending() == 0);
}

TEST_CASE("rng streams are reproducible and independent")
{
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c = differs_c || x != c.next_u64();
        differs_d = differs_d || x != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);

    RngStream tagged(42, StreamTag::workload), plain(42, 1);
    CHECK(tagged.next_u64() != plain.next_u64());
}

TEST_CASE("rng variates stay in range and have the right means")
{
    RngStream r(5, 1);
    const int n = 100000;
    double usum = 0.0, esum = 0.0;
    std::set<std::uint64_t> values;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        usum += u;
        esum += r.exponential(2.0);
        const auto k = r.below(7);
        REQUIRE(k < 7);
        values.insert(k);
    }
    CHECK(values.size() == 7);
    CHECK(std::abs(usum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(esum / n - 2.0) < 3.0 * 2.0 / std::sqrt(double(n)));
}
