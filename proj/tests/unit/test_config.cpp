#include "depas/scenario.hpp"

#include "doctest.h"

#include <string>

using namespace depas;

TEST_CASE("defaults match the fixed parameter set")
{
    const ScenarioConfig c;
    CHECK(c.overlay.degree == 60);
    CHECK(c.overlay.max_age == 30);
    CHECK(c.overlay.period == doctest::Approx(0.3));
    CHECK(c.admission.hard_limit == 20);
    CHECK(c.admission.max_pending_time == 4.0);
    CHECK(c.scaler.l_min == 0.6);
    CHECK(c.scaler.l_max == 0.8);
    CHECK(c.scaler.l_des == doctest::Approx(0.7));
    CHECK(c.mean_service_time == 1.0);
    CHECK(c.duration == 2700.0);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("invalid bands are rejected with the key named")
{
    CHECK_THROWS_WITH_AS(parse_config(R"({"scaler": {"l_min": 0.9, "l_max": 0.8}})"), doctest::Contains("scaler"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"admission": {"soft_limit": 30}})"), doctest::Contains("soft_limit"),
                         ParseError);
}

TEST_CASE("unknown keys are errors")
{
    CHECK_THROWS(parse_config(R"({"duraton": 10})"));
    CHECK_THROWS(parse_config(R"({"overlay": {"degre": 10}})"));
    CHECK_THROWS(parse_config("{not json"));
}

TEST_CASE("churn shorthand")
{
    const auto c = parse_config(R"({"churn": "soft"})");
    CHECK(c.churn.p_fail == 0.05);
    CHECK(c.churn.period == 10.0);
    CHECK(parse_config(R"({"churn": "heavy"})").churn.p_fail == 0.10);
    CHECK_THROWS(parse_config(R"({"churn": "medium"})"));
}

TEST_CASE("every preset round-trips through JSON")
{
    for (const auto& name : preset_names()) {
        const auto p = preset(name);
        REQUIRE(p);
        CHECK_NOTHROW(p->validate());
        CHECK(parse_config(serialize_config(*p)) == *p);
    }
    CHECK_FALSE(preset("nope"));
}

TEST_CASE("preset contents")
{
    const auto ref = *preset("reference");
    CHECK(ref.capacity.mean() == doctest::Approx(0.999));
    CHECK(preset("homogeneous")->capacity.mean() == 1.0);
    CHECK(preset("extreme-unbalanced")->capacity.mean() == doctest::Approx(1.0));
    CHECK(preset("churn-heavy")->churn.p_fail == 0.10);
    const auto d = *preset("disruptive-heavy");
    REQUIRE(d.disruptions.size() == 1);
    CHECK(d.disruptions[0].at == 200.0);
    CHECK(d.disruptions[0].fraction == 0.6);
}

TEST_CASE("run seeds")
{
    ScenarioConfig c;
    c.runs = 3;
    const auto s = c.run_seeds();
    CHECK(s.size() == 3);
    CHECK(s[0] != s[1]);
    c.seeds = {5, 6};
    CHECK(c.run_seeds() == std::vector<std::uint64_t>{5, 6});
}

TEST_CASE("constant workload trace spans the run")
{
    ScenarioConfig c;
    c.duration = 100.0;
    c.workload.constant_rate = 3.0;
    c.workload.transform = {1.0, 0.5};
    const auto t = resolve_trace(c);
    CHECK(transformed_duration(t, c.workload.transform) == doctest::Approx(100.0));
    CHECK(t.peak() == 3.0);
}
