#include "depas/workload.hpp"

#include "doctest.h"
#include "support.hpp"

#include <sstream>

using namespace depas;

namespace {

RateTrace parse(const std::string& text)
{
    std::istringstream in(text);
    return load_trace(in, "t");
}

} // namespace

TEST_CASE("trace parsing")
{
    const auto t = parse("# rates\n0 10\n\n60 20  # step\n");
    REQUIRE(t.points.size() == 2);
    CHECK(t.points[1].offset == 60.0);
    CHECK(t.points[1].rate == 20.0);
    CHECK(t.duration == 60.0);
    CHECK(rate_at(t, {}, 30.0) == 10.0);

    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("# nothing\n"), ParseError);
    CHECK_THROWS_WITH_AS(parse("0 1\n5 2\n5 3\n"), doctest::Contains("t:3"), ParseError);
    CHECK_THROWS_WITH_AS(parse("0 1\n5 -2\n"), doctest::Contains("t:2"), ParseError);
    CHECK_THROWS_AS(parse("1 1\n"), ParseError);
    CHECK_THROWS_AS(parse("0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse("zero one\n"), ParseError);
}

TEST_CASE("trace round trip through text")
{
    const auto t = synthetic_town_hall_trace(3);
    std::ostringstream out;
    write_trace(out, t);
    const auto back = parse(out.str());
    REQUIRE(back.points.size() == t.points.size());
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        CHECK(back.points[i].offset == doctest::Approx(t.points[i].offset));
        CHECK(back.points[i].rate == doctest::Approx(t.points[i].rate));
    }
}

TEST_CASE("rate transforms")
{
    const auto c = RateTrace::constant(5.0, 100.0);
    for (double t : {0.0, 10.0, 99.9}) {
        CHECK(rate_at(c, {2.0, 1.0}, t) == 10.0);
    }
    CHECK(rate_at(c, {2.0, 1.0}, 100.5) == 0.0);
    CHECK(rate_at(c, {2.0, 1.0}, -1.0) == 0.0);
    CHECK(mean_rate(c, {2.0, 1.0}) == doctest::Approx(10.0));

    const auto composed = compose({2.0, 0.5}, {3.0, 0.1});
    CHECK(composed.rate_scale == 6.0);
    CHECK(composed.time_scale == doctest::Approx(0.05));
}

TEST_CASE("48 hours compress to 45 minutes")
{
    const RateTrace t{{{0.0, 100.0}, {86400.0, 300.0}}, 172800.0};
    const TraceTransform tr{1.0, town_hall_time_scale};
    CHECK(transformed_duration(t, tr) == doctest::Approx(2700.0));
    CHECK(86400.0 * town_hall_time_scale == doctest::Approx(22.5 * 60));
    CHECK(rate_at(t, tr, 22.5 * 60 - 0.01) == 100.0);
    CHECK(rate_at(t, tr, 22.5 * 60 + 0.01) == 300.0);
}

TEST_CASE("synthetic trace peak")
{
    const auto t = synthetic_town_hall_trace();
    CHECK(t.peak() == doctest::Approx(700.0));
    CHECK(t.peak() * 10.0 == doctest::Approx(7000.0));
    CHECK(transformed_duration(t, {1.0, town_hall_time_scale}) == doctest::Approx(2700.0));
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("poisson arrival count")
{
    const ArrivalProcess p(RateTrace::constant(2.0, 1e4), {});
    RngStream rng(11, 1);
    double t = 0.0;
    std::size_t n = 0;
    while (auto next = p.next_after(t, rng)) {
        REQUIRE(*next > t);
        t = *next;
        ++n;
    }
    CHECK(t <= 1e4);
    CHECK(std::abs(double(n) - 2e4) < 3.0 * std::sqrt(2e4));
}

TEST_CASE("zero-rate segments receive nothing")
{
    const RateTrace t{{{0.0, 5.0}, {10.0, 0.0}, {20.0, 5.0}}, 30.0};
    const ArrivalProcess p(t, {});
    RngStream rng(12, 1);
    double now = 0.0;
    std::size_t after = 0;
    while (auto next = p.next_after(now, rng)) {
        now = *next;
        CHECK_FALSE((now >= 10.0 && now < 20.0));
        after += now >= 20.0 ? 1 : 0;
    }
    CHECK(after > 0);
}
