#include "depas/mmm_cluster.hpp"

#include "depas/rng.hpp"

#include <deque>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <variant>
#include <vector>

namespace depas {

namespace {

struct Issue {};
struct Arrive { SimTime issued; };
struct Finish { std::size_t server; };
struct Reply { SimTime issued; };
using Event = std::variant<Issue, Arrive, Finish, Reply>;

constexpr EntityId client = 0;
constexpr EntityId router = 1;

} // namespace

MmmResult simulate_mmm(std::size_t m, double lambda, double mu, std::size_t completions, std::uint64_t seed,
                       ConstantLatency latency, std::size_t discard)
{
    if (m == 0 || !(lambda > 0.0) || !(mu > 0.0)) {
        throw std::invalid_argument("simulate_mmm: m, lambda and mu must be positive");
    }
    Engine<Event> engine(latency);
    RngStream arrivals(seed, StreamTag::workload);
    RngStream service(seed, StreamTag::router);

    std::vector<std::optional<SimTime>> busy(m); // issue time of the request in service
    std::vector<std::size_t> idle;
    for (std::size_t i = m; i-- > 0;) {
        idle.push_back(i);
    }
    std::deque<SimTime> queue;

    std::size_t seen = 0;
    double sum = 0.0;
    MmmResult result;

    auto start = [&](std::size_t server, SimTime issued) {
        busy[server] = issued;
        engine.schedule(service.exponential(1.0 / mu), router, Finish{server});
    };

    engine.schedule(arrivals.exponential(1.0 / lambda), client, Issue{});
    while (result.completed < completions) {
        engine.run_until(engine.now() + 1000.0, [&](const Engine<Event>::Event& ev) {
            std::visit(
                [&](const auto& e) {
                    using T = std::decay_t<decltype(e)>;
                    if constexpr (std::is_same_v<T, Issue>) {
                        engine.send(client, router, Arrive{engine.now()});
                        engine.schedule(arrivals.exponential(1.0 / lambda), client, Issue{});
                    } else if constexpr (std::is_same_v<T, Arrive>) {
                        if (!idle.empty()) {
                            const std::size_t s = idle.back();
                            idle.pop_back();
                            start(s, e.issued);
                        } else {
                            queue.push_back(e.issued);
                        }
                    } else if constexpr (std::is_same_v<T, Finish>) {
                        engine.send(router, client, Reply{*busy[e.server]});
                        busy[e.server].reset();
                        if (!queue.empty()) {
                            const SimTime next = queue.front();
                            queue.pop_front();
                            start(e.server, next);
                        } else {
                            idle.push_back(e.server);
                        }
                    } else if constexpr (std::is_same_v<T, Reply>) {
                        if (++seen > discard && result.completed < completions) {
                            sum += engine.now() - e.issued;
                            ++result.completed;
                        }
                    }
                },
                ev.payload);
        });
    }
    result.mean_response = sum / static_cast<double>(result.completed);
    return result;
}

} // namespace depas
