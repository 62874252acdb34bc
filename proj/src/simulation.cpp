#include "depas/simulation.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

namespace depas {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

} // namespace

std::shared_ptr<const ArrivalProcess> make_arrivals(const ScenarioConfig& config)
{
    return std::make_shared<const ArrivalProcess>(resolve_trace(config), config.workload.transform);
}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed)
    : Simulation(config, seed, make_arrivals(config))
{
}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed, std::shared_ptr<const ArrivalProcess> arrivals)
    : config_(config),
      seed_(seed),
      arrivals_(std::move(arrivals)),
      engine_(config.latency),
      metrics_(config.warmup),
      dns_(config.cloud.dns_entries),
      workload_rng_(seed, StreamTag::workload),
      churn_rng_(seed, StreamTag::churn),
      capacity_rng_(seed, StreamTag::capacity),
      provider_rng_(seed, StreamTag::provider),
      disruption_rng_(seed, StreamTag::disruption)
{
    config_.validate();
    if (!arrivals_) {
        arrivals_ = make_arrivals(config_);
    }
}

NodeState* Simulation::node(NodeId id) noexcept
{
    return id < nodes_.size() ? nodes_[id].get() : nullptr;
}

const NodeState* Simulation::node(NodeId id) const noexcept
{
    return id < nodes_.size() ? nodes_[id].get() : nullptr;
}

void Simulation::add_live(NodeId id)
{
    if (id >= live_pos_.size()) {
        live_pos_.resize(static_cast<std::size_t>(id) + 1, 0);
    }
    live_pos_[id] = static_cast<std::uint32_t>(live_.size());
    live_.push_back(id);
}

void Simulation::remove_live(NodeId id)
{
    const std::uint32_t pos = live_pos_[id];
    const NodeId last = live_.back();
    live_[pos] = last;
    live_pos_[last] = pos;
    live_.pop_back();
}

std::size_t Simulation::active_count() const noexcept
{
    return live_.size() - removing_count_;
}

NodeId Simulation::spawn(double capacity, const NeighborView* bootstrap, bool register_dns)
{
    const NodeId id = next_id_++;
    if (id >= nodes_.size()) {
        nodes_.resize(static_cast<std::size_t>(id) + 1);
    }
    nodes_[id] = std::make_unique<NodeState>(id, capacity, now(), seed_, config_.overlay.degree,
                                             config_.scaler.window);
    NodeState& n = *nodes_[id];
    if (bootstrap) {
        n.view = *bootstrap;
    }
    add_live(id);
    if (register_dns) {
        n.registered = dns_.try_register(id, [this](NodeId x) { return is_live(x); });
    }
    if (started_) {
        start_node_timers(n);
    }
    return id;
}

double Simulation::load_of(NodeState& n)
{
    return n.window.sample(now(), n.capacity).load();
}

ViewEntry Simulation::self_entry(NodeState& n)
{
    return ViewEntry{n.id, n.capacity, load_of(n), 0};
}

void Simulation::start()
{
    if (started_) {
        return;
    }
    std::vector<NodeId> initial;
    for (std::size_t i = 0; i < config_.initial_nodes; ++i) {
        initial.push_back(spawn(config_.capacity.sample(capacity_rng_), nullptr, true));
    }
    for (NodeId a : initial) {
        NodeState& na = *node(a);
        for (NodeId b : initial) {
            if (a != b) {
                na.view.insert(ViewEntry{b, node(b)->capacity, 0.0, 0});
            }
        }
    }
    started_ = true;
    for (NodeId a : initial) {
        start_node_timers(*node(a));
    }

    if (auto first = arrivals_->next_after(0.0, workload_rng_); first && *first < config_.duration) {
        engine_.schedule_at(*first, client_entity, msg::ClientIssue{});
    }
    if (config_.churn.enabled()) {
        const double first_tick = config_.churn.start + config_.churn.period;
        if (first_tick <= config_.churn.end && first_tick < config_.duration) {
            engine_.schedule_at(first_tick, environment_entity, msg::ChurnTick{});
        }
    }
    for (const auto& d : config_.disruptions) {
        if (d.at < config_.duration) {
            engine_.schedule_at(d.at, environment_entity, msg::Disrupt{d.fraction});
        }
    }
    engine_.schedule_at(0.0, environment_entity, msg::Sample{});
}

void Simulation::start_node_timers(NodeState& n)
{
    engine_.schedule(n.rng.uniform() * config_.overlay.period, n.id, msg::GossipTick{});
    engine_.schedule(n.rng.uniform() * config_.balance_period, n.id, msg::BalanceTick{});
    engine_.schedule((1.0 + n.rng.uniform()) * config_.scaler.period, n.id, msg::ScalerTick{});
}

void Simulation::advance_to(SimTime t)
{
    start();
    engine_.run_until(
        t,
        [this](const Engine<Message>::Event& ev) {
            dispatch(ev);
            if (on_trace) {
                on_trace(ev.fire_at, ev.target, ev.payload.index());
            }
        },
        [this](const Engine<Message>::Event& ev) { dropped(ev); });
}

RunResult Simulation::finish()
{
    RunResult r = metrics_.finish(config_.duration, seed_);
    r.connectivity_snapshots = stats_.connectivity_snapshots;
    r.connected_snapshots = stats_.connected_snapshots;
    return r;
}

RunResult Simulation::run()
{
    start();
    advance_to(config_.duration);
    return finish();
}

void Simulation::dispatch(const Engine<Message>::Event& ev)
{
    if (ev.target == client_entity) {
        on_client(ev);
    } else if (ev.target == environment_entity) {
        on_environment(ev);
    } else if (NodeState* n = node(ev.target)) {
        on_node(*n, ev);
    }
}

void Simulation::dropped(const Engine<Message>::Event& ev)
{
    // The client notices a request that went to a dead node only when its timeout fires.
    if (const auto* arrival = std::get_if<msg::RequestArrival>(&ev.payload)) {
        const SimTime deadline = std::max(now(), arrival->request.issue_time + config_.admission.max_pending_time);
        engine_.schedule_at(deadline, client_entity, msg::ClientTimeout{arrival->request});
    }
}

void Simulation::on_client(const Engine<Message>::Event& ev)
{
    std::visit(overloaded{
                   [this](const msg::ClientIssue&) { issue_request(); },
                   [this](const msg::Response& r) { metrics_.processed(now(), now() - r.request.issue_time); },
                   [this](const msg::ClientTimeout& t) { reject(t.request, RejectCause::timeout); },
                   [](const auto&) {},
               },
               ev.payload);
}

void Simulation::on_environment(const Engine<Message>::Event& ev)
{
    std::visit(overloaded{
                   [this](const msg::Boot& b) { boot(b.node); },
                   [this](const msg::ChurnTick&) {
                       const auto failed = churn_failures(live_, config_.churn.p_fail, churn_rng_);
                       for (NodeId id : failed) {
                           fail(id);
                       }
                       const double next = now() + config_.churn.period;
                       if (next <= config_.churn.end && next < config_.duration) {
                           engine_.schedule(config_.churn.period, environment_entity, msg::ChurnTick{});
                       }
                   },
                   [this](const msg::Disrupt& d) {
                       const auto victims = disruption_victims(live_, d.fraction, disruption_rng_);
                       for (NodeId id : victims) {
                           fail(id);
                       }
                   },
                   [this](const msg::Sample&) { sample(); },
                   [](const auto&) {},
               },
               ev.payload);
}

void Simulation::on_node(NodeState& n, const Engine<Message>::Event& ev)
{
    const NodeId id = n.id;
    switch (ev.payload.index()) {
    case 1: // RequestArrival
        on_request(n, std::get<msg::RequestArrival>(ev.payload).request);
        break;
    case 4: // ServiceDone
        complete_service(n);
        break;
    case 5: // GossipTick
        if (!n.removing) {
            engine_.schedule(config_.overlay.period, id, msg::GossipTick{});
            gossip_step(n);
        }
        break;
    case 6: // BalanceTick
        if (!n.removing) {
            engine_.schedule(config_.balance_period, id, msg::BalanceTick{});
            balance_step(n);
        }
        break;
    case 7: // ScalerTick
        if (!n.removing) {
            engine_.schedule(config_.scaler.period, id, msg::ScalerTick{});
            depas_tick(n);
        }
        break;
    default:
        break;
    }
}

void Simulation::issue_request()
{
    Request r;
    r.id = next_request_++;
    r.client = client_entity;
    r.issue_time = now();
    metrics_.issued(now());
    if (auto entry = dns_.resolve()) {
        engine_.send(client_entity, *entry, msg::RequestArrival{std::move(r)});
    } else {
        reject(std::move(r), RejectCause::no_entry);
    }
    if (auto next = arrivals_->next_after(now(), workload_rng_); next && *next < config_.duration) {
        engine_.schedule_at(*next, client_entity, msg::ClientIssue{});
    }
}

void Simulation::inject_request(NodeId target)
{
    Request r;
    r.id = next_request_++;
    r.client = client_entity;
    r.issue_time = now();
    metrics_.issued(now());
    engine_.send(client_entity, target, msg::RequestArrival{std::move(r)});
}

void Simulation::on_request(NodeState& n, Request request)
{
    request.visited.push_back(n.id);
    const auto& policy = config_.admission;
    // A leaving node no longer accepts work: it behaves as if saturated.
    const std::size_t len = n.removing ? std::numeric_limits<std::size_t>::max() : n.length();
    Admission decision = admit(len, request.hops, policy);
    if (decision == Admission::forward) {
        // A neighbor that is gone or leaving refuses the hand-off at once,
        // so the sender moves on to another one.
        std::vector<NodeId> exclude = request.visited;
        while (auto target = random_neighbor(n.view, exclude, n.rng)) {
            const NodeState* m = node(*target);
            if (!m || m->removing) {
                exclude.push_back(*target);
                continue;
            }
            ++request.hops;
            ++stats_.forwarded;
            engine_.send(n.id, *target, msg::RequestArrival{std::move(request)});
            return;
        }
        decision = admit(len, policy.forward_limit, policy);
    }
    n.window.record(now(), 1);
    if (decision == Admission::accept) {
        accept(n, std::move(request));
    } else {
        reject(std::move(request), RejectCause::admission);
    }
}

void Simulation::accept(NodeState& n, Request request)
{
    request.enqueue_time = now();
    request.state = RequestState::queued;
    n.queue.push_back(std::move(request));
    if (!n.in_service) {
        process_next(n);
    }
}

void Simulation::reject(Request request, RejectCause cause)
{
    request.state = RequestState::rejected;
    ++stats_.rejected_by_cause[static_cast<std::size_t>(cause)];
    metrics_.rejected(now());
}

void Simulation::process_next(NodeState& n)
{
    if (n.in_service) {
        return;
    }
    while (!n.queue.empty()) {
        Request r = std::move(n.queue.front());
        n.queue.pop_front();
        const double pending = now() - r.enqueue_time;
        if (pending > config_.admission.max_pending_time) {
            reject(std::move(r), RejectCause::expired);
            continue;
        }
        r.state = RequestState::processing;
        metrics_.service_started(now(), pending);
        n.in_service = std::move(r);
        engine_.schedule(n.rng.exponential(config_.mean_service_time / n.capacity), n.id, msg::ServiceDone{});
        return;
    }
}

void Simulation::complete_service(NodeState& n)
{
    if (!n.in_service) {
        return;
    }
    Request r = std::move(*n.in_service);
    n.in_service.reset();
    r.state = RequestState::processed;
    engine_.send(n.id, client_entity, msg::Response{std::move(r)});
    if (n.removing) {
        while (!n.queue.empty()) {
            reject(std::move(n.queue.front()), RejectCause::drain);
            n.queue.pop_front();
        }
        deprovision(n);
        return;
    }
    process_next(n);
}

std::size_t Simulation::expire(NodeState& n)
{
    auto expired = expire_pending(n.queue, now(), config_.admission.max_pending_time);
    for (auto& r : expired) {
        reject(std::move(r), RejectCause::expired);
    }
    return expired.size();
}

void Simulation::balance_step(NodeState& n)
{
    expire(n);
    if (!config_.dimension_exchange) {
        return;
    }
    auto partner_id = random_neighbor(n.view, {}, n.rng);
    if (!partner_id) {
        return;
    }
    NodeState* m = node(*partner_id);
    if (!m || m->removing) {
        return;
    }
    n.view.refresh_hints(m->id, m->capacity, load_of(*m));
    m->view.refresh_hints(n.id, n.capacity, load_of(n));

    const auto la = static_cast<long>(n.length());
    const auto lb = static_cast<long>(m->length());
    NodeState* from = &n;
    NodeState* to = m;
    long amount = exchange_amount(la, lb, n.capacity, m->capacity);
    if (amount < 0) {
        from = m;
        to = &n;
        amount = exchange_amount(lb, la, m->capacity, n.capacity);
    }
    if (amount <= 0) {
        return;
    }
    const std::size_t moved = move_oldest(from->queue, to->queue, static_cast<std::size_t>(amount));
    if (moved == 0) {
        return;
    }
    stats_.transferred += moved;
    from->window.record(now(), -static_cast<int>(moved));
    to->window.record(now(), static_cast<int>(moved));
    process_next(*to);
}

void Simulation::gossip_step(NodeState& n)
{
    n.view.increment_ages();
    n.view.prune(config_.overlay.max_age);
    auto peer_id = select_gossip_peer(n.view, config_.overlay, n.rng);
    if (!peer_id) {
        return;
    }
    NodeState* m = node(*peer_id);
    if (!m || m->removing) {
        return; // the exchange message is lost
    }
    const ViewEntry mine = self_entry(n);
    const ViewEntry theirs = self_entry(*m);
    exchange_views(n.view, mine, m->view, theirs, config_.overlay, n.rng, m->rng);
}

void Simulation::try_register(NodeState& n)
{
    if (n.registered || !n.rng.bernoulli(config_.cloud.registration_probability)) {
        return;
    }
    n.registered = dns_.try_register(n.id, [this](NodeId x) { return is_live(x); });
}

void Simulation::depas_tick(NodeState& n)
{
    try_register(n);
    // A node decides only once its monitoring window is fully populated.
    if (!config_.scaling_enabled || now() - n.born_at < config_.scaler.window) {
        return;
    }
    const LoadHint self{n.capacity, load_of(n)};
    const double estimate = neighborhood_load(self, n.view.entries());
    const ScalingDecision d = decide_scaling(estimate, config_.scaler, n.rng);
    if (d.kind == ScalingDecision::Kind::add) {
        replicate(n, d.count);
    } else if (d.kind == ScalingDecision::Kind::remove) {
        self_remove(n);
    }
}

void Simulation::replicate(NodeState& n, std::size_t count)
{
    const ViewEntry creator = self_entry(n);
    for (std::size_t i = 0; i < count; ++i) {
        if (config_.cloud.max_nodes != 0 && live_.size() + booting_.size() >= config_.cloud.max_nodes) {
            ++stats_.provision_refused;
            continue;
        }
        const NodeId id = next_id_++;
        PendingBoot pb{config_.capacity.sample(capacity_rng_),
                       static_cast<std::size_t>(provider_rng_.below(config_.cloud.providers.size())),
                       bootstrap_view(id, config_.overlay.degree, creator, n.view)};
        booting_.emplace(id, std::move(pb));
        engine_.schedule(config_.cloud.boot_delay, environment_entity, msg::Boot{id});
    }
}

void Simulation::boot(NodeId id)
{
    auto it = booting_.find(id);
    if (it == booting_.end()) {
        return;
    }
    PendingBoot pb = std::move(it->second);
    booting_.erase(it);
    if (id >= nodes_.size()) {
        nodes_.resize(static_cast<std::size_t>(id) + 1);
    }
    nodes_[id] = std::make_unique<NodeState>(id, pb.capacity, now(), seed_, config_.overlay.degree,
                                             config_.scaler.window);
    NodeState& n = *nodes_[id];
    n.provider = pb.provider;
    n.view = std::move(pb.view);
    add_live(id);
    ++stats_.provisioned;
    try_register(n);
    start_node_timers(n);
}

void Simulation::self_remove(NodeState& n)
{
    if (n.removing) {
        return;
    }
    if (active_count() <= config_.cloud.min_nodes) {
        ++stats_.removal_refused;
        return;
    }
    n.removing = true;
    ++removing_count_;
    ++stats_.removals;
    if (n.registered) {
        dns_.unregister(n.id);
        n.registered = false;
    }
    if (!n.queue.empty()) {
        std::vector<NodeId> candidates;
        for (const auto& e : n.view.entries()) {
            const NodeState* m = node(e.node);
            if (m && !m->removing) {
                candidates.push_back(e.node);
            }
        }
        for (std::size_t i = candidates.size(); i > 1; --i) {
            std::swap(candidates[i - 1], candidates[n.rng.below(i)]);
        }
        for (NodeId c : candidates) {
            if (n.queue.empty()) {
                break;
            }
            NodeState& m = *node(c);
            const std::size_t len = m.length();
            if (len >= config_.admission.hard_limit) {
                continue;
            }
            const std::size_t moved = move_oldest(n.queue, m.queue, config_.admission.hard_limit - len);
            stats_.drained += moved;
            m.window.record(now(), static_cast<int>(moved));
            process_next(m);
        }
        while (!n.queue.empty()) {
            reject(std::move(n.queue.front()), RejectCause::drain);
            n.queue.pop_front();
        }
    }
    if (!n.in_service) {
        deprovision(n);
    }
}

void Simulation::deprovision(NodeState& n)
{
    const NodeId id = n.id;
    if (n.removing) {
        --removing_count_;
    }
    if (n.registered) {
        dns_.unregister(id);
    }
    remove_live(id);
    engine_.kill(id);
    nodes_[id].reset();
}

std::size_t Simulation::fail(NodeId id)
{
    NodeState* n = node(id);
    if (!n) {
        return 0;
    }
    const std::size_t lost = n->length();
    if (lost > 0) {
        metrics_.lost(now(), lost);
    }
    ++stats_.failures;
    if (n->removing) {
        --removing_count_;
    }
    remove_live(id);
    engine_.kill(id);
    nodes_[id].reset();
    return lost;
}

bool Simulation::overlay_connected() const
{
    const std::size_t count = live_.size();
    if (count <= 1) {
        return true;
    }
    std::vector<std::uint32_t> parent(count);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    std::size_t components = count;
    for (std::uint32_t i = 0; i < count; ++i) {
        const NodeState* n = node(live_[i]);
        for (const auto& e : n->view.entries()) {
            if (!is_live(e.node)) {
                continue;
            }
            const auto a = find(i);
            const auto b = find(live_pos_[e.node]);
            if (a != b) {
                parent[a] = b;
                --components;
            }
        }
    }
    return components == 1;
}

void Simulation::sample()
{
    MetricsRecorder::Gauges g;
    g.nodes = static_cast<double>(live_.size());
    double load_sum = 0.0;
    double cap_sum = 0.0;
    for (NodeId id : live_) {
        NodeState& n = *node(id);
        load_sum += load_of(n);
        cap_sum += n.capacity;
    }
    g.mean_load = live_.empty() ? 0.0 : load_sum / static_cast<double>(live_.size());
    g.c_avg = live_.empty() ? config_.capacity.mean() : cap_sum / static_cast<double>(live_.size());
    g.lambda = arrivals_->rate(now());
    g.l_min = config_.scaler.l_min;
    g.l_des = config_.scaler.l_des;
    g.l_max = config_.scaler.l_max;
    g.network_latency = config_.latency.seconds;
    metrics_.sample(now(), g);

    if (config_.track_connectivity && now() >= config_.warmup) {
        ++stats_.connectivity_snapshots;
        if (overlay_connected()) {
            ++stats_.connected_snapshots;
        }
    }
    if (now() + 1.0 < config_.duration) {
        engine_.schedule(1.0, environment_entity, msg::Sample{});
    }
}

RunResult run_once(const ScenarioConfig& config, std::uint64_t seed, std::shared_ptr<const ArrivalProcess> arrivals)
{
    Simulation sim(config, seed, std::move(arrivals));
    return sim.run();
}

RunAggregate run_scenario(const ScenarioConfig& config, std::size_t threads, std::vector<RunResult>* per_run)
{
    const auto seeds = config.run_seeds();
    const auto arrivals = make_arrivals(config);
    std::vector<RunResult> results(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());

    auto work = [&](std::size_t i) {
        try {
            results[i] = run_once(config, seeds[i], arrivals);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    threads = std::max<std::size_t>(1, std::min(threads, seeds.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            work(i);
        }
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard lock(mu);
                        if (next >= seeds.size()) {
                            return;
                        }
                        i = next++;
                    }
                    work(i);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error("run with seed " + std::to_string(seeds[i]) + " failed: " + e.what());
            }
        }
    }
    RunAggregate agg = aggregate(results, config.name);
    if (per_run) {
        *per_run = std::move(results);
    }
    return agg;
}

} // namespace depas
