#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/netsim/generator.hpp"
#include "netxfer/netsim/scenario_io.hpp"
#include "netxfer/netsim/simulator.hpp"

using namespace netxfer;
using namespace netxfer::netsim;

namespace {

double mean_delay(const PacketTrace& trace) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& p : trace.packets) {
    if (p.dropped) continue;
    sum += p.delay();
    ++n;
  }
  return sum / static_cast<double>(n);
}

bool bit_identical(const PacketTrace& a, const PacketTrace& b) {
  if (a.packets.size() != b.packets.size()) return false;
  for (std::size_t i = 0; i < a.packets.size(); ++i) {
    const auto& x = a.packets[i];
    const auto& y = b.packets[i];
    if (x.flow != y.flow || x.dropped != y.dropped) return false;
    if (std::memcmp(&x.send_time, &y.send_time, sizeof(double)) != 0) return false;
    if (std::memcmp(&x.arrival_time, &y.arrival_time, sizeof(double)) != 0) return false;
    if (std::memcmp(&x.size, &y.size, sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("M/M/1 link matches the analytic mean sojourn time") {
  // 10 Mb/s, mean 1250 B -> mu = 1000 pkt/s; lambda = 800 pkt/s; 1/(mu - lambda) = 5 ms.
  const Scenario s = testing::single_link(10e6, 0.0, TrafficModel{Poisson{800.0}, ExponentialSize{1250.0}}, 150.0);
  const PacketTrace trace = simulate(s);
  REQUIRE(trace.delivered() >= 100'000);
  CHECK(trace.dropped() == 0);
  CHECK(mean_delay(trace) == doctest::Approx(0.005).epsilon(0.05));
}

TEST_CASE("a lone packet sees transmission plus propagation only") {
  TrafficModel one{Replay{"", 1.0, {3.0}}, FixedSize{1500.0}};
  SUBCASE("ideal") {
    const Scenario s = testing::single_link(8e6, 0.002, one, 5.0);
    const PacketTrace trace = simulate(s);
    REQUIRE(trace.packets.size() == 1);
    CHECK(trace.packets[0].send_time == 3.0);
    CHECK(trace.packets[0].delay() == doctest::Approx(1500.0 * 8.0 / 8e6 + 0.002).epsilon(1e-12));
  }
  SUBCASE("perturbed without jitter") {
    Scenario s = testing::single_link(8e6, 0.002, one, 5.0);
    s.fidelity = Perturbed{50e-6, 0.95, 0.0};
    const PacketTrace trace = simulate(s);
    REQUIRE(trace.packets.size() == 1);
    CHECK(trace.packets[0].delay() == doctest::Approx(1500.0 * 8.0 / (8e6 * 0.95) + 0.002 + 50e-6).epsilon(1e-12));
  }
}

TEST_CASE("same scenario twice gives bit-identical traces") {
  Scenario s = testing::tandem(3, 4, 10e6, 250.0, 5.0);
  s.fidelity = Perturbed{};
  CHECK(bit_identical(simulate(s), simulate(s)));
}

TEST_CASE("every generated packet is either delivered or dropped") {
  Scenario s = testing::single_link(1e6, 0.0, TrafficModel{Poisson{200.0}, ExponentialSize{1000.0}}, 10.0, 5);
  const PacketTrace trace = simulate(s);
  CHECK(trace.dropped() > 0);
  CHECK(trace.delivered() + trace.dropped() == trace.packets.size());
  for (const auto& p : trace.packets) {
    if (!p.dropped) CHECK(p.arrival_time >= p.send_time);
  }
  // Offered rate is 200 pkt/s for 10 s; generated count should be close.
  CHECK(static_cast<double>(trace.packets.size()) == doctest::Approx(2000.0).epsilon(0.1));
}

TEST_CASE("send times are sorted within each flow") {
  const PacketTrace trace = simulate(testing::tandem(2, 3, 10e6, 300.0, 3.0));
  std::map<std::uint32_t, double> last;
  for (const auto& p : trace.packets) {
    if (last.contains(p.flow)) CHECK(p.send_time >= last[p.flow]);
    last[p.flow] = p.send_time;
  }
}

TEST_CASE("queues serve packets in arrival order") {
  Scenario s = testing::tandem(3, 5, 10e6, 350.0, 4.0);
  s.fidelity = Perturbed{};
  const PacketTrace trace = simulate(s, SimulationOptions{.record_queue_log = true});
  REQUIRE(trace.queue_log.has_value());
  for (std::size_t q = 0; q < s.topology.queues.size(); ++q) {
    CHECK(!trace.queue_log->arrivals[q].empty());
    CHECK(trace.queue_log->arrivals[q] == trace.queue_log->departures[q]);
  }
}

TEST_CASE("perturbed delays dominate ideal delays packet by packet") {
  Scenario ideal = testing::tandem(3, 3, 10e6, 300.0, 5.0);
  Scenario perturbed = ideal;
  perturbed.fidelity = Perturbed{50e-6, 0.95, 0.0};
  const PacketTrace a = simulate(ideal);
  const PacketTrace b = simulate(perturbed);
  REQUIRE(a.packets.size() == b.packets.size());
  for (std::size_t i = 0; i < a.packets.size(); ++i) {
    REQUIRE(a.packets[i].send_time == b.packets[i].send_time);
    CHECK(b.packets[i].delay() >= a.packets[i].delay());
  }
}

TEST_CASE("traffic models hit their mean packet rate") {
  auto rate_of = [](TrafficModel t) {
    const double duration = 2000.0;
    const PacketTrace trace = simulate(testing::single_link(1e9, 0.0, t, duration));
    return static_cast<double>(trace.packets.size()) / duration;
  };
  const TrafficModel onoff{OnOff{0.1, 0.3, 400.0}, FixedSize{500.0}};
  CHECK(rate_of(onoff) == doctest::Approx(onoff.mean_packet_rate()).epsilon(0.1));
  const TrafficModel heavy{HeavyTail{std::log(1.0 / 100.0) - 0.5, 1.0}, FixedSize{500.0}};
  CHECK(heavy.mean_packet_rate() == doctest::Approx(100.0));
  CHECK(rate_of(heavy) == doctest::Approx(100.0).epsilon(0.1));
}

TEST_CASE("configuration errors and empty traces") {
  Scenario bad = testing::tandem(2, 1, 10e6, 100.0, 1.0);
  bad.flows[0].path = {0, 7};
  CHECK_THROWS_AS(simulate(bad), ConfigError);

  Scenario gap = testing::tandem(3, 1, 10e6, 100.0, 1.0);
  gap.flows[0].path = {0, 2};
  CHECK_THROWS_AS(simulate(gap), ConfigError);

  Scenario zero_cap = testing::tandem(1, 1, 10e6, 100.0, 1.0);
  zero_cap.topology.links[0].capacity_bps = 0.0;
  CHECK_THROWS_AS(simulate(zero_cap), ConfigError);

  Scenario derate = testing::tandem(1, 1, 10e6, 100.0, 1.0);
  derate.fidelity = Perturbed{0.0, 1.5, 0.0};
  CHECK_THROWS_AS(simulate(derate), ConfigError);

  const Scenario quiet = testing::single_link(10e6, 0.0, TrafficModel{Replay{"", 1.0, {100.0}}, FixedSize{100.0}}, 1.0);
  const PacketTrace trace = simulate(quiet);
  CHECK(trace.flagged_empty());
}

TEST_CASE("scenario generation") {
  ScenarioTemplate t;
  t.min_duration_s = t.max_duration_s = 1.0;
  t.traffic_kinds = {TrafficKind::Poisson, TrafficKind::OnOff, TrafficKind::HeavyTail};

  SUBCASE("count and ids") {
    const auto scenarios = gen_scenarios(t, 30, 1);
    REQUIRE(scenarios.size() == 30);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      CHECK(scenarios[i].id == i);
      CHECK(scenarios[i].topology.nodes.size() >= 5);
      CHECK(scenarios[i].topology.nodes.size() <= 8);
    }
  }
  SUBCASE("deterministic and prefix-stable") {
    const auto a = gen_scenarios(t, 5, 9);
    const auto b = gen_scenarios(t, 8, 9);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(scenario_to_json(a[i]) == scenario_to_json(b[i]));
    CHECK(scenario_to_json(gen_scenarios(t, 1, 10)[0]) != scenario_to_json(a[0]));
  }
  SUBCASE("offered load respects the utilization cap") {
    for (const Scenario& s : gen_scenarios(t, 20, 3)) {
      std::map<std::uint32_t, double> bits;
      for (const Flow& f : s.flows)
        for (std::uint32_t q : f.path) bits[q] += f.traffic.mean_packet_rate() * f.traffic.mean_packet_size() * 8.0;
      for (auto [q, b] : bits) CHECK(b / s.topology.link(q).capacity_bps <= t.utilization_cap + 1e-12);
    }
  }
  SUBCASE("shared topology") {
    ScenarioTemplate fixed = t;
    fixed.topology_seed = 5;
    fixed.fixed_routing = true;
    const auto scenarios = gen_scenarios(fixed, 4, 2);
    for (const Scenario& s : scenarios) {
      CHECK(scenario_to_json(s)["topology"] == scenario_to_json(scenarios[0])["topology"]);
      CHECK(s.flows.size() == scenarios[0].flows.size());
    }
  }
  SUBCASE("infeasible templates are rejected with the constraint named") {
    ScenarioTemplate bad = t;
    bad.min_nodes = bad.max_nodes = 1;
    CHECK_THROWS_WITH_AS(gen_scenarios(bad, 1, 1), doctest::Contains("min_nodes"), ConfigError);
    CHECK_THROWS_AS(gen_scenarios(t, 0, 1), ConfigError);
  }
}

TEST_CASE("scenario JSON round trip") {
  ScenarioTemplate t;
  t.traffic_kinds = {TrafficKind::Poisson, TrafficKind::OnOff, TrafficKind::HeavyTail};
  t.fidelity = Perturbed{};
  const Scenario s = gen_scenario(t, 3, 11);
  const auto j = scenario_to_json(s);
  CHECK(j["schema"] == "scenario/1");
  const Scenario back = scenario_from_json(nlohmann::json::parse(j.dump()));
  CHECK(scenario_to_json(back) == j);

  Scenario small = testing::single_link(10e6, 0.0, TrafficModel{Poisson{100.0}, FixedSize{100.0}}, 1.0);
  std::stringstream buffer;
  const PacketTrace trace = simulate(small);
  write_trace_ndjson(buffer, trace);
  CHECK(bit_identical(read_trace_ndjson(buffer), trace));
}
