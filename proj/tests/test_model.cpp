#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "fogforge/oracle.hpp"
#include "fogforge/scenario.hpp"
#include "oracles/pareto_scan.hpp"
#include "oracles/reference_eval.hpp"

using namespace fogforge;
using namespace fixtures;

TEST_SUITE("core-model") {

TEST_CASE("worked example response time and latency matrix") {
  const Application app = fig1_app();
  const DeviceSet devs = fig1_devices();
  CHECK(response_time(app, fig1_placement(), devs) == 53.0);
  const std::vector<double> contrib = latency_contributions(app, fig1_placement(), devs);
  CHECK(contrib == std::vector<double>{0, 0, 0, 6, 6, 0, 10, 10, 3});
}

TEST_CASE("all on one device charges only row-head access") {
  const Application app = fig1_app();
  const DeviceSet devs = fig1_devices();
  for (int d = 0; d < static_cast<int>(devs.size()); ++d)
    CHECK(response_time(app, uniform_placement(app, d), devs) == 3 * devs[d].latency);
}

TEST_CASE("one-device placement ignores edge count") {
  Rng rng(5);
  ScenarioConfig cfg;
  cfg.device_count = 4;
  cfg.op_count = 7;
  cfg.device_speed = 2;
  for (int k = 0; k < 20; ++k) {
    const Application app = generate_application(cfg, rng);
    const DeviceSet devs = generate_devices(cfg, rng);
    const int d = static_cast<int>(rng.index(devs.size()));
    const double expected = 9 * 7 / devs[d].speed + 3 * devs[d].latency;
    CHECK(response_time(app, uniform_placement(app, d), devs) == doctest::Approx(expected));
  }
}

TEST_CASE("response time and cost match the reference evaluator") {
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    ScenarioConfig cfg;
    cfg.device_count = 4;
    cfg.rows_per_app = 1 + static_cast<int>(rng.index(4));
    cfg.cols_per_app = 1 + static_cast<int>(rng.index(4));
    cfg.extra_edge_prob = rng.uniform();
    cfg.op_count = 1 + static_cast<double>(rng.index(50));
    cfg.device_speed = 0.5 + rng.uniform() * 3;
    const DeviceSet devs = generate_devices(cfg, rng);
    const Application app = generate_application(cfg, rng);
    const Placement p = random_placement(app, devs, rng);
    const std::vector<int>& host = p.device_of;
    CHECK(response_time(app, p, devs) == doctest::Approx(oracle::ref_time(to_ref(app), host, to_ref(devs))).epsilon(1e-12));
    CHECK(placement_cost(p, devs) == doctest::Approx(oracle::ref_cost(host, to_ref(devs))).epsilon(1e-12));
    CHECK(latency_contributions(app, p, devs) == oracle::ref_contributions(to_ref(app), host, to_ref(devs)));
  }
}

TEST_CASE("placement errors") {
  const Application app = fig1_app();
  const DeviceSet devs = fig1_devices();
  Placement p = fig1_placement();
  p.device_of[4] = 99;
  CHECK_THROWS_AS(response_time(app, p, devs), InvalidPlacement);
  CHECK_THROWS_AS(placement_cost(p, devs), InvalidPlacement);
  p.device_of[4] = -1;
  CHECK_THROWS_AS(response_time(app, p, devs), InvalidPlacement);
  p.device_of.pop_back();
  CHECK_THROWS_AS(evaluate(app, p, devs), InvalidPlacement);
}

TEST_CASE("cost examples") {
  const Application app = fig1_app();
  const DeviceSet devs = fig1_devices();
  CHECK(placement_cost(uniform_placement(app, 0), devs) == 180.0);
  CHECK(placement_cost(Placement{}, devs) == 0.0);
  const DeviceSet mixed{dev(0, 50, 20, true), dev(1, 1, 1), dev(2, 1, 10), dev(3, 1, 40)};
  const Placement p{{1, 2, 3, 3, 2, 1, 0, 1, 3}};
  CHECK(placement_cost(p, mixed) == oracle::ref_cost(p.device_of, to_ref(mixed)));
}

TEST_CASE("application validation") {
  CHECK_THROWS_AS(Application(1, 3, {0, 0, 0}, {}), InvalidApplication);  // chain edges missing
  CHECK_THROWS_AS(Application::with_chains(2, 2, {0, 0, 0, 0}, {{{0, 1}, {1, 0}}, {{1, 1}, {0, 0}}}),
                  InvalidApplication);  // cycle
  CHECK_THROWS_AS(Application::with_chains(2, 2, {0, 0, 0}), InvalidApplication);  // wrong op count
  CHECK_NOTHROW(Application::with_chains(2, 2, {0, 0, 0, 0}, {{{0, 0}, {1, 1}}}));
}

TEST_CASE("device validation") {
  CHECK_THROWS_AS(validate_devices({dev(0, 1, 1)}), ConfigError);  // no cloud
  CHECK_THROWS_AS(validate_devices({dev(0, 1, 1, true), dev(1, 1, 1, true)}), ConfigError);
  CHECK_THROWS_AS(validate_devices({dev(0, 1, 1, true), dev(2, 1, 1)}), ConfigError);  // sparse ids
  CHECK_THROWS_AS(validate_devices({dev(0, 1, 1, true, 0.0)}), ConfigError);           // zero speed
  CHECK_THROWS_AS(validate_devices({dev(0, -1, 1, true)}), ConfigError);
  CHECK(cloud_id(fig1_devices()) == 0);
}

TEST_CASE("weighted objective") {
  const NormalizationBounds b{200, 400};
  CHECK(weighted_objective({200, 17}, {1, 0}, b) == 1.0);
  CHECK(weighted_objective({0, 0}, {0.5, 0.5}, b) == 0.0);
  // worked-example point (53, cost 81) with weights (0.25, 0.75)
  const double cost = placement_cost(fig1_placement(), fig1_devices());
  CHECK(cost == 3 * 10 + 3 * 10 + 2 * 1 + 30);
  CHECK(weighted_objective({53, cost}, {0.25, 0.75}, b) == doctest::Approx(0.25 * 53 / 200 + 0.75 * cost / 400));
  CHECK_THROWS_AS(weighted_objective({1, 1}, {0.5, 0.5}, {0, 1}), ConfigError);
  CHECK_THROWS_AS(weighted_objective({1, 1}, {0.5, 0.5}, {1, -2}), ConfigError);
  CHECK_THROWS_AS(WeightVector::make(0.6, 0.6), ConfigError);
  CHECK_THROWS_AS(WeightVector::make(-0.1, 1.1), ConfigError);
}

TEST_CASE("weighted objective is monotone") {
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const double w = rng.uniform();
    const WeightVector wv{w, 1 - w};
    const NormalizationBounds b{1 + rng.uniform() * 100, 1 + rng.uniform() * 100};
    const ObjectivePoint p{rng.uniform() * 100, rng.uniform() * 100};
    const double base = weighted_objective(p, wv, b);
    CHECK(weighted_objective({p.time + rng.uniform(), p.cost}, wv, b) >= base);
    CHECK(weighted_objective({p.time, p.cost + rng.uniform()}, wv, b) >= base);
  }
}

TEST_CASE("default bounds") {
  const Application app = fig1_app();
  DeviceSet devs = fig1_devices();
  const NormalizationBounds b = default_bounds(app, devs);
  // rows + |edges| = 3 + 10 edges, max latency 50; max cost 30
  CHECK(b.max_time == (3 + 10) * 50.0);
  CHECK(b.max_cost == 9 * 30.0);
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const ObjectivePoint p = evaluate(app, random_placement(app, devs, rng), devs);
    CHECK(p.time <= b.max_time);
    CHECK(p.cost <= b.max_cost);
  }
}

TEST_CASE("cross-device edge never lowers response time") {
  Rng rng(8);
  ScenarioConfig cfg;
  cfg.device_count = 5;
  cfg.extra_edge_prob = 0;
  for (int k = 0; k < 100; ++k) {
    const DeviceSet devs = generate_devices(cfg, rng);
    const Application base = generate_application(cfg, rng);
    const Placement p = random_placement(base, devs, rng);
    // add one forward edge from row 0 to row 2
    const Edge extra{{0, static_cast<int>(rng.index(3))}, {2, static_cast<int>(rng.index(3))}};
    const Application more = Application::with_chains(3, 3, base.ops(), {extra});
    CHECK(response_time(more, p, devs) >= response_time(base, p, devs));
  }
}

TEST_CASE("cheaper device never raises cost") {
  Rng rng(9);
  const Application app = fig1_app();
  const DeviceSet devs = fig1_devices();
  for (int k = 0; k < 200; ++k) {
    Placement p = random_placement(app, devs, rng);
    const double before = placement_cost(p, devs);
    const std::size_t s = rng.index(9);
    const int d = static_cast<int>(rng.index(devs.size()));
    if (devs[d].cost >= devs[p.device_of[s]].cost) continue;
    p.device_of[s] = d;
    CHECK(placement_cost(p, devs) <= before);
  }
}

TEST_CASE("pareto front examples") {
  CHECK(pareto_front({{1, 9}, {2, 2}, {9, 1}, {3, 3}}) == std::vector<ObjectivePoint>{{1, 9}, {2, 2}, {9, 1}});
  CHECK(pareto_front({{4, 4}}) == std::vector<ObjectivePoint>{{4, 4}});
  CHECK(pareto_front({{2, 2}, {2, 2}, {1, 3}}) == std::vector<ObjectivePoint>{{1, 3}, {2, 2}});
  CHECK(pareto_front({}).empty());
}

TEST_CASE("pareto front matches quadratic scan") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ObjectivePoint> pts;
    std::vector<oracle::Pt> ref;
    for (int k = 0; k < 200; ++k) {
      // coarse grid so ties and duplicates occur
      const ObjectivePoint p{static_cast<double>(rng.index(40)), static_cast<double>(rng.index(40))};
      pts.push_back(p);
      ref.emplace_back(p.time, p.cost);
    }
    const auto front = pareto_front(pts);
    const auto expected = oracle::ref_front(ref);
    REQUIRE(front.size() == expected.size());
    for (std::size_t i = 0; i < front.size(); ++i) {
      CHECK(front[i].time == expected[i].first);
      CHECK(front[i].cost == expected[i].second);
    }
    for (const auto& a : front)
      for (const auto& b : front) CHECK_FALSE(dominates(a, b));
  }
}

TEST_CASE("hypervolume matches grid oracle") {
  Rng rng(4);
  CHECK(hypervolume({{1, 1}}, {3, 3}) == 4.0);
  CHECK(hypervolume({}, {3, 3}) == 0.0);
  CHECK(hypervolume({{5, 1}}, {3, 3}) == 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ObjectivePoint> pts;
    std::vector<oracle::Pt> ref;
    const int n = 1 + static_cast<int>(rng.index(15));
    for (int k = 0; k < n; ++k) {
      const ObjectivePoint p{rng.uniform() * 12, rng.uniform() * 12};
      pts.push_back(p);
      ref.emplace_back(p.time, p.cost);
    }
    CHECK(hypervolume(pts, {10, 10}) == doctest::Approx(oracle::ref_hypervolume(ref, {10, 10})).epsilon(1e-12));
  }
}

}  // TEST_SUITE

TEST_SUITE("oracle") {

namespace {

// Independent recursive enumeration used to check the odometer.
void enumerate(const Application& app, const DeviceSet& devs, Placement& p, std::size_t s,
               std::vector<oracle::Pt>& out) {
  if (s == app.service_count()) {
    out.emplace_back(oracle::ref_time(to_ref(app), p.device_of, to_ref(devs)),
                     oracle::ref_cost(p.device_of, to_ref(devs)));
    return;
  }
  for (int d = 0; d < static_cast<int>(devs.size()); ++d) {
    p.device_of[s] = d;
    enumerate(app, devs, p, s + 1, out);
  }
}

}  // namespace

TEST_CASE("enumeration count") {
  const Application app = Application::with_chains(2, 2, {0, 0, 0, 0});
  const DeviceSet devs{dev(0, 50, 20, true), dev(1, 10, 1)};
  CHECK(brute_force_oracle(app, devs).enumerated == 16);
}

TEST_CASE("cap exceeded") {
  const Application app = fig1_app();
  CHECK_THROWS_AS(brute_force_oracle(app, fig1_devices(), {}, 1000), TooLargeInstance);
}

TEST_CASE("dominant device gives a single front point") {
  ScenarioConfig cfg;
  cfg.device_count = 3;
  cfg.op_count = 0;
  cfg.dominant_device = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    const Scenario s = generate_scenario(cfg);
    const OracleResult r = brute_force_oracle(s.applications[0], s.devices);
    REQUIRE(r.front.size() == 1);
    const int d = r.front_placements[0].device_of[0];
    CHECK(r.front_placements[0] == uniform_placement(s.applications[0], d));
    CHECK(s.devices[d].latency == 1);
    CHECK(s.devices[d].cost == 1);
  }
}

TEST_CASE("front and optima match recursive enumeration") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    ScenarioConfig cfg;
    cfg.device_count = 2;
    cfg.rows_per_app = 2;
    cfg.cols_per_app = 3;
    cfg.extra_edge_prob = 0.5;
    cfg.seed = 100 + trial;
    const Scenario s = generate_scenario(cfg);
    const Application& app = s.applications[0];
    std::vector<oracle::Pt> all;
    Placement p{std::vector<int>(app.service_count(), 0)};
    enumerate(app, s.devices, p, 0, all);
    const auto expected = oracle::ref_front(all);

    const std::vector<WeightVector> ws{{0.5, 0.5}, {0, 1}, {1, 0}, {0.3, 0.7}};
    const OracleResult r = brute_force_oracle(app, s.devices, ws);
    REQUIRE(r.front.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(r.front[i].time == expected[i].first);
      CHECK(r.front[i].cost == expected[i].second);
      CHECK(evaluate(app, r.front_placements[i], s.devices) == r.front[i]);
    }
    const NormalizationBounds b = default_bounds(app, s.devices);
    for (const WeightedOptimum& o : r.optima) {
      double best = 1e300;
      for (const auto& q : all) best = std::min(best, weighted_objective({q.first, q.second}, o.weights, b));
      CHECK(o.value == doctest::Approx(best).epsilon(1e-12));
      CHECK(weighted_objective(evaluate(app, o.placement, s.devices), o.weights, b) == o.value);
    }
  }
}

}  // TEST_SUITE
