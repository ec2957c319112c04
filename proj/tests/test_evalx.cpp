#include <cmath>
#include <sstream>

#include "doctest.h"
#include "model_fixtures.hpp"
#include "netxfer/errors.hpp"
#include "netxfer/evalx/report.hpp"
#include "netxfer/evalx/sweep.hpp"

using namespace netxfer;
using namespace netxfer::evalx;

namespace {

// Independent reference: plain loop, long double accumulation.
double brute_force_mape(const std::vector<double>& p, const std::vector<double>& t) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    long double d = static_cast<long double>(p[i]) - t[i];
    if (d < 0) d = -d;
    acc += d / t[i];
  }
  return static_cast<double>(100.0L * acc / p.size());
}

}  // namespace

TEST_CASE("mape") {
  CHECK(mape(std::vector{0.005}, std::vector{0.005}) == 0.0);
  CHECK(mape(std::vector{0.011}, std::vector{0.010}) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(mape(std::vector{1.0, 3.0}, std::vector{2.0, 2.0}) == 50.0);
  CHECK_THROWS_AS(mape(std::vector<double>{}, std::vector<double>{}), DataError);
  CHECK_THROWS_AS(mape(std::vector{1.0}, std::vector{0.0}), DataError);
  CHECK_THROWS_AS(mape(std::vector{1.0, 2.0}, std::vector{1.0}), DataError);

  netsim::CounterRng rng(2024, 1);
  std::vector<double> p(10000), t(10000);
  for (std::size_t i = 0; i < p.size(); ++i) {
    t[i] = rng.uniform(1e-4, 1e-1);
    p[i] = t[i] * rng.uniform(0.2, 2.5);
  }
  const double ref = brute_force_mape(p, t);
  CHECK(std::abs(mape(p, t) - ref) / ref <= 1e-12);
}

TEST_CASE("normalized mape") {
  CHECK(normalized_mape(7.3, 7.3) == 1.0);
  CHECK(normalized_mape(5.0, 20.0) == 0.25);
  CHECK_THROWS_AS(normalized_mape(5.0, 0.0), DataError);
  const auto r = make_report({{1, 0, 0, 0.011, 0.010}, {1, 0, 1, 0.009, 0.010}});
  CHECK(normalized_mape(r, r) == 1.0);
  const auto other = make_report({{2, 0, 0, 0.011, 0.010}, {1, 0, 1, 0.009, 0.010}});
  CHECK_THROWS_AS(normalized_mape(r, other), DataError);
}

TEST_CASE("error pdf") {
  SUBCASE("exact predictions put all mass in the bin holding 0") {
    const std::vector<double> v{0.01, 0.02, 0.03};
    const auto pdf = error_pdf(v, v, 4);
    CHECK(pdf.edges.front() == -0.5);
    CHECK(pdf.edges.back() == 0.5);
    for (std::size_t b = 0; b < 4; ++b) {
      const bool holds_zero = pdf.edges[b] <= 0.0 && 0.0 < pdf.edges[b + 1];
      CHECK((pdf.density[b] > 0.0) == holds_zero);
    }
    CHECK(pdf.mean_error == 0.0);
  }
  SUBCASE("density integrates to one") {
    netsim::CounterRng rng(9, 9);
    for (std::size_t bins : {2u, 7u, 50u}) {
      std::vector<double> p(997), t(997);
      for (std::size_t i = 0; i < p.size(); ++i) {
        t[i] = rng.uniform(0.001, 0.01);
        p[i] = t[i] * rng.uniform(0.5, 1.4);
      }
      const auto pdf = error_pdf(p, t, bins);
      double total = 0.0;
      for (std::size_t b = 0; b < bins; ++b) total += pdf.density[b] * (pdf.edges[b + 1] - pdf.edges[b]);
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
  }
  SUBCASE("signed bias") {
    const auto pdf = error_pdf(std::vector{0.95, 1.9, 2.85}, std::vector{1.0, 2.0, 3.0}, 3);
    CHECK(pdf.mean_error == doctest::Approx(-0.05));
  }
  CHECK_THROWS_AS(error_pdf(std::vector{1.0}, std::vector{1.0}, 1), ConfigError);
}

TEST_CASE("report writers") {
  const auto r = make_report({{3, 1, 4, 0.012, 0.010}});
  std::ostringstream ndjson, csv, pdf;
  write_samples_ndjson(ndjson, r);
  const auto j = nlohmann::json::parse(ndjson.str());
  CHECK(j.at("flow") == 4);
  CHECK(j.at("relative_error").get<double>() == doctest::Approx(0.2));
  const MetricsRow rows[] = {{"donor", 20.0, 1.0, -0.05, 10}};
  write_metrics_csv(csv, rows);
  CHECK(csv.str() == "label,mape,normalized_mape,mean_signed_error,count\ndonor,20,1,-0.05,10\n");
  write_pdf_csv(pdf, error_pdf(std::vector{1.0, 2.0}, std::vector{1.0, 1.0}, 2));
  CHECK(pdf.str().starts_with("bin_lo,bin_hi,density\n0,0.5,1\n"));
}

TEST_CASE("parallel_for") {
  std::vector<int> out(50, 0);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) { if (i == 5) throw DataError("x"); }), DataError);
}

TEST_CASE("evaluation and efficiency sweep") {
  auto t = testing::tiny_template();
  const auto ideal = testing::windowed(t, 4, 70);
  t.fidelity = netsim::Perturbed{};
  const auto real = testing::windowed(t, 6, 71);
  rnmodel::Model donor(testing::tiny_config(6, 2), dataio::fit_normalizer(ideal));
  donor.init(1);

  const auto report = evaluate(donor, real);
  std::size_t active = 0;
  for (const auto& ws : real) active += ws.active_count();
  CHECK(report.count() == active);
  CHECK(report.mape == doctest::Approx(mape(report.predictions(), report.targets())));

  SweepConfig cfg;
  cfg.counts = {1, 3};
  cfg.seeds = {1, 2, 3};
  cfg.scratch_train = {.lr = 3e-3, .max_epochs = 2, .patience = 2, .batch_size = 2};
  cfg.finetune_train = {.lr = 3e-4, .max_epochs = 2, .patience = 2, .batch_size = 2};
  const std::span<const dataio::WindowedScenario> pool(real.data(), 4), val(real.data() + 4, 1), eval(real.data() + 5, 1);
  const auto a = efficiency_sweep(donor, pool, val, eval, cfg);
  cfg.threads = 3;
  const auto b = efficiency_sweep(donor, pool, val, eval, cfg);
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.points[i].scratch == b.points[i].scratch);
    CHECK(a.points[i].finetuned == b.points[i].finetuned);
    CHECK(a.points[i].scratch.size() == 3);
  }
  std::ostringstream csv;
  write_curve_csv(csv, a);
  CHECK(csv.str().starts_with("count,scratch_mape,finetuned_mape,advantage,seeds\n1,"));

  cfg.counts = {1, 5};
  CHECK_THROWS_WITH_AS(efficiency_sweep(donor, pool, val, eval, cfg), doctest::Contains("exceeds the pool"), ConfigError);
  cfg.counts = {3, 1};
  CHECK_THROWS_AS(efficiency_sweep(donor, pool, val, eval, cfg), ConfigError);
  cfg.counts = {1};
  cfg.seeds = {1, 2};
  CHECK_THROWS_AS(efficiency_sweep(donor, pool, val, eval, cfg), ConfigError);
}
