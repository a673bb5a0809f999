#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "invariants.hpp"
#include "mec/csv.hpp"
#include "mec/episode.hpp"
#include "mec/report.hpp"
#include "mec/sweep.hpp"

using namespace mec;
namespace fs = std::filesystem;

namespace {

Config quick() {
  Config c;
  c.experiment.warmupDrl = 60;
  c.experiment.warmupBaseline = 20;
  c.experiment.window = 50;
  c.learning.batchSize = 8;
  return c;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "mec_harness_tests";
  fs::create_directories(dir);
  return dir / name;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

}  // namespace

TEST_CASE("csv numbers round-trip exactly") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(uniform01(rng) - 0.5, static_cast<int>(rng() % 200) - 100);
    CHECK(csv::parse_double(csv::format_double(v)) == v);
  }
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(std::isnan(csv::parse_double("nan")));
  CHECK(csv::parse_double("-inf") == -INFINITY);
  CHECK_THROWS_AS(csv::parse_double("1.5x"), std::invalid_argument);
}

TEST_CASE("csv files carry their schema") {
  csv::Table t{"demo", csv::kSchemaVersion, {"a", "b"}, {{"1", "x"}, {"2.5", "y"}}};
  const auto path = scratch("demo.csv");
  csv::write(t, path);
  std::ifstream is(path);
  std::string first;
  std::getline(is, first);
  CHECK(first == "# schema=demo/1");
  const auto back = csv::read(path);
  CHECK(back.schema == "demo");
  CHECK(back.version == 1);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("b") == 1);
  CHECK_THROWS_AS(back.column("c"), std::out_of_range);

  t.rows.push_back({"3"});
  CHECK_THROWS(csv::write(t, scratch("ragged.csv")));
  t.rows.back() = {"3", "has,comma"};
  CHECK_THROWS(csv::write(t, scratch("comma.csv")));
  std::ofstream(scratch("noschema.csv")) << "a,b\n1,2\n";
  CHECK_THROWS_AS(csv::read(scratch("noschema.csv")), std::runtime_error);
}

TEST_CASE("zero slots give an empty series") {
  CHECK(run_episode(quick(), Policy::Drl, 1, 0).slots.empty());
  CHECK(run_episode(quick(), Policy::QueueAware, 1, 0).slots.empty());
}

TEST_CASE("policy names") {
  CHECK(parse_policy("drl") == Policy::Drl);
  CHECK(parse_policy("channel") == Policy::ChannelAware);
  CHECK(parse_policy("queue") == Policy::QueueAware);
  CHECK(policy_name(Policy::QueueAware) == "queue");
  CHECK_THROWS_AS(parse_policy("random"), std::invalid_argument);
}

TEST_CASE("identical inputs give byte-identical output") {
  for (Policy p : {Policy::Drl, Policy::ChannelAware, Policy::QueueAware}) {
    const auto r = checks::byte_identical_runs(quick(), p, 5, 300);
    INFO(r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("different seeds give different runs") {
  const auto a = report::metrics_table(run_episode(quick(), Policy::QueueAware, 1, 200));
  const auto b = report::metrics_table(run_episode(quick(), Policy::QueueAware, 2, 200));
  CHECK_FALSE(a.rows == b.rows);
}

TEST_CASE("reported means match the raw per-slot log") {
  const Config c = quick();
  const auto series = run_episode(c, Policy::Drl, 3, 400);
  REQUIRE(series.slots.size() == 400);
  const auto path = scratch("raw.csv");
  csv::write(report::metrics_table(series), path);
  const auto raw = csv::read(path);
  REQUIRE(raw.rows.size() == 400);

  const auto rows = windowed(series, 50);
  REQUIRE(rows.size() == 8);
  for (const auto& w : rows) {
    for (std::size_t m = 0; m < metric_names().size(); ++m) {
      const std::size_t col = raw.column(metric_names()[m]);
      double sum = 0;
      int n = 0;
      for (long t = w.firstSlot; t <= w.lastSlot; ++t) {
        const double v = csv::parse_double(raw.rows[t - 1][col]);
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
      }
      const double expect = n ? sum / n : std::numeric_limits<double>::quiet_NaN();
      if (std::isnan(expect))
        CHECK(std::isnan(w.means[m]));
      else
        CHECK(std::abs(w.means[m] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
  }
  const auto ma = moving_average(series, 4, 50);
  double tail = 0;
  for (std::size_t t = 350; t < 400; ++t) tail += series.slots[t].utility;
  CHECK(ma.back() == doctest::Approx(tail / 50).epsilon(1e-12));
}

TEST_CASE("learning metrics appear once training starts") {
  const Config c = quick();
  const auto s = run_episode(c, Policy::Drl, 1, 100);
  CHECK_FALSE(s.slots.front().loss.has_value());
  CHECK(s.slots.back().loss.has_value());
  CHECK(s.slots.back().paymentValue.has_value());
  const auto b = run_episode(c, Policy::ChannelAware, 1, 100);
  CHECK_FALSE(b.slots.back().loss.has_value());
  CHECK(b.slots.back().payment == 0.0);
}

TEST_CASE("sweep grid") {
  const Config c = quick();
  SweepSpec spec;
  spec.slots = 150;
  spec.seeds = 2;
  const auto r = sweep_parallel(spec, c);
  CHECK(r.rows.size() == 12);
  CHECK(r.runs.size() == 24);
  for (const auto& row : r.rows) CHECK(row.seeds == 2);
  CHECK(r.rows.front().policy == Policy::Drl);
  CHECK(r.rows.front().rateBps == 1.2e6);

  const auto table = report::sweep_table(r.rows);
  CHECK(table.rows.size() == 12);
  CHECK(table.header.size() == 3 + 2 * metric_names().size());

  spec.slots = 10;  // below the warmup
  CHECK_THROWS_AS(sweep_serial(spec, c), std::invalid_argument);
}

TEST_CASE("one rate and one seed reproduce the run's own means") {
  const Config c = quick();
  SweepSpec spec;
  spec.ratesBps = {1.5e6};
  spec.seeds = 1;
  spec.firstSeed = 4;
  spec.slots = 200;
  const auto r = sweep_serial(spec, c);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    Config at = c;
    at.sim.packetRateBps = 1.5e6;
    const auto series = run_episode(at, row.policy, 4, 200);
    const auto means = window_means(series, static_cast<std::size_t>(warmup_for(at, row.policy)), 200);
    for (std::size_t m = 0; m < means.size(); ++m) CHECK(same(row.mean[m], means[m]));
    for (double sd : row.stddev) CHECK((sd == 0.0 || std::isnan(sd)));
  }
}

TEST_CASE("aggregation statistics") {
  std::vector<RunResult> runs;
  for (int s = 0; s < 3; ++s) runs.push_back({Policy::QueueAware, 1e6, static_cast<std::uint64_t>(s), {1.0 + s}, {}});
  runs.push_back({Policy::Drl, 1e6, 0, {5.0}, {}});
  const auto rows = aggregate(runs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].policy == Policy::Drl);
  CHECK(rows[0].stddev[0] == 0.0);
  CHECK(rows[1].mean[0] == 2.0);
  CHECK(rows[1].stddev[0] == 1.0);
}

TEST_CASE("serial and parallel sweeps agree") {
  const Config c = quick();
  SweepSpec spec;
  spec.ratesBps = {1.2e6, 2.1e6};
  spec.seeds = 2;
  spec.slots = 120;
  const auto a = sweep_serial(spec, c);
  const auto b = sweep_parallel(spec, c);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].policy == b.runs[i].policy);
    CHECK(a.runs[i].seed == b.runs[i].seed);
    for (std::size_t m = 0; m < a.runs[i].means.size(); ++m) CHECK(same(a.runs[i].means[m], b.runs[i].means[m]));
  }
}

TEST_CASE("a restored episode continues exactly like the uninterrupted one") {
  const Config c = quick();
  for (Policy p : {Policy::Drl, Policy::ChannelAware, Policy::QueueAware}) {
    Episode whole(c, p, 8);
    for (int t = 0; t < 240; ++t) whole.step();

    Episode first(c, p, 8);
    for (int t = 0; t < 120; ++t) first.step();
    std::stringstream ckpt;
    first.save(ckpt);

    Episode resumed(c, p, 999);  // a different seed: everything must come from the checkpoint
    resumed.restore(ckpt);
    CHECK(resumed.state() == first.state());
    for (int t = 0; t < 120; ++t) resumed.step();
    CHECK(resumed.state() == whole.state());
    CHECK(resumed.last_outcome().utility == whole.last_outcome().utility);

    std::stringstream a, b;
    whole.save(a);
    resumed.save(b);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("restore rejects a checkpoint from another policy") {
  const Config c = quick();
  Episode drl(c, Policy::Drl, 1);
  std::stringstream ckpt;
  drl.save(ckpt);
  Episode queue(c, Policy::QueueAware, 1);
  CHECK_THROWS_AS(queue.restore(ckpt), std::runtime_error);
  std::stringstream empty;
  CHECK_THROWS_AS(drl.restore(empty), std::runtime_error);
}
