#include <algorithm>
#include <cmath>
#include <set>

#include "carve/errors.hpp"
#include "carve/experiment.hpp"
#include "doctest.h"

using namespace carve;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.n = 40;
  c.p = 30;
  c.s = 3;
  c.n_sims = 6;
  c.snr_grid = {0.0, 1.0};
  c.frac_grid = {0.2, 0.3};
  c.lam_frac = 0.6;
  c.threads = 1;
  return c;
}

DiabetesOptions diabetes_options() {
  DiabetesOptions o;
  o.data = CARVE_DATA_DIR "/diabetes.csv";
  return o;
}

}  // namespace

TEST_CASE("sample-mean power at the null equals the level") {
  const auto rows = power_sample_mean(100, 40, 4.0, 0.1, {0.0, 20.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].ok);
  CHECK(std::abs(rows[0].carve - 0.1) < 1e-9);
  CHECK(std::abs(rows[0].split - 0.1) < 1e-12);
  CHECK(std::abs(rows[0].posi - 0.1) < 1e-9);
  CHECK(rows[1].carve > 1.0 - 1e-6);
  CHECK(rows[1].split > 1.0 - 1e-6);
}

TEST_CASE("sample-mean carving power dominates splitting") {
  const std::vector<double> mu{0.0, 0.1, 0.25, 0.5, 1.0};
  for (int n_a : {1, 10, 50, 90, 99}) {
    for (const auto& r : power_sample_mean(100, n_a, 4.0, 0.1, mu)) {
      REQUIRE(r.ok);
      CHECK(r.carve >= r.split - 1e-9);
      if (r.mu > 0.0) CHECK(r.carve > r.split);
    }
  }
  CHECK_THROWS_AS(power_sample_mean(100, 100, 4.0, 0.1, mu), ConfigError);
  CHECK_THROWS_AS(power_sample_mean(100, 0, 4.0, 0.1, mu), ConfigError);
}

TEST_CASE("power table shape") {
  const Table t = to_table(power_sample_mean(100, 30, 4.0, 0.1, {0.0, 0.5, 1.0}));
  CHECK(t.rows.size() == 3);
  CHECK(t.number(2, "n_b") == 70);
  CHECK(t.number(0, "ok") == 1);
}

TEST_CASE("regression data scale and seeding") {
  SimConfig c = small_config();
  const SimData a = simulate_regression(c, 0.0, 11);
  const SimData b = simulate_regression(c, 1.0, 11);
  CHECK(a.X == b.X);
  CHECK(a.beta0[0] == doctest::Approx(std::sqrt(1.0 / 3.0)));
  CHECK(b.beta0[0] == doctest::Approx(std::sqrt(10.0 / 3.0)));
  CHECK(a.beta0.tail(c.p - c.s).isZero());
  CHECK((a.y - a.X * a.beta0).isApprox(b.y - b.X * b.beta0, 1e-12));
  CHECK(simulate_regression(c, 0.0, 12).X != a.X);
  CHECK(run_seed(5, 2) == 5 + 2 * 1000003ULL);
}

TEST_CASE("hdr grid is deterministic and independent of worker count") {
  SimConfig c = small_config();
  const auto a = to_csv(to_table(run_hdr_grid(c)));
  CHECK(a == to_csv(to_table(run_hdr_grid(c))));
  c.threads = 3;
  CHECK(a == to_csv(to_table(run_hdr_grid(c))));
  c.threads = 1;
  c.n_sims = 1;
  CHECK(to_csv(to_table(run_hdr_grid(c))) == to_csv(to_table(run_hdr_grid(c))));
}

TEST_CASE("hdr records are internally consistent") {
  SimConfig c = small_config();
  c.algorithm = Algorithm::marginal_screen;
  c.k = 4;
  const auto recs = run_hdr_grid(c);
  std::set<std::string> methods;
  for (const auto& r : recs) {
    methods.insert(r.method);
    CHECK(r.trials > 0);
    CHECK(r.value >= 0.0);
    CHECK(r.value <= 1.0);
    CHECK(r.ci_lo <= r.value);
    CHECK(r.value <= r.ci_hi);
    CHECK(r.run == c.n_sims);
    CHECK((r.method == "posi") == (r.frac_b == 0.0));
  }
  CHECK(methods == std::set<std::string>{"carve", "naive", "posi", "split"});

  const auto back = sim_records_from_table(parse_csv(to_csv(to_table(recs))));
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].method == recs[i].method);
    CHECK(back[i].metric == recs[i].metric);
    CHECK(back[i].successes == recs[i].successes);
    CHECK(back[i].value == round12(recs[i].value));
  }
}

TEST_CASE("aggregate drops rates with empty denominators") {
  Tally t;
  t.true_tested = 4;
  t.true_rejected = 3;
  const auto recs = aggregate(0.0, 0.2, "carve", t, 10);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].metric == Metric::type2);
  CHECK(recs[0].value == 0.25);
}

TEST_CASE("tally counts rejections, selections and coverage") {
  std::vector<CarveResult> rs(3);
  rs[0].feature = 0;
  rs[0].pvalue = 0.01;
  rs[0].ci = {0.5, 1.5};
  rs[1].feature = 1;
  rs[1].pvalue = 0.5;
  rs[1].ci = {2.0, 3.0};
  rs[2].feature = 4;
  rs[2].pvalue = 0.05;
  rs[2].ci = {-1.0, 1.0};
  Vector truth = Vector::Zero(5);
  truth[0] = truth[1] = 1.0;
  const Tally t = tally(rs, {0, 1, 4}, truth, 2, 0.1);
  CHECK(t.true_tested == 2);
  CHECK(t.true_rejected == 1);
  CHECK(t.null_tested == 1);
  CHECK(t.null_rejected == 1);
  CHECK(t.selected == 3);
  CHECK(t.true_selected == 2);
  CHECK(t.covered == 2);
  CHECK(t.intervals == 3);
}

TEST_CASE("sim config validation and full scale") {
  SimConfig c = small_config();
  CHECK_NOTHROW(validate(c));
  c.s = 100;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = small_config();
  c.algorithm = Algorithm::sample_mean;
  CHECK_THROWS_AS(validate(c), ConfigError);
  const SimConfig big = full_scale(SimConfig{});
  CHECK(big.snr_grid.size() == 7);
  CHECK(big.n_sims == 500);
}

TEST_CASE("diabetes: the literal lambda reading selects five features") {
  DiabetesOptions o = diabetes_options();
  o.reading = LambdaReading::literal;
  const DiabetesReport rep = analyze_diabetes(o);
  CHECK(rep.features.size() == 10);
  CHECK(rep.full_selection == std::vector<int>{1, 2, 3, 6, 8});
  CHECK(rep.sigma2 > 0.0);

  o.reading = LambdaReading::fraction;
  const DiabetesReport frac = analyze_diabetes(o);
  CHECK(frac.full_selection == std::vector<int>{2, 3, 6, 8});
}

TEST_CASE("diabetes: alpha near one collapses the intervals") {
  DiabetesOptions o = diabetes_options();
  o.alpha = 0.999;
  const DiabetesReport rep = analyze_diabetes(o);
  REQUIRE(!rep.cis.rows.empty());
  for (std::size_t i = 0; i < rep.cis.rows.size(); ++i) {
    const double width = rep.cis.number(i, "ci_hi") - rep.cis.number(i, "ci_lo");
    CHECK(width >= 0.0);
    CHECK(width < 0.05);
  }
}

TEST_CASE("diabetes ingestion errors") {
  DiabetesOptions o = diabetes_options();
  o.target = "missing";
  CHECK_THROWS_AS(analyze_diabetes(o), IoError);
  o = diabetes_options();
  o.data = "/nonexistent/diabetes.csv";
  CHECK_THROWS_AS(analyze_diabetes(o), IoError);
}
