#include <cmath>
#include <vector>

#include "doctest.h"
#include "wigner/errors.hpp"
#include "wigner/experiments.hpp"

using namespace wigner;

namespace {

Series make_series(double rate, std::size_t n = 101, double h = 0.1) {
  Series s(n);
  for (std::size_t k = 0; k < n; ++k) {
    s[k].t = h * static_cast<double>(k);
    s[k].s2 = -rate * s[k].t;
    s[k].purity = std::exp(s[k].s2);
  }
  return s;
}

}  // namespace

TEST_CASE("regime classification") {
  CHECK(classify_regime(2.0) == Regime::classical);
  CHECK(classify_regime(40.0) == Regime::semi_classical);
  CHECK(classify_regime(100.0) == Regime::quantum);
  CHECK(classify_regime(9.99) == Regime::classical);
  CHECK(classify_regime(10.0) == Regime::semi_classical);
  CHECK(regime_label(Regime::quantum) == "III");
  CHECK(classify_regime(5.0, {1.0, 4.0}) == Regime::quantum);
}

TEST_CASE("reference scaling groups") {
  const auto groups = figure2_groups();
  REQUIRE(groups.size() == 3);
  CHECK(groups[0].zeta0 == 2.0);
  CHECK(groups[1].zeta0 == 40.0);
  CHECK(groups[2].zeta0 == 100.0);
  CHECK(groups[1].members[0].zeta0() == doctest::Approx(40.0));
  for (const auto& g : groups) {
    CHECK(g.members.size() == 3);
    CHECK_NOTHROW(g.validate(false));
  }
  CHECK(groups[1].off_scale_members().empty());
  CHECK(groups[2].off_scale_members().empty());
  // (0.1, 5e-4) as printed has hbar^2/D = 20
  REQUIRE(groups[0].off_scale_members().size() == 1);
  CHECK_THROWS_AS(groups[0].validate(true), ConfigError);
  CHECK(groups[0].label == Regime::classical);
  CHECK(groups[2].label == Regime::quantum);
}

TEST_CASE("collapse metrics on synthetic series") {
  const Series a = make_series(1.0);
  const Series b = make_series(1.05);
  const Series c = make_series(3.0);
  const TimeWindow w{0.0, 10.0};
  CHECK(pair_distance(a, b, w) == doctest::Approx(0.5));
  CHECK(pair_distance(a, a, w) == 0.0);
  CHECK(pair_distance(a, b, {0.0, 2.0}) == doctest::Approx(0.1));
  const std::vector<const Series*> g1 = {&a, &b};
  const std::vector<const Series*> g2 = {&c};
  CHECK(collapse_metric(g1, w) == doctest::Approx(0.5));
  CHECK(cross_group_separation(g1, g2, w) == doctest::Approx(19.5));
  const std::vector<const Series*> one = {&a};
  CHECK_THROWS_AS(collapse_metric(one, w), DataError);

  Series shifted = a;
  shifted[3].t += 0.05;
  CHECK_THROWS_AS(pair_distance(a, shifted, w), DataError);
  CHECK_THROWS_AS(pair_distance(a, b, {20.0, 30.0}), DataError);
}

TEST_CASE("normalized purity and medians") {
  const Series a = make_series(1.0);
  const Series b = make_series(2.0);
  const Series c = make_series(3.0);
  CHECK(normalized_purity_at(a, 0.0) == 1.0);
  CHECK(normalized_purity_at(a, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(normalized_purity_at(a, 1.05) ==
        doctest::Approx(0.5 * (std::exp(-1.0) + std::exp(-1.1))));
  CHECK_THROWS_AS(normalized_purity_at(a, 11.0), DataError);
  const std::vector<const Series*> g = {&c, &a, &b};
  CHECK(group_median_normalized_purity(g, 1.0) == doctest::Approx(std::exp(-2.0)));
  const auto rel = relative_entropy(b);
  CHECK(rel.front() == 0.0);
  CHECK(rel[10] == doctest::Approx(-2.0));
}

TEST_CASE("metastable plateau is found where chi2 is flat") {
  Series s = make_series(0.0, 201);
  const double D = 5e-4;
  for (auto& r : s) {
    // ramp to a plateau of 200 between t = 6 and t = 14, then growth
    if (r.t < 6.0) r.chi2_p = 50.0 + 25.0 * r.t;
    else if (r.t <= 14.0) r.chi2_p = 200.0;
    else r.chi2_p = 200.0 + 80.0 * (r.t - 14.0);
    r.s2_rate = -2.0 * D * r.chi2_p;
  }
  PlateauOptions o;
  o.min_length = 2.0;
  const auto fit = fit_metastable(s, {5.0, 15.0}, D, o);
  REQUIRE(fit);
  CHECK(fit->chi2_star == doctest::Approx(200.0).epsilon(0.02));
  CHECK(fit->lambda_fit == doctest::Approx(2.0 * D * fit->chi2_star));
  CHECK(fit->window.lo <= 6.5);
  CHECK(fit->window.hi >= 13.5);
  CHECK(std::abs(fit->relative_slope) < 0.1);
  CHECK(fit->entropy_rate == doctest::Approx(fit->lambda_fit).epsilon(0.02));

  for (auto& r : s) r.chi2_p = 10.0 * std::exp(0.5 * r.t);
  CHECK_FALSE(fit_metastable(s, {5.0, 15.0}, D, o));
}

TEST_CASE("first-order fit recovers lambda and a") {
  const double lambda = 0.3;
  const double a = 0.02;
  std::vector<std::pair<double, double>> pts;
  for (double z : {2.0, 40.0, 100.0}) pts.emplace_back(z, lambda * (1.0 + a * z / 4.0));
  const auto fit = fit_first_order(pts);
  REQUIRE(fit);
  CHECK(fit->lambda == doctest::Approx(lambda));
  CHECK(fit->a == doctest::Approx(a));
  CHECK(fit->runs == 3);
  const std::vector<std::pair<double, double>> same = {{2.0, 1.0}, {2.0, 2.0}};
  CHECK_FALSE(fit_first_order(same));
}

TEST_CASE("sweep records failures without aborting") {
  SweepConfig cfg;
  cfg.grid = {64, 64, -6.0, 6.0, -16.0, 16.0};
  cfg.initial = {1.0, 0.0, 0.1, 0.5};
  cfg.fixed_var_p = true;
  cfg.evolution.dt = 1e-3;
  cfg.evolution.t_final = 0.02;
  cfg.evolution.record_every = 5;
  // the second member violates the uncertainty bound of the fixed state
  cfg.groups = {{1.0, {{0.1, 0.01}, {1.0, 1.0}}, Regime::classical}};
  cfg.workers = 2;
  std::size_t done = 0;
  const auto result = run_sweep(cfg, [&](const RunOutcome&) { ++done; });
  CHECK(done == 2);
  REQUIRE(result.runs.size() == 2);
  CHECK_FALSE(result.complete());
  CHECK_FALSE(result.runs[0].error);
  CHECK(result.runs[1].error);
  CHECK(result.group_series(0).size() == 1);
}
