#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fleetcbm/degradation.hpp"
#include "stats_support.hpp"

using namespace fleetcbm;

namespace {

AssetSpec asset(double threshold, double initial = 0.0) {
  AssetSpec a;
  a.id = "a";
  a.failure_threshold = threshold;
  a.initial_level = initial;
  a.production_capacity = 100;
  return a;
}

SignalPath fixed_peer(const std::string& id, std::vector<double> levels) {
  SignalPath p;
  p.asset = id;
  p.production.assign(levels.size() - 1, 0.0);
  p.levels = std::move(levels);
  return p;
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

}  // namespace

TEST_CASE("noiseless increments follow the linear drift") {
  Rng rng(1);
  DegradationParams p{1.5, 0.0, 0.0, {}};
  CHECK(sample_increment(p, 0.0, {}, rng) == 1.5);

  DegradationParams q{1.0, 0.0, 0.02, {{"peer", 0.01}}};
  CHECK(sample_increment(q, 50.0, {{"peer", 40.0}}, rng) == doctest::Approx(2.4).epsilon(1e-15));
}

TEST_CASE("sample mean of increments matches the drift") {
  // D = 10 keeps the zero floor 20 sigma away.
  Rng rng(2024);
  DegradationParams p{10.0, 0.5, 0.0, {}};
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += sample_increment(p, 0.0, {}, rng);
  CHECK(std::abs(sum / n - 10.0) < 3 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("increments are floored at zero") {
  Rng rng(3);
  DegradationParams p{0.1, 5.0, 0.0, {}};
  for (int k = 0; k < 1000; ++k) CHECK(sample_increment(p, 0.0, {}, rng) >= 0.0);
}

TEST_CASE("bad controls are rejected") {
  Rng rng(3);
  DegradationParams p{1.0, 0.0, 0.1, {{"peer", 0.1}}};
  CHECK_THROWS(sample_increment(p, -1.0, {{"peer", 1.0}}, rng));
  CHECK_THROWS(sample_increment(p, 1.0, {}, rng));
  CHECK_THROWS(sample_increment(p, 1.0, {{"peer", -1.0}}, rng));
}

TEST_CASE("deterministic failure times") {
  Rng rng(1);
  {
    const SignalPath path = simulate_path(asset(10), {2.0, 0.0, 0.0, {}}, std::vector<double>(8, 0.0), {}, rng);
    REQUIRE(path.failure_time);
    CHECK(*path.failure_time == 5);
    CHECK(path.levels[5] == 10.0);
    CHECK(path.levels[8] == 10.0);  // frozen after failure
  }
  {
    const SignalPath path = simulate_path(asset(10), {2.0, 0.0, 0.5, {}}, std::vector<double>(8, 4.0), {}, rng);
    REQUIRE(path.failure_time);
    CHECK(*path.failure_time == 3);
    CHECK(path.levels[3] == 12.0);
  }
  {
    const SignalPath path = simulate_path(asset(10, 10), {2.0, 0.0, 0.0, {}}, std::vector<double>(3, 0.0), {}, rng);
    CHECK(path.failure_time == 0);
  }
}

TEST_CASE("peer loading raises the target's increments until it is removed") {
  Rng rng(1);
  std::vector<double> peer(21, 80.0);
  for (int t = 10; t <= 20; ++t) peer[std::size_t(t)] = 0.0;
  const std::map<std::string, SignalPath> peers{{"p", fixed_peer("p", peer)}};
  const SignalPath path = simulate_path(asset(1e6), {1.0, 0.0, 0.0, {{"p", 0.05}}}, std::vector<double>(20, 0.0), peers, rng);
  for (int t = 1; t <= 20; ++t) {
    const double inc = path.levels[std::size_t(t)] - path.levels[std::size_t(t - 1)];
    // Period t sees the peer's level at t-1.
    CHECK(inc == doctest::Approx(t <= 10 ? 5.0 : 1.0));
    CHECK(path.peer_levels.at("p")[std::size_t(t - 1)] == peer[std::size_t(t - 1)]);
  }
}

TEST_CASE("monotone in production and peer level") {
  Rng rng(1);
  DegradationParams p{1.0, 0.0, 0.03, {{"x", 0.02}}};
  double prev = -1.0;
  for (double prod = 0; prod <= 50; prod += 5) {
    const double inc = sample_increment(p, prod, {{"x", 10.0}}, rng);
    CHECK(inc > prev);
    prev = inc;
  }
  prev = -1.0;
  for (double lvl = 0; lvl <= 50; lvl += 5) {
    const double inc = sample_increment(p, 10.0, {{"x", lvl}}, rng);
    CHECK(inc > prev);
    prev = inc;
  }
}

TEST_CASE("paths are reproducible and nondecreasing") {
  DegradationParams p{1.0, 2.0, 0.01, {}};
  std::vector<double> plan(40);
  for (std::size_t t = 0; t < plan.size(); ++t) plan[t] = double(t % 7) * 5;
  Rng r1 = stream_rng(99, 3, 1), r2 = stream_rng(99, 3, 1);
  const SignalPath a = simulate_path(asset(1e6), p, plan, {}, r1);
  const SignalPath b = simulate_path(asset(1e6), p, plan, {}, r2);
  CHECK(a.levels == b.levels);
  for (std::size_t t = 1; t < a.levels.size(); ++t) CHECK(a.levels[t] >= a.levels[t - 1]);

  Rng r3 = stream_rng(99, 3, 2), r4 = stream_rng(99, 4, 1), r5 = stream_rng(100, 3, 1);
  Rng r6 = stream_rng(99, 3, 1);
  const auto first = r6();
  CHECK(r3() != first);
  CHECK(r4() != first);
  CHECK(r5() != first);
}

TEST_CASE("noiseless least squares recovers the coefficients") {
  const int H = 60;
  std::vector<double> plan(H), peer(H + 1);
  for (int t = 0; t < H; ++t) plan[std::size_t(t)] = 10.0 + 7.0 * ((t * 5) % 11);
  for (int t = 0; t <= H; ++t) peer[std::size_t(t)] = double((t * 3) % 17) * 4.0;
  const std::map<std::string, SignalPath> peers{{"p", fixed_peer("p", peer)}};
  Rng rng(1);
  const SignalPath path = simulate_path(asset(1e9), {1.0, 0.0, 0.02, {{"p", 0.01}}}, plan, peers, rng);
  const DegradationParams est = estimate_params(path);
  CHECK(std::abs(est.nominal_rate - 1.0) < 1e-9);
  CHECK(std::abs(est.oid_coeff - 0.02) < 1e-9);
  CHECK(std::abs(est.mdi_coeffs.at("p") - 0.01) < 1e-9);
  CHECK(est.error_std < 1e-9);
}

TEST_CASE("noisy fits scatter around the truth") {
  const int H = 500, reps = 200;
  std::vector<double> plan(H);
  for (int t = 0; t < H; ++t) plan[std::size_t(t)] = 5.0 + double((t * 7) % 13) * 3.0;
  std::vector<double> d;
  for (int r = 0; r < reps; ++r) {
    Rng rng = stream_rng(17, std::uint64_t(r), 0);
    const SignalPath path = simulate_path(asset(1e9), {1.0, 0.3, 0.02, {}}, plan, {}, rng);
    d.push_back(estimate_params(path).nominal_rate);
  }
  const double m = mean_of(d);
  double var = 0.0;
  for (double x : d) var += (x - m) * (x - m);
  const double se = std::sqrt(var / (reps - 1));
  CHECK(se > 0.0);
  CHECK(std::abs(d[0] - 1.0) < 3 * se);
  CHECK(std::abs(m - 1.0) < 3 * se / std::sqrt(double(reps)));
}

TEST_CASE("unidentifiable coefficients are named") {
  Rng rng(1);
  const SignalPath flat_prod = simulate_path(asset(1e9), {1.0, 0.3, 0.0, {}}, std::vector<double>(30, 0.0), {}, rng);
  CHECK_THROWS_WITH(estimate_params(flat_prod), "zeta unidentifiable");

  std::vector<double> plan(30);
  for (std::size_t t = 0; t < plan.size(); ++t) plan[t] = double(t % 4);
  const std::map<std::string, SignalPath> peers{{"p", fixed_peer("p", std::vector<double>(31, 5.0))}};
  const SignalPath flat_peer = simulate_path(asset(1e9), {1.0, 0.3, 0.0, {{"p", 0.1}}}, plan, peers, rng);
  CHECK_THROWS_WITH(estimate_params(flat_peer), "gamma[p] unidentifiable");

  const SignalPath short_path = simulate_path(asset(1e9), {1.0, 0.3, 0.0, {}}, {1, 2, 3}, {}, rng);
  CHECK_THROWS(estimate_params(short_path));
}

TEST_CASE("deterministic remaining life") {
  Rng rng(1);
  const EmpiricalRld rld = remaining_life_distribution({2.0, 0.0, 0.0, {}}, 0.0, 10.0, {}, 50, rng);
  REQUIRE(rld.samples.size() == 50);
  for (double s : rld.samples) CHECK(s == 5.0);
  CHECK(rld.mean() == 5.0);
}

TEST_CASE("remaining life errors") {
  Rng rng(1);
  CHECK_THROWS_WITH(remaining_life_distribution({0.0, 0.0, 0.0, {}}, 0.0, 10.0, {}, 5, rng), "non-degrading process");
  CHECK_THROWS(remaining_life_distribution({1.0, 0.0, 0.0, {}}, 10.0, 10.0, {}, 5, rng));
}

TEST_CASE("Brownian first passage follows the inverse Gaussian law") {
  const double mu = 1.0, sigma = 1.0, gap = 20.0;
  const std::size_t n = 10000;
  Rng rng(7), oracle(8);
  const EmpiricalRld rld = remaining_life_distribution({mu, sigma, 0.0, {}}, 0.0, gap, {}, n, rng);
  std::vector<double> ig(n);
  for (double& x : ig) x = std::ceil(testing::sample_inverse_gaussian(gap / mu, gap * gap / (sigma * sigma), oracle));
  const auto ks = testing::ks_two_sample(rld.samples, ig);
  CHECK(ks.p_value > 0.01);
  CHECK(std::abs(rld.mean() - (gap / mu + 0.5)) < 0.5);
}

TEST_CASE("doubling sigma keeps the mean in the drift-dominated regime") {
  Rng r1(31), r2(32);
  const double m1 = remaining_life_distribution({1.0, 1.0, 0.0, {}}, 0.0, 20.0, {}, 10000, r1).mean();
  const double m2 = remaining_life_distribution({1.0, 2.0, 0.0, {}}, 0.0, 20.0, {}, 10000, r2).mean();
  CHECK(std::abs(m2 - m1) / m1 < 0.05);
}

TEST_CASE("controls enter the remaining-life drift") {
  Rng rng(1);
  const EmpiricalRld rld =
      remaining_life_distribution({1.0, 0.0, 0.1, {{"p", 0.05}}}, 0.0, 12.0, {10.0, {{"p", 20.0}}}, 4, rng);
  for (double s : rld.samples) CHECK(s == 4.0);  // 1 + 1 + 1 per period
}

TEST_CASE("path CSV layout") {
  Rng rng(1);
  const SignalPath path = simulate_path(asset(5), {2.0, 0.0, 0.0, {}}, {1, 1, 1}, {}, rng);
  std::ostringstream out;
  write_paths_csv(out, {path});
  CHECK(out.str() ==
        "asset,t,level,production,failed\n"
        "a,0,0,0,0\n"
        "a,1,2,1,0\n"
        "a,2,4,1,0\n"
        "a,3,6,1,1\n");
}
