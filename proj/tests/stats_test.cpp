#include "eurlab/stats.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gtest/gtest.h"

#include "eurlab/tomography.hpp"
#include "eurlab/uncertainty.hpp"

using namespace eurlab;

namespace {

CountTable single_row(const char* label, std::array<std::uint64_t, 4> n) {
  CountTable t;
  t.rows.push_back({setting_from_label(label), n});
  return t;
}

/// Counts rounded from exact Born probabilities.
CountTable exact_table(const TwoQubitDensity& rho, const std::vector<MeasurementSetting>& plan, double total) {
  CountTable t;
  for (const auto& s : plan) {
    const auto p = born_probabilities(rho, s);
    std::array<std::uint64_t, 4> n{};
    for (std::size_t k = 0; k < 4; ++k) n[k] = static_cast<std::uint64_t>(std::llround(total * p[k]));
    t.rows.push_back({s, n});
  }
  return t;
}

double d_zz(const CountTable& t) { return estimate_disagreement(*t.find("ZZ")); }

double witness(const CountTable& t) {
  return fano_witness(estimate_disagreement(*t.find("XX")), estimate_disagreement(*t.find("ZZ")));
}

}  // namespace

TEST(stats, resample_zero_table) {
  auto t = single_row("ZZ", {0, 0, 0, 0});
  t.rows.push_back({setting_from_label("XX"), {0, 0, 0, 0}});
  const auto r = poisson_resample(t, 3);
  for (const auto& row : r.rows) EXPECT_EQ(row.counts, (std::array<std::uint64_t, 4>{}));
}

TEST(stats, resample_preserves_shape_and_labels) {
  const auto t = simulate_counts(bds_rho1(0.4), tomography_plan(), 6000.0, 8);
  const auto r = poisson_resample(t, 9);
  ASSERT_EQ(r.rows.size(), t.rows.size());
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    EXPECT_EQ(r.rows[k].setting.label, t.rows[k].setting.label);
    EXPECT_EQ(r.rows[k].setting.obs_a.code(), t.rows[k].setting.obs_a.code());
  }
}

TEST(stats, resample_deterministic) {
  const auto t = single_row("ZZ", {6000, 10, 3, 6000});
  EXPECT_EQ(poisson_resample(t, 5).rows[0].counts, poisson_resample(t, 5).rows[0].counts);
  EXPECT_NE(poisson_resample(t, 5).rows[0].counts, poisson_resample(t, 6).rows[0].counts);
}

TEST(stats, resample_poisson_moments) {
  const auto t = single_row("ZZ", {6000, 6000, 6000, 6000});
  const int draws = 10000;
  double sum = 0.0, sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double n = static_cast<double>(poisson_resample(t, 100000 + d).rows[0].counts[0]);
    sum += n;
    sq += n * n;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt((sq - draws * mean * mean) / (draws - 1));
  EXPECT_NEAR(mean, 6000.0, 5.0 * 77.46 / std::sqrt(draws));
  EXPECT_NEAR(sd, std::sqrt(6000.0), 0.02 * std::sqrt(6000.0));
}

TEST(stats, constant_statistic_has_zero_std) {
  const auto t = simulate_counts(bds_rho1(0.4), tomography_plan(), 6000.0, 8);
  const auto bar = mc_error_bar(t, [](const CountTable&) { return 0.75; }, 50, 1);
  EXPECT_DOUBLE_EQ(bar.mean, 0.75);
  EXPECT_DOUBLE_EQ(bar.std, 0.0);
  EXPECT_EQ(bar.n_replicas, 50);
  EXPECT_EQ(bar.n_failed, 0);
}

TEST(stats, disagreement_error_bar_matches_binomial) {
  const auto t = simulate_counts(bds_rho1(0.5), {setting_from_label("ZZ")}, 6000.0, 12);
  const auto bar = mc_error_bar(t, d_zz, 100, 13);
  const double oracle = std::sqrt(0.25 / 6000.0);
  EXPECT_NEAR(bar.std, oracle, 0.3 * oracle);
  EXPECT_NEAR(bar.mean, 0.5, 4.0 * oracle);
}

TEST(stats, error_bar_scales_as_inverse_root_n) {
  const auto plan = std::vector<MeasurementSetting>{setting_from_label("ZZ")};
  const auto small = mc_error_bar(simulate_counts(bds_rho1(0.3), plan, 6000.0, 14), d_zz, 100, 15);
  const auto large = mc_error_bar(simulate_counts(bds_rho1(0.3), plan, 24000.0, 14), d_zz, 100, 15);
  EXPECT_NEAR(small.std / large.std, 2.0, 0.2 * 2.0);
}

TEST(stats, error_bars_deterministic_across_threads) {
  const auto t = simulate_counts(bds_rho2(0.3), tomography_plan(), 6000.0, 16);
  const VectorStatistic stat = [](const CountTable& c) {
    const auto rho = state_mle(tomography_data(c)).state;
    return std::vector<double>{witness(c), concurrence(rho)};
  };
  const auto one = mc_error_bars(t, stat, 20, 17, 1);
  const auto many = mc_error_bars(t, stat, 20, 17, 4);
  ASSERT_EQ(one.size(), 2u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].mean, many[k].mean);
    EXPECT_EQ(one[k].std, many[k].std);
  }
  const auto again = mc_error_bars(t, stat, 20, 17, 3);
  EXPECT_EQ(again[0].std, one[0].std);
}

TEST(stats, witness_bias_shrinks_with_counts) {
  const auto rho = bds_rho1(0.1);
  const std::vector<MeasurementSetting> plan{setting_from_label("XX"), setting_from_label("ZZ")};
  double prev = INFINITY;
  for (double n : {1e3, 1e4, 1e5}) {
    const auto t = exact_table(rho, plan, n);
    const double bias = std::abs(mc_error_bar(t, witness, 1000, 18).mean - witness(t));
    EXPECT_LT(bias, prev) << n;
    prev = bias;
  }
}

TEST(stats, replica_streams_uncorrelated) {
  const auto t = simulate_counts(bds_rho1(0.3), tomography_plan(), 6000.0, 19);
  std::vector<double> a, b;
  for (std::uint64_t pair = 0; pair < 100; ++pair) {
    const auto ra = poisson_resample(t, derive_stream(20, {2 * pair}));
    const auto rb = poisson_resample(t, derive_stream(20, {2 * pair + 1}));
    for (std::size_t k = 0; k < t.rows.size(); ++k)
      for (std::size_t j = 0; j < 4; ++j) {
        const double n = static_cast<double>(t.rows[k].counts[j]);
        if (n == 0) continue;
        const double s = std::sqrt(n);
        a.push_back((static_cast<double>(ra.rows[k].counts[j]) - n) / s);
        b.push_back((static_cast<double>(rb.rows[k].counts[j]) - n) / s);
      }
  }
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / b.size();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.1);
}

TEST(stats, failed_replicas_are_dropped_and_counted) {
  const auto t = single_row("ZZ", {3000, 3000, 3000, 3000});
  // Roughly 2% of replicas hit a multiple of 50.
  const ScalarStatistic flaky = [](const CountTable& c) {
    if (c.rows[0].counts[0] % 50 == 0) throw Error(ErrorCode::NoConvergence, "flaky");
    return d_zz(c);
  };
  const auto bar = mc_error_bar(t, flaky, 200, 21);
  EXPECT_GT(bar.n_failed, 0);
  EXPECT_LE(bar.n_failed, 20);
  EXPECT_EQ(bar.n_replicas + bar.n_failed, 200);
}

TEST(stats, too_many_failures) {
  const auto t = single_row("ZZ", {3000, 3000, 3000, 3000});
  const ScalarStatistic odd = [](const CountTable& c) {
    if (c.rows[0].counts[0] % 2) throw Error(ErrorCode::NoConvergence, "odd");
    return 1.0;
  };
  try {
    mc_error_bar(t, odd, 100, 22);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StatisticFailure);
  }
}

TEST(stats, replicas_must_be_at_least_two) {
  const auto t = single_row("ZZ", {1, 1, 1, 1});
  try {
    mc_error_bar(t, d_zz, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainError);
  }
}

TEST(stats, parallel_for_covers_every_index_once) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 7);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, [&](std::size_t) { FAIL(); }, 4);
}

TEST(stats, parallel_for_rethrows_lowest_failing_index) {
  for (unsigned threads : {1u, 3u, 8u}) {
    try {
      parallel_for(100, [](std::size_t i) {
        if (i == 17 || i == 42 || i == 90) throw std::runtime_error(std::to_string(i));
      }, threads);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "17") << threads;
    }
  }
}
