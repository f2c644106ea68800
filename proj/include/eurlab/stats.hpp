#pragma once

// Poisson Monte Carlo error bars for statistics of count tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "eurlab/error.hpp"
#include "eurlab/measure.hpp"
#include "eurlab/rng.hpp"

namespace eurlab {

struct ErrorBar {
  double mean = 0.0;
  /// Sample standard deviation over the successful replicas.
  double std = 0.0;
  int n_replicas = 0;
  int n_failed = 0;
};

inline constexpr int kDefaultReplicas = 100;

/// Every count N_ij replaced by a Poisson draw of mean N_ij; row k uses
/// stream derive_stream(seed, {k}).
inline CountTable poisson_resample(const CountTable& counts, std::uint64_t seed) {
  CountTable out = counts;
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    CounterRng rng(derive_stream(seed, {k}));
    for (auto& n : out.rows[k].counts) n = poisson(rng, static_cast<double>(n));
  }
  return out;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled by exactly one worker; callers write results by index so the
/// outcome does not depend on scheduling. If any call throws, the exception
/// from the lowest failing index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = std::thread::hardware_concurrency()) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads, n);
  auto worker = [&](unsigned t) {
    for (std::size_t i = t; i < n; i += threads) {
      try {
        fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        error_index[t] = i;
        return;
      }
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  std::size_t first = 0;
  for (unsigned t = 1; t < threads; ++t)
    if (error_index[t] < error_index[first]) first = t;
  if (errors[first]) std::rethrow_exception(errors[first]);
}

using VectorStatistic = std::function<std::vector<double>(const CountTable&)>;
using ScalarStatistic = std::function<double(const CountTable&)>;

/// Mean and standard deviation of each component of `statistic` over
/// `replicas` Poisson resamplings of `counts`. Replica r draws from stream
/// derive_stream(seed, {r}). Replicas on which the statistic throws are
/// dropped; more than 10% failures raise StatisticFailure.
inline std::vector<ErrorBar> mc_error_bars(const CountTable& counts, const VectorStatistic& statistic, int replicas,
                                           std::uint64_t seed,
                                           unsigned threads = std::thread::hardware_concurrency()) {
  if (replicas < 2) throw Error(ErrorCode::DomainError, "need at least 2 replicas");
  std::vector<std::vector<double>> values(static_cast<std::size_t>(replicas));
  std::vector<char> ok(static_cast<std::size_t>(replicas), 0);
  parallel_for(values.size(), [&](std::size_t r) {
    try {
      values[r] = statistic(poisson_resample(counts, derive_stream(seed, {r})));
      ok[r] = 1;
    } catch (const Error&) {
      ok[r] = 0;
    }
  }, threads);

  int failed = 0;
  std::size_t width = 0;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (!ok[r]) {
      ++failed;
    } else {
      width = values[r].size();
    }
  }
  if (failed * 10 > replicas) {
    throw Error(ErrorCode::StatisticFailure,
                std::to_string(failed) + " of " + std::to_string(replicas) + " replicas failed");
  }
  const int good = replicas - failed;
  if (good < 2) throw Error(ErrorCode::StatisticFailure, "fewer than 2 successful replicas");

  std::vector<ErrorBar> bars(width);
  for (std::size_t c = 0; c < width; ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < values.size(); ++r)
      if (ok[r]) sum += values[r][c];
    const double mean = sum / good;
    double ss = 0.0;
    for (std::size_t r = 0; r < values.size(); ++r)
      if (ok[r]) ss += (values[r][c] - mean) * (values[r][c] - mean);
    bars[c] = {mean, std::sqrt(ss / (good - 1)), good, failed};
  }
  return bars;
}

inline ErrorBar mc_error_bar(const CountTable& counts, const ScalarStatistic& statistic, int replicas,
                             std::uint64_t seed, unsigned threads = std::thread::hardware_concurrency()) {
  const auto bars = mc_error_bars(
      counts, [&](const CountTable& t) { return std::vector<double>{statistic(t)}; }, replicas, seed, threads);
  return bars.at(0);
}

}  // namespace eurlab
