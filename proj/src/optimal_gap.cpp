#include "adastep/optimal_gap.hpp"

#include <algorithm>
#include <limits>

namespace adastep {

std::uint64_t binomial(Index n, Index k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (Index i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

bool for_each_batch(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                    const std::function<void(const Batch &)> &fn) {
  if (batch_size < 1 || batch_size > n) throw ConfigError("batch enumeration: need 1 <= B <= n");
  if (binomial(n, batch_size) <= kExactEnumerationLimit) {
    Batch batch(batch_size);
    for (Index i = 0; i < batch_size; ++i) batch[i] = i;
    while (true) {
      fn(batch);
      // Next combination in lexicographic order.
      Index pos = batch_size;
      while (pos > 0 && batch[pos - 1] == n - batch_size + pos - 1) --pos;
      if (pos == 0) break;
      ++batch[pos - 1];
      for (Index j = pos; j < batch_size; ++j) batch[j] = batch[j - 1] + 1;
    }
    return true;
  }
  if (sample_count == 0) throw ConfigError("batch enumeration: sample_count must be positive");
  Sampler sampler(n, batch_size, seed);
  for (std::uint64_t s = 0; s < sample_count; ++s) fn(sampler.sample());
  return false;
}

double batch_expectation(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                         const std::function<double(const Batch &)> &fn) {
  double sum = 0.0;
  std::uint64_t count = 0;
  for_each_batch(n, batch_size, sample_count, seed, [&](const Batch &b) {
    sum += fn(b);
    ++count;
  });
  return sum / static_cast<double>(count);
}

double batch_maximum(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                     const std::function<double(const Batch &)> &fn) {
  double best = -std::numeric_limits<double>::infinity();
  for_each_batch(n, batch_size, sample_count, seed, [&](const Batch &b) { best = std::max(best, fn(b)); });
  return best;
}

namespace {
double require_min(const FiniteSumProblem &problem, const Batch &batch) {
  auto v = problem.batch_min(batch);
  if (!v) throw ConfigError("problem '" + problem.kind() + "' does not expose batch minima");
  return *v;
}
}  // namespace

double sigma_f_B(const FiniteSumProblem &problem, double f_star, Index batch_size,
                 std::uint64_t sample_count, std::uint64_t seed) {
  const double mean_min = batch_expectation(problem.size(), batch_size, sample_count, seed,
                                            [&](const Batch &b) { return require_min(problem, b); });
  return f_star - mean_min;
}

double err_f_B(const FiniteSumProblem &problem, Index batch_size, std::uint64_t sample_count,
               std::uint64_t seed) {
  return batch_expectation(problem.size(), batch_size, sample_count, seed, [&](const Batch &b) {
    return require_min(problem, b) - problem.batch_lower_bound(b);
  });
}

}  // namespace adastep
