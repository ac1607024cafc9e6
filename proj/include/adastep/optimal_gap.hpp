#pragma once

#include "adastep/problem.hpp"

#include <cstdint>
#include <functional>

namespace adastep {

/// Number of size-B subsets of n items, saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index k);

/// Subsets are enumerated exactly when there are at most this many.
inline constexpr std::uint64_t kExactEnumerationLimit = 10000;

/// Calls fn on every size-B subset when there are at most
/// kExactEnumerationLimit of them, otherwise on sample_count random batches.
/// Returns true for exact enumeration.
bool for_each_batch(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                    const std::function<void(const Batch &)> &fn);

/// E over uniformly drawn size-B batches of fn(batch).
///
/// Exact enumeration when the subset count is small, otherwise a Monte-Carlo
/// mean over sample_count batches drawn with the given seed.
double batch_expectation(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                         const std::function<double(const Batch &)> &fn);

/// max over batches of fn(batch), enumerated or sampled as above.
double batch_maximum(Index n, Index batch_size, std::uint64_t sample_count, std::uint64_t seed,
                     const std::function<double(const Batch &)> &fn);

/// Optimal objective difference f* - E[f*_B]. Requires problem.batch_min.
double sigma_f_B(const FiniteSumProblem &problem, double f_star, Index batch_size,
                 std::uint64_t sample_count = 2000, std::uint64_t seed = 0);

/// Estimation error E[f*_B - lower_bound_B]. Requires problem.batch_min.
double err_f_B(const FiniteSumProblem &problem, Index batch_size, std::uint64_t sample_count = 2000,
               std::uint64_t seed = 0);

}  // namespace adastep
