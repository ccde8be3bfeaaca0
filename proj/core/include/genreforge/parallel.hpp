#pragma once

#include <cstddef>
#include <functional>

namespace genreforge {

/// Number of workers to use when the caller passes jobs = 0.
std::size_t default_jobs() noexcept;

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index runs
/// exactly once; callers write results into slot i so output order never
/// depends on scheduling. The first exception thrown by any body is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace genreforge
