#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mfstop {

enum class Exec { Serial, Parallel };

// Parallel loop over [0, count). Bodies must write to disjoint locations.
// Exceptions cannot unwind through an OpenMP region, so the first one is
// parked and rethrown once the loop has drained.
template <class F>
void par_for(Exec exec, std::int64_t count, F&& f) {
  if (exec == Exec::Parallel) {
    std::exception_ptr err;
    std::mutex err_mu;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        f(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (std::int64_t i = 0; i < count; ++i) f(i);
  }
}

// Deterministic sum of f(i) over [0, count): fixed-size chunks are summed
// independently and combined in chunk order, so the result does not depend
// on the number of worker threads.
template <class F>
double det_sum(Exec exec, std::int64_t count, F&& f) {
  constexpr std::int64_t kChunk = 1024;
  const std::int64_t nchunks = (count + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks), 0.0);
  par_for(exec, nchunks, [&](std::int64_t c) {
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(count, lo + kChunk);
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Deterministic max, same chunking discipline as det_sum.
template <class F>
double det_max(Exec exec, std::int64_t count, F&& f) {
  constexpr std::int64_t kChunk = 1024;
  const std::int64_t nchunks = (count + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks));
  par_for(exec, nchunks, [&](std::int64_t c) {
    const std::int64_t lo = c * kChunk;
    const std::int64_t hi = std::min(count, lo + kChunk);
    double s = f(lo);
    for (std::int64_t i = lo + 1; i < hi; ++i) s = std::max(s, f(i));
    partial[static_cast<std::size_t>(c)] = s;
  });
  double total = partial.empty() ? 0.0 : partial[0];
  for (double p : partial) total = std::max(total, p);
  return total;
}

}  // namespace mfstop
