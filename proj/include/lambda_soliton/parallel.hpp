#ifndef LAMBDA_SOLITON_PARALLEL_HPP
#define LAMBDA_SOLITON_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace lambda_soliton {

/// Worker count: hardware concurrency capped by LAMBDA_SOLITON_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) over contiguous chunks. Results must be written
/// to disjoint slots; the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace lambda_soliton

#endif
