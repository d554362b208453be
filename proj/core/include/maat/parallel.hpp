#pragma once

#include <cstddef>
#include <functional>

namespace maat {

/// Caps the worker count used by parallel_for. Values <= 0 reset to the
/// hardware default. Worker count must never affect results, only wall time.
void set_max_jobs(int jobs);
int max_jobs();

/// Runs fn(i) for every i in [0, n). Work items must write only to
/// index-addressed slots; the first exception thrown is rethrown after all
/// workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace maat
