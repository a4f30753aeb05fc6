#pragma once

namespace nsch {

// Worker count for data-parallel loops. Reads NSCH_THREADS once; defaults to
// all available cores.
int configured_threads();

// Applies configured_threads() to the OpenMP runtime.
void apply_thread_limit();

}  // namespace nsch
