#include "nsch/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace nsch {

int configured_threads() {
  static const int threads = [] {
    const int all = omp_get_num_procs();
    if (const char* env = std::getenv("NSCH_THREADS")) {
      try {
        const int n = std::stoi(env);
        if (n > 0) return n < all ? n : all;
      } catch (...) {
      }
    }
    return all;
  }();
  return threads;
}

void apply_thread_limit() { omp_set_num_threads(configured_threads()); }

}  // namespace nsch
