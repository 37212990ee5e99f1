#include "chainforge/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace chainforge {

int thread_count() {
  if (const char* env = std::getenv("CHAINFORGE_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // ignored: fall back to the runtime default
    }
  }
  return omp_get_max_threads();
}

void configure_threads() { omp_set_num_threads(thread_count()); }

}  // namespace chainforge
