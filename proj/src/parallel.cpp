#include "magblock/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace magblock {

int resolve_workers(int requested) {
  int available = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
#ifdef _OPENMP
  available = std::max(available, omp_get_num_procs());
#endif
  int workers = requested > 0 ? requested : available;
  if (const char* cap = std::getenv(std::string(kWorkerCapEnv).c_str())) {
    try {
      const int limit = std::stoi(cap);
      if (limit > 0) workers = std::min(workers, limit);
    } catch (const std::exception&) {
      // malformed cap: ignore
    }
  }
  return std::max(1, workers);
}

}  // namespace magblock
