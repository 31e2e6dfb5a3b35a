#include "squidharm/parallel.hpp"

#include <atomic>

namespace squidharm {
namespace {
std::atomic<int> requested_threads{0};
}

void set_thread_count(int threads) { requested_threads = threads > 0 ? threads : 0; }

int thread_count() {
  const int t = requested_threads.load();
#ifdef _OPENMP
  return t > 0 ? t : omp_get_max_threads();
#else
  return t > 0 ? t : 1;
#endif
}

}  // namespace squidharm
