#include "linefit/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace linefit {

namespace {

int env_thread_cap() {
  const char* raw = std::getenv("LINEFIT_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int n = std::stoi(raw);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

int effective_threads() {
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
  const int cap = env_thread_cap();
  return (cap > 0 && cap < hw) ? cap : hw;
#else
  return 1;
#endif
}

void apply_thread_cap() {
#ifdef _OPENMP
  omp_set_num_threads(effective_threads());
#endif
}

}  // namespace linefit
