#include "rgs/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace rgs {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) { g_threads = n < 1 ? 1 : n; }

int num_threads() { return g_threads; }

void init_threads_from_env() {
  const char* s = std::getenv("RGS_NUM_THREADS");
  if (!s) return;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end != s && *end == '\0' && v >= 1 && v <= 1024) set_num_threads(static_cast<int>(v));
}

}  // namespace rgs
