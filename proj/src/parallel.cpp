#include "levilab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace levilab {

namespace {
std::atomic<int> override_count{0};
}

int thread_count() {
  if (const int o = override_count.load(); o > 0) return o;
  if (const char* env = std::getenv("LEVI_LAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_thread_count(int n) { override_count.store(n > 0 ? n : 0); }

}  // namespace levilab
