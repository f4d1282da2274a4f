#include "critlat/parallel.hpp"

#include <atomic>

namespace critlat {

namespace {
std::atomic<int> g_cap{0};
}

void set_thread_cap(int n) { g_cap = n; }

int thread_cap() {
    int c = g_cap.load();
    if (c > 0) return c;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

}  // namespace critlat
