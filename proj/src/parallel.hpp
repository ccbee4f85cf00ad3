#ifndef SIEGLAB_PARALLEL_HPP
#define SIEGLAB_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sieglab {

// Worker cap: LAB_THREADS (when set) bounded by hardware concurrency.
int worker_count();

// Runs f(i) for i in [0, count). Work items write to disjoint slots, so the
// caller's sequential reduction is bit-stable for any thread count.
template <class F>
void parallel_for(size_t count, F&& f) {
    int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto run = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= count) break;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

} // namespace sieglab

#endif
