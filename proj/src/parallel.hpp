#pragma once

// Minimal deterministic work-splitting helper: tasks are indexed, workers
// pull the next index atomically, results land in an index-addressed slot, so
// aggregation order never depends on the schedule.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ffec::internal {

inline void parallel_indexed(size_t task_count, int threads,
                             const std::function<void(size_t)>& run_task) {
    if (threads < 1) threads = 1;
    if (threads == 1 || task_count <= 1) {
        for (size_t i = 0; i < task_count; ++i) run_task(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= task_count) break;
            run_task(i);
        }
    };
    std::vector<std::thread> pool;
    int spawn = int(std::min<size_t>(size_t(threads), task_count));
    pool.reserve(size_t(spawn));
    for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace ffec::internal
