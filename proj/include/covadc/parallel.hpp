#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace covadc {

// Runs fn(trial) for trial = 0..trials-1 on a small worker pool. Workers
// pull indices from a shared counter; callers store per-trial outputs by
// index and reduce afterwards, so results do not depend on scheduling.
template <typename Fn>
void run_trials(int trials, int threads, Fn&& fn)
{
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, trials);

    if (threads == 1) {
        for (int t = 0; t < trials; ++t) fn(t);
        return;
    }

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= trials) return;
                try {
                    fn(t);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace covadc
