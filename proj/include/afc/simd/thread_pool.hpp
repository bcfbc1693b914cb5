#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace afc::simd {

// Minimal work-sharing pool for the blocked kernels. Every run owns a shared
// state object with its own task counter, so late-waking workers from an
// earlier run can never claim tasks of the current one. Determinism is the
// caller's job: results must be stored per task index so the combination
// order never depends on which thread ran which task.
class ThreadPool {
public:
    static ThreadPool& instance();
    ~ThreadPool();

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    void resize(int n_threads);
    int size() const { return n_threads_; }

    void run(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

private:
    struct RunState {
        const std::function<void(std::size_t)>* fn = nullptr;
        std::size_t n_tasks = 0;
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> completed{0};
    };

    ThreadPool() = default;
    void worker_loop();
    void stop_workers();
    void work_on(const std::shared_ptr<RunState>& state);

    std::vector<std::thread> workers_;
    int n_threads_ = 1;

    std::mutex mutex_;
    std::condition_variable cv_;
    std::condition_variable done_cv_;
    bool stop_ = false;
    std::uint64_t generation_ = 0;
    std::shared_ptr<RunState> current_;
};

}  // namespace afc::simd
