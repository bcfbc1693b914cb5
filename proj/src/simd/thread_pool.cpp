#include "afc/simd/thread_pool.hpp"

namespace afc::simd {

ThreadPool& ThreadPool::instance() {
    static ThreadPool pool;
    return pool;
}

ThreadPool::~ThreadPool() { stop_workers(); }

void ThreadPool::resize(int n_threads) {
    if (n_threads < 1) n_threads = 1;
    if (n_threads == n_threads_) return;
    stop_workers();
    {
        std::lock_guard lk(mutex_);
        n_threads_ = n_threads;
        stop_ = false;
    }
    for (int i = 0; i < n_threads_ - 1; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

void ThreadPool::stop_workers() {
    {
        std::lock_guard lk(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
    workers_.clear();
}

void ThreadPool::work_on(const std::shared_ptr<RunState>& state) {
    std::size_t t;
    while ((t = state->next.fetch_add(1, std::memory_order_relaxed)) <
           state->n_tasks) {
        (*state->fn)(t);
        if (state->completed.fetch_add(1, std::memory_order_acq_rel) + 1 ==
            state->n_tasks) {
            // hold the mutex so the notify cannot slip between the waiter's
            // predicate check and its block
            std::lock_guard lk(mutex_);
            done_cv_.notify_all();
        }
    }
}

void ThreadPool::run(std::size_t n_tasks,
                     const std::function<void(std::size_t)>& fn) {
    if (n_tasks == 0) return;
    if (n_threads_ <= 1 || n_tasks == 1 || workers_.empty()) {
        for (std::size_t t = 0; t < n_tasks; ++t) fn(t);
        return;
    }
    auto state = std::make_shared<RunState>();
    state->fn = &fn;
    state->n_tasks = n_tasks;
    {
        std::lock_guard lk(mutex_);
        current_ = state;
        ++generation_;
    }
    cv_.notify_all();

    work_on(state);

    {
        std::unique_lock lk(mutex_);
        done_cv_.wait(lk, [&] {
            return state->completed.load(std::memory_order_acquire) == n_tasks;
        });
        if (current_ == state) current_.reset();
    }
}

void ThreadPool::worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
        std::shared_ptr<RunState> state;
        {
            std::unique_lock lk(mutex_);
            cv_.wait(lk, [&] {
                return stop_ || (current_ && generation_ != seen);
            });
            if (stop_) return;
            seen = generation_;
            state = current_;
        }
        work_on(state);
    }
}

}  // namespace afc::simd
