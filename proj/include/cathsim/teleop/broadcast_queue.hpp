#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <vector>

namespace cathsim::teleop {

// Single-writer, many-reader fan-out. publish() stamps a gap-free id
// (starting at 1); readers poll with the last id they saw and never block
// the writer. Only the most recent `capacity` events are retained.
template <typename T>
class BroadcastQueue
{
public:
    explicit BroadcastQueue(std::size_t capacity = 65536) : capacity_(capacity) {}

    // `stamp(item, id)` lets the caller write the id into the item.
    template <typename Stamp>
    std::uint64_t publish(T item, Stamp &&stamp)
    {
        std::lock_guard lock(mu_);
        const std::uint64_t id = ++last_id_;
        stamp(item, id);
        items_.push_back(std::move(item));
        if (items_.size() > capacity_) {
            items_.pop_front();
        }
        cv_.notify_all();
        return id;
    }

    // Events with id > after_id, waiting up to `timeout` if none is ready.
    std::vector<T> read_after(std::uint64_t after_id, std::chrono::milliseconds timeout = std::chrono::milliseconds(0))
    {
        std::unique_lock lock(mu_);
        cv_.wait_for(lock, timeout, [&] { return last_id_ > after_id || closed_; });
        std::vector<T> out;
        const std::uint64_t first_id = last_id_ - items_.size() + 1;
        for (std::uint64_t id = std::max(after_id + 1, first_id); id <= last_id_; ++id) {
            out.push_back(items_[id - first_id]);
        }
        return out;
    }

    std::uint64_t last_id() const
    {
        std::lock_guard lock(mu_);
        return last_id_;
    }

    bool closed() const
    {
        std::lock_guard lock(mu_);
        return closed_;
    }

    void close()
    {
        std::lock_guard lock(mu_);
        closed_ = true;
        cv_.notify_all();
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<T> items_;
    std::size_t capacity_;
    std::uint64_t last_id_ = 0;
    bool closed_ = false;
};

} // namespace cathsim::teleop
