#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace kgstroll {

struct CacheStats {
    uint64_t hits = 0;
    uint64_t misses = 0;
    size_t entries = 0;
    size_t capacity = 0;
};

// Least-recently-used cache, safe for many readers and writers. Lookups and
// inserts are atomic per key; two workers missing the same key concurrently
// may each fetch once, which the connector contract allows.
template <typename Value>
class LruCache {
public:
    explicit LruCache(size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

    std::optional<Value> get(const std::string& key) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = index_.find(key);
        if (it == index_.end()) {
            misses_.fetch_add(1, std::memory_order_relaxed);
            return std::nullopt;
        }
        order_.splice(order_.begin(), order_, it->second);
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second->second;
    }

    void put(const std::string& key, Value value) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = index_.find(key);
        if (it != index_.end()) {
            it->second->second = std::move(value);
            order_.splice(order_.begin(), order_, it->second);
            return;
        }
        order_.emplace_front(key, std::move(value));
        index_[key] = order_.begin();
        if (index_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
    }

    CacheStats stats() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return {hits_.load(), misses_.load(), index_.size(), capacity_};
    }

private:
    size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::pair<std::string, Value>> order_;  // front = most recent
    std::unordered_map<std::string, typename std::list<std::pair<std::string, Value>>::iterator>
        index_;
    std::atomic<uint64_t> hits_{0};
    std::atomic<uint64_t> misses_{0};
};

}  // namespace kgstroll
