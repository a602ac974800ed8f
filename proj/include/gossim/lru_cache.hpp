#pragma once

#include <cstdint>
#include <list>
#include <stdexcept>
#include <unordered_map>

namespace gossim {

// Fixed-capacity recently-seen-message set with strict least-recently-used
// eviction. Lookups refresh recency.
class LruCache {
  public:
    explicit LruCache(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0)
            throw std::invalid_argument("LruCache: capacity must be >= 1");
    }

    // True if id was absent (first copy). The id is inserted or moved to the
    // front either way; the least recently used entry is evicted when the
    // capacity would be exceeded.
    bool insert_or_touch(std::uint64_t id) {
        auto it = index_.find(id);
        if (it != index_.end()) {
            order_.splice(order_.begin(), order_, it->second);
            return false;
        }
        if (index_.size() == capacity_) {
            index_.erase(order_.back());
            order_.pop_back();
        }
        order_.push_front(id);
        index_.emplace(id, order_.begin());
        return true;
    }

    bool contains(std::uint64_t id) const { return index_.contains(id); }

    std::size_t size() const { return index_.size(); }
    std::size_t capacity() const { return capacity_; }

  private:
    std::size_t capacity_;
    std::list<std::uint64_t> order_; // front = most recently used
    std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> index_;
};

} // namespace gossim
