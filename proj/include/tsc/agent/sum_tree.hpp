#pragma once

#include <cstddef>
#include <vector>

namespace tsc::agent {

// Binary tree of partial sums over a fixed number of nonnegative leaves.
class SumTree {
public:
    explicit SumTree(std::size_t capacity);

    void set(std::size_t index, double value);
    double get(std::size_t index) const { return nodes_[leaf_base_ + index]; }
    double total() const { return nodes_[1]; }
    std::size_t capacity() const { return capacity_; }

    // Smallest leaf whose inclusive prefix sum exceeds `mass`; never returns a
    // zero-valued leaf while total() > 0.
    std::size_t find(double mass) const;

    // Raw node storage (1-based heap layout), for invariant checks.
    const std::vector<double>& nodes() const { return nodes_; }
    std::size_t leaf_base() const { return leaf_base_; }

private:
    std::size_t capacity_;
    std::size_t leaf_base_;
    std::vector<double> nodes_;
};

}  // namespace tsc::agent
