#include "tsc/agent/sum_tree.hpp"

#include <stdexcept>
#include <string>

namespace tsc::agent {

SumTree::SumTree(std::size_t capacity) : capacity_(capacity), leaf_base_(1)
{
    if (capacity == 0) {
        throw std::invalid_argument("SumTree: capacity must be positive");
    }
    while (leaf_base_ < capacity) {
        leaf_base_ <<= 1;
    }
    nodes_.assign(2 * leaf_base_, 0.0);
}

void SumTree::set(std::size_t index, double value)
{
    if (index >= capacity_) {
        throw std::out_of_range("SumTree::set: index " + std::to_string(index) + " out of range");
    }
    if (!(value >= 0.0)) {
        throw std::invalid_argument("SumTree::set: leaf values must be nonnegative");
    }
    std::size_t node = leaf_base_ + index;
    nodes_[node] = value;
    // Recompute from children so partial sums never accumulate drift.
    for (node >>= 1; node >= 1; node >>= 1) {
        nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
    }
}

std::size_t SumTree::find(double mass) const
{
    std::size_t node = 1;
    while (node < leaf_base_) {
        const std::size_t left = 2 * node;
        if (mass < nodes_[left] || nodes_[left + 1] <= 0.0) {
            node = left;
        } else {
            mass -= nodes_[left];
            node = left + 1;
        }
    }
    return node - leaf_base_;
}

}  // namespace tsc::agent
