#pragma once

#include <cstddef>
#include <deque>

namespace tsc::sim {

// Saturation-headway discharge: min(queue, floor(green / headway)).
std::size_t discharge_green(std::size_t queue_length, double green_s, double headway_s);

// Mean time since arrival over queued vehicles; 0 for an empty queue.
double avg_waiting(const std::deque<double>& queue, double now);

}  // namespace tsc::sim
