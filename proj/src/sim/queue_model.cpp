#include "tsc/sim/queue_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsc::sim {

std::size_t discharge_green(std::size_t queue_length, double green_s, double headway_s)
{
    if (!(headway_s > 0.0)) {
        throw std::invalid_argument("discharge_green: headway must be positive");
    }
    if (green_s < 0.0) {
        throw std::invalid_argument("discharge_green: green time must be nonnegative");
    }
    const auto capacity = static_cast<std::size_t>(std::floor(green_s / headway_s));
    return std::min(queue_length, capacity);
}

double avg_waiting(const std::deque<double>& queue, double now)
{
    if (queue.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double t : queue) {
        sum += now - t;
    }
    return sum / static_cast<double>(queue.size());
}

}  // namespace tsc::sim
