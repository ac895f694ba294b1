#pragma once

#include "tsc/sim/observation.hpp"

#include <cstddef>

namespace tsc::agent {

struct Transition {
    sim::Observation state;
    std::size_t action = 0;
    double return_n = 0.0;
    sim::Observation next_state;
    bool done = false;
    double gamma_n = 1.0;  // discount applied to the bootstrap term
};

// One environment step as seen by the learner (reward already scaled).
struct StepRecord {
    sim::Observation state;
    std::size_t action = 0;
    double reward = 0.0;
    sim::Observation next_state;
    bool terminal = false;
};

}  // namespace tsc::agent
