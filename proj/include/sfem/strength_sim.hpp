#pragma once

// Round-robin strength simulations: one tracked episode under a fixed
// population, and a whole population whose size follows a schedule.

#include "sfem/strength.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sfem::sim {

struct StrengthRow {
    std::size_t step = 0;      // activation counter
    std::size_t iteration = 0; // round-robin round
    std::size_t n = 0;         // live population
    std::size_t node = 0;
    std::string event;         // "created" | "decayed" | "reactivated" | "pruned"
    double strength = 0.0;
    double band_min = 0.0;     // population minimum after the step
    double band_max = 0.0;     // population maximum after the step
};

struct StrengthTrace {
    std::vector<StrengthRow> rows;
    /// Fixed population: tracked strength after each round's reinforcement,
    /// entry 0 being s_init. Dynamic population: final strengths.
    std::vector<double> post_iteration;
    std::optional<std::size_t> deleted_at; // round in which the tracked node fell to theta
    std::size_t pruned = 0;
};

/// Each round decays the tracked node n - 1 times, then reinforces it once.
StrengthTrace simulate_fixed_population(std::size_t n, const strength::StrengthParams& params,
                                        std::size_t iterations);

/// Default population schedule over four equal quarters.
inline const std::vector<std::size_t> kDefaultSchedule{10, 50, 20, 100};

/// A population activated in round-robin order: the active node is
/// reinforced, every other node decays with the live population size. The
/// population follows `schedule` over equal slices of `activations`; new
/// nodes start at s_init and shrinking retires the newest nodes.
StrengthTrace simulate_dynamic_population(const std::vector<std::size_t>& schedule,
                                          const strength::StrengthParams& params,
                                          std::size_t activations);

} // namespace sfem::sim
