#include "sfem/strength_sim.hpp"

#include <algorithm>
#include <stdexcept>

namespace sfem::sim {

using strength::StrengthEvent;

StrengthTrace simulate_fixed_population(std::size_t n, const strength::StrengthParams& params,
                                        std::size_t iterations) {
    if (n < 1) throw std::invalid_argument("population must be at least 1");
    params.validate();
    StrengthTrace trace;
    double s = params.s_init;
    std::size_t step = 0;
    trace.rows.push_back({step, 0, n, 0, "created", s, s, s});
    trace.post_iteration.push_back(s);

    for (std::size_t it = 1; it <= iterations; ++it) {
        for (std::size_t k = 0; k + 1 < n; ++k) {
            s = strength::update_strength(s, StrengthEvent::Decayed, params, n);
            trace.rows.push_back({++step, it, n, 0, "decayed", s, s, s});
            if (strength::below_threshold(s, params.theta)) {
                trace.deleted_at = it;
                trace.pruned = 1;
                trace.rows.push_back({step, it, n, 0, "pruned", s, s, s});
                return trace;
            }
        }
        s = strength::update_strength(s, StrengthEvent::Reactivated, params, n);
        trace.rows.push_back({++step, it, n, 0, "reactivated", s, s, s});
        trace.post_iteration.push_back(s);
    }
    return trace;
}

StrengthTrace simulate_dynamic_population(const std::vector<std::size_t>& schedule,
                                          const strength::StrengthParams& params,
                                          std::size_t activations) {
    if (schedule.empty()) throw std::invalid_argument("schedule must not be empty");
    if (std::any_of(schedule.begin(), schedule.end(), [](std::size_t n) { return n < 2; })) {
        throw std::invalid_argument("schedule entries must be at least 2");
    }
    params.validate();

    StrengthTrace trace;
    std::vector<double> pop;
    std::size_t cursor = 0;
    const std::size_t slice = std::max<std::size_t>(1, activations / schedule.size());

    for (std::size_t step = 0; step < activations; ++step) {
        const std::size_t phase = std::min(step / slice, schedule.size() - 1);
        const std::size_t n = schedule[phase];
        if (pop.size() != n) {
            pop.resize(n, params.s_init);
            if (cursor >= n) cursor = 0;
        }
        const std::size_t active = cursor;
        cursor = (cursor + 1) % n;

        for (std::size_t k = 0; k < n; ++k) {
            const auto ev = k == active ? StrengthEvent::Reactivated : StrengthEvent::Decayed;
            pop[k] = strength::update_strength(pop[k], ev, params, n);
        }
        const auto [lo, hi] = std::minmax_element(pop.begin(), pop.end());
        trace.rows.push_back({step + 1, step / n, n, active, "reactivated", pop[active], *lo, *hi});

        // Remove anything that fell to the threshold, keeping round-robin order.
        for (std::size_t k = pop.size(); k-- > 0;) {
            if (strength::below_threshold(pop[k], params.theta)) {
                ++trace.pruned;
                trace.rows.push_back({step + 1, step / n, n, k, "pruned", pop[k], *lo, *hi});
                pop[k] = params.s_init; // the slot is refilled by a fresh episode
            }
        }
    }
    if (!pop.empty()) trace.post_iteration.assign(pop.begin(), pop.end());
    return trace;
}

} // namespace sfem::sim
