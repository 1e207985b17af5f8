#include "sfem/strength.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sfem::strength {

void StrengthParams::validate() const {
    if (!(s_init > 0.0 && s_init <= 1.0)) throw std::invalid_argument("s_init must be in (0,1]");
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("r must be in [0,1)");
    if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("theta must be in [0,1)");
    if (mode == DecayMode::Fixed) {
        if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in [0,1]");
    } else if (!(s_init > r)) {
        throw std::invalid_argument("adaptive decay requires s_init > r");
    }
}

double adaptive_delta_init(double s_init, double r) {
    if (!(s_init > r)) {
        throw std::domain_error("adaptive_delta_init: s_init (" + std::to_string(s_init) +
                                ") must exceed r (" + std::to_string(r) + ")");
    }
    return std::log(s_init * (1.0 - r) / (s_init - r));
}

double effective_decay(const StrengthParams& params, std::size_t n) {
    if (params.mode == DecayMode::Fixed) return params.delta;
    const double init = adaptive_delta_init(params.s_init, params.r);
    return n > 1 ? init / static_cast<double>(n - 1) : init;
}

double update_strength(double s, StrengthEvent event, const StrengthParams& params, std::size_t n) {
    double next = s;
    switch (event) {
    case StrengthEvent::Created:
        next = params.s_init;
        break;
    case StrengthEvent::Reactivated:
        next = s + (1.0 - s) * params.r;
        break;
    case StrengthEvent::Decayed:
        next = s * (1.0 - effective_decay(params, n));
        break;
    }
    return std::clamp(next, 0.0, 1.0);
}

double terminal_value(std::size_t n, double r, double delta) {
    const double exponent = n > 0 ? static_cast<double>(n - 1) : 0.0;
    const double big_delta = (1.0 - r) * std::pow(1.0 - delta, exponent);
    if (big_delta >= 1.0) {
        throw DegenerateError("terminal_value: (1 - r)(1 - delta)^(n - 1) = 1 has no fixed point");
    }
    return r / (1.0 - big_delta);
}

double closed_form_strength(std::size_t T, std::size_t n, double s_init, double r, double delta) {
    if (T < 1) throw std::invalid_argument("closed_form_strength: T must be >= 1");
    const double big_delta = (1.0 - r) * std::pow(1.0 - delta, static_cast<double>(n - 1));
    if (big_delta >= 1.0) {
        throw DegenerateError("closed_form_strength: degenerate recurrence (Delta = 1)");
    }
    const double fixed_point = r / (1.0 - big_delta);
    return (s_init - fixed_point) * std::pow(big_delta, static_cast<double>(T - 1)) + fixed_point;
}

std::vector<std::size_t> prune(std::map<std::size_t, double>& strengths, double theta) {
    std::vector<std::size_t> deleted;
    for (auto it = strengths.begin(); it != strengths.end();) {
        if (below_threshold(it->second, theta)) {
            deleted.push_back(it->first);
            it = strengths.erase(it);
        } else {
            ++it;
        }
    }
    return deleted;
}

} // namespace sfem::strength
