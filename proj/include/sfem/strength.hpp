#pragma once

// Memory-strength lifecycle of episode nodes.
//
// Under regular round-robin activation every episode is decayed (n - 1) times
// and reinforced once per iteration, giving the affine recurrence
//   s(T+1) = r + Delta * s(T),   Delta = (1 - r)(1 - delta)^(n - 1)
// whose fixed point r / (1 - Delta) is the terminal value. With a fixed decay
// that value drifts towards r as n grows, so regularly used memories end up
// below the deletion threshold. The adaptive decay delta_init / (n - 1),
// delta_init = ln(s_init (1 - r) / (s_init - r)), keeps s near s_init instead.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace sfem::strength {

enum class DecayMode { Fixed, Adaptive };

enum class StrengthEvent { Created, Reactivated, Decayed };

struct StrengthParams {
    double s_init = 0.8;
    double r = 0.1;
    double theta = 0.1;
    DecayMode mode = DecayMode::Adaptive;
    double delta = 0.01; // used in Fixed mode only

    /// Throws std::invalid_argument when out of domain (Adaptive requires
    /// s_init > r).
    void validate() const;
};

/// Raised where the recurrence has no fixed point (r = 0 and delta = 0).
class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// ln(s_init (1 - r) / (s_init - r)). Throws std::domain_error if s_init <= r.
double adaptive_delta_init(double s_init, double r);

/// Decay applied per step with `n` live episodes. Adaptive mode uses
/// delta_init / (n - 1), and delta_init itself when n <= 1.
double effective_decay(const StrengthParams& params, std::size_t n);

double update_strength(double s, StrengthEvent event, const StrengthParams& params, std::size_t n);

/// r / (1 - (1 - r)(1 - delta)^(n - 1)).
double terminal_value(std::size_t n, double r, double delta);

/// Strength after T iterations at fixed n, starting from s_init at T = 1.
double closed_form_strength(std::size_t T, std::size_t n, double s_init, double r, double delta);

/// Absolute slack on the inclusive deletion test. A floor value
/// theta / (1 - delta) decayed once by the same delta lands on theta up to
/// rounding, which must still count as deleted.
inline constexpr double kPruneTolerance = 1e-12;

inline bool below_threshold(double s, double theta) { return s <= theta + kPruneTolerance; }

/// Removes and reports every entry with s <= theta.
std::vector<std::size_t> prune(std::map<std::size_t, double>& strengths, double theta);

} // namespace sfem::strength
