#pragma once

#include <cstddef>

namespace sfem::feedback {

enum class FeedbackKind { StrongPositive, WeakPositive, Negative, None };

inline constexpr double kStrongPositive = 2.0;
inline constexpr double kWeakPositive = 1.0;
inline constexpr double kNegative = -1.0;

struct Feedback {
    double value = kWeakPositive;
    FeedbackKind kind = FeedbackKind::WeakPositive;
};

struct FeedbackParams {
    double xi_w = kWeakPositive;
    double r = 0.1;          // plain reinforcement (implicit acceptance)
    double r_s = 0.1;        // reinforcement for strong positive feedback
    double delta_s = 0.01;   // strength decay; the network sets the live decay here
    unsigned p = 2;          // episode parameter
    double r_rho = 0.1;      // vigilance reinforcement
    double delta_rho = 0.05; // vigilance decay
    double rho_init = 0.9;
    double theta = 0.1;
    double s_init = 0.8;

    void validate() const;
};

FeedbackKind classify_feedback(double xi, double xi_w = kWeakPositive);

Feedback make_feedback(double xi, double xi_w = kWeakPositive);

/// Strength after feedback on the served episode.
///   StrongPositive: min(1, s + 2(1 - s) r_s)
///   WeakPositive:   s + (1 - s) r
///   Negative:       s (1 - delta_s)^2 while s > s_init (1 - delta_s)^p,
///                   otherwise the floor theta / (1 - delta_s), which falls
///                   to theta after one more decay
///   None:           s (1 - delta_s)
double modulate_strength(double s_old, FeedbackKind kind, const FeedbackParams& params);

/// Vigilance after feedback: strong positive lowers it, negative raises it,
/// anything else leaves it unchanged.
double modulate_vigilance(double rho_old, FeedbackKind kind, const FeedbackParams& params);

} // namespace sfem::feedback
