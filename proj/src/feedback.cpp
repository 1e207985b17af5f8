#include "sfem/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfem::feedback {

namespace {
bool unit(double v) { return v >= 0.0 && v <= 1.0; }
} // namespace

void FeedbackParams::validate() const {
    if (!unit(r) || !unit(r_s) || !unit(delta_s) || !unit(r_rho) || !unit(delta_rho)) {
        throw std::invalid_argument("FeedbackParams: rates must be in [0,1]");
    }
    if (p < 1) throw std::invalid_argument("FeedbackParams: p must be >= 1");
    if (!(rho_init > 0.0 && rho_init <= 1.0)) {
        throw std::invalid_argument("FeedbackParams: rho_init must be in (0,1]");
    }
}

FeedbackKind classify_feedback(double xi, double xi_w) {
    if (xi > xi_w) return FeedbackKind::StrongPositive;
    if (xi < xi_w) return FeedbackKind::Negative;
    return FeedbackKind::WeakPositive;
}

Feedback make_feedback(double xi, double xi_w) { return {xi, classify_feedback(xi, xi_w)}; }

double modulate_strength(double s_old, FeedbackKind kind, const FeedbackParams& params) {
    const double keep = 1.0 - params.delta_s;
    double s = s_old;
    switch (kind) {
    case FeedbackKind::StrongPositive:
        s = std::min(1.0, s_old + 2.0 * (1.0 - s_old) * params.r_s);
        break;
    case FeedbackKind::WeakPositive:
        s = s_old + (1.0 - s_old) * params.r;
        break;
    case FeedbackKind::Negative:
        if (s_old - params.s_init * std::pow(keep, static_cast<double>(params.p)) > 0.0) {
            s = s_old * keep * keep;
        } else {
            s = keep > 0.0 ? params.theta / keep : 0.0;
        }
        break;
    case FeedbackKind::None:
        s = s_old * keep;
        break;
    }
    return std::clamp(s, 0.0, 1.0);
}

double modulate_vigilance(double rho_old, FeedbackKind kind, const FeedbackParams& params) {
    switch (kind) {
    case FeedbackKind::StrongPositive:
        return rho_old * (1.0 - params.delta_rho);
    case FeedbackKind::Negative:
        return std::min(1.0, rho_old + (1.0 - rho_old) * params.r_rho);
    default:
        return rho_old;
    }
}

} // namespace sfem::feedback
