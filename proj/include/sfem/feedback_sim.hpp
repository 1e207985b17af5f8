#pragma once

// Three-way comparison of a preference change. Episodes a-b-c-d and e-f-g are
// recognised from a repeated stream; later the user wants e-h-i-j after e.
// Each arm is cued with single events and the served routines are logged.

#include "sfem/network.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace sfem::sim {

enum class Arm { Sfem, FeedbackOnly, Vanilla };

const char* to_string(Arm arm);
/// Accepts sfem, fb_only, vanilla (any case). Throws std::invalid_argument.
Arm arm_from_string(const std::string& text);

/// Switches feedback and negative memory per arm; everything else is kept.
NetworkParams arm_params(Arm arm, NetworkParams base = {});

struct CueOutcome {
    std::size_t position = 0; // 1-based position in the user's event stream
    std::string cue;
    std::optional<std::size_t> node_id;
    std::size_t episode = 0; // 1-based order in which the routine was first learned; 0 = none
    std::string routine;     // space separated labels
    double activation = 0.0;
    std::string outcome;     // accepted | rejected | none
    std::vector<std::pair<std::size_t, double>> strengths;
    std::vector<std::pair<std::size_t, double>> vigilances;
};

struct FeedbackSimResult {
    Arm arm = Arm::Sfem;
    std::vector<Episode> recognised;
    std::vector<CueOutcome> cues;
    /// Index into `cues` of the first cue after the preference change.
    std::size_t change_index = 0;

    std::string transcript() const;
    void write_csv(std::ostream& out) const;
};

FeedbackSimResult run_feedback_sim(Arm arm, std::size_t cues_after_change = 4);

} // namespace sfem::sim
