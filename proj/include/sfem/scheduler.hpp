#pragma once

// Service execution for a retrieved episode. User steps wait for the matching
// observation, device steps are actuated, time-gap steps wait out the pause.
// Negative feedback stops the service and switches to observing the user's
// replacement routine.

#include "sfem/interpreter.hpp"
#include "sfem/network.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sfem::psm {

enum class StepKind { User, Device, TimeGap };

struct PlanStep {
    std::size_t event = 0;
    StepKind kind = StepKind::User;
    std::string device; // Device steps only
    std::string action;
};

enum class PlanStatus { Waiting, Actuating, Done, Aborted };
enum class AbortReason { None, Timeout, NegativeFeedback };

const char* to_string(PlanStatus s);
const char* to_string(AbortReason r);

struct ServicePlan {
    std::vector<PlanStep> steps;
    std::size_t cursor = 0;
    std::size_t origin_node = 0;
    PlanStatus status = PlanStatus::Waiting;
    AbortReason reason = AbortReason::None;
    /// Event indices observed since the plan started.
    std::vector<std::size_t> observed;
    /// Simulated time at which the step under the cursor became current.
    double step_since = 0.0;
    /// Index of the most recently actuated step.
    std::optional<std::size_t> last_actuated;
    std::optional<double> finished_at;

    bool finished() const { return status == PlanStatus::Done || status == PlanStatus::Aborted; }
    bool is_complete(std::size_t event) const;
};

struct Actuation {
    double time = 0.0;
    std::string device;
    std::string action;
    std::size_t source_node = 0;
    std::size_t event = 0;
};

struct SchedulerParams {
    double wait_timeout = 600.0;
    double feedback_grace = 60.0;
    double gap_wait = 60.0;
};

/// Steps for a retrieved routine. The cursor starts just past the first
/// occurrence of `cue_event`, which counts as observed.
ServicePlan make_plan(const Retrieval& retrieval, std::size_t cue_event, const Network& network,
                      const interp::Catalog& catalog, double now);

/// One transition of a live plan. `incoming` is an event observed at `now`,
/// or nullopt for a clock tick. Returns the actuation emitted by this step.
/// Throws std::logic_error on a finished plan.
std::optional<Actuation> execute_step(ServicePlan& plan, std::optional<std::size_t> incoming, double now,
                                      const SchedulerParams& params);

/// Runs execute_step until the plan blocks or finishes.
std::vector<Actuation> advance(ServicePlan& plan, std::optional<std::size_t> incoming, double now,
                               const SchedulerParams& params);

struct FeedbackOutcome {
    bool routed = false;
    std::optional<FeedbackResult> result;
    bool aborted = false;
    std::optional<std::size_t> negative_node;
    std::string note;
};

class Scheduler {
public:
    explicit Scheduler(SchedulerParams params = {});

    bool active() const { return plan_ && !plan_->finished(); }
    bool observing() const { return observing_; }
    const std::optional<ServicePlan>& plan() const { return plan_; }
    const SchedulerParams& params() const { return params_; }

    std::vector<Actuation> start(ServicePlan plan, double now);
    /// Feeds an observed event to the live plan, or to the replacement
    /// routine in observation mode.
    std::vector<Actuation> on_observation(std::size_t event, double now);
    std::vector<Actuation> on_tick(double now);

    /// Routes feedback to the live plan, or to a plan finished within the
    /// grace window. Negative feedback aborts it and starts observation with
    /// the steps served before the last actuation as the replacement prefix.
    FeedbackOutcome handle_feedback(double xi, double now, Network& network);

    /// Hands over the observed replacement routine and leaves observation
    /// mode.
    std::vector<std::size_t> take_replacement();

private:
    SchedulerParams params_;
    std::optional<ServicePlan> plan_;
    bool observing_ = false;
    std::vector<std::size_t> replacement_;
};

} // namespace sfem::psm
