#include "sfem/scheduler.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace sfem::psm {

namespace {

std::size_t strongest_event(const Network& network, std::size_t event) {
    const auto& channel = network.event_layer().nodes().at(event).weights[3];
    const std::size_t half = network.dims().dev_event;
    std::size_t best = 0;
    for (std::size_t i = 1; i < half; ++i) {
        if (channel[i] > channel[best]) best = i;
    }
    return best;
}

// Context node whose user block is the time-gap one-hot and nothing else.
bool is_gap_node(const Network& network, std::size_t event, std::size_t gap_index) {
    const auto& user = network.event_layer().nodes().at(event).weights[0];
    const std::size_t u = network.dims().user;
    if (gap_index >= u || user[gap_index] < 0.5) return false;
    for (std::size_t i = 0; i < u; ++i) {
        if (i != gap_index && user[i] > 0.0) return false;
    }
    return true;
}

void finish(ServicePlan& plan, PlanStatus status, AbortReason reason, double now) {
    plan.status = status;
    plan.reason = reason;
    plan.finished_at = now;
}

} // namespace

const char* to_string(PlanStatus s) {
    switch (s) {
    case PlanStatus::Waiting: return "waiting";
    case PlanStatus::Actuating: return "actuating";
    case PlanStatus::Done: return "done";
    case PlanStatus::Aborted: return "aborted";
    }
    return "?";
}

const char* to_string(AbortReason r) {
    switch (r) {
    case AbortReason::None: return "none";
    case AbortReason::Timeout: return "timeout";
    case AbortReason::NegativeFeedback: return "negative_feedback";
    }
    return "?";
}

bool ServicePlan::is_complete(std::size_t event) const {
    return std::find(observed.begin(), observed.end(), event) != observed.end();
}

ServicePlan make_plan(const Retrieval& retrieval, std::size_t cue_event, const Network& network,
                      const interp::Catalog& catalog, double now) {
    ServicePlan plan;
    plan.origin_node = retrieval.node_id;
    plan.step_since = now;
    plan.observed.push_back(cue_event);
    for (std::size_t e : retrieval.episode) {
        PlanStep step;
        step.event = e;
        if (network.event_kind(e) == InputKind::Service) {
            step.kind = StepKind::Device;
            std::tie(step.device, step.action) = catalog.event_at(strongest_event(network, e));
        } else if (is_gap_node(network, e, catalog.gap_index())) {
            step.kind = StepKind::TimeGap;
        }
        plan.steps.push_back(std::move(step));
    }
    const auto pos = std::find(retrieval.episode.begin(), retrieval.episode.end(), cue_event);
    plan.cursor = pos == retrieval.episode.end() ? 0
                                                 : static_cast<std::size_t>(pos - retrieval.episode.begin()) + 1;
    return plan;
}

std::optional<Actuation> execute_step(ServicePlan& plan, std::optional<std::size_t> incoming, double now,
                                      const SchedulerParams& params) {
    if (plan.finished()) throw std::logic_error("execute_step on a finished plan");
    if (incoming && !plan.is_complete(*incoming)) plan.observed.push_back(*incoming);

    if (plan.cursor >= plan.steps.size()) {
        finish(plan, PlanStatus::Done, AbortReason::None, now);
        return std::nullopt;
    }
    const PlanStep& step = plan.steps[plan.cursor];
    if (plan.is_complete(step.event) && step.kind != StepKind::TimeGap) {
        ++plan.cursor;
        plan.step_since = now;
        return std::nullopt;
    }
    switch (step.kind) {
    case StepKind::Device: {
        Actuation act{now, step.device, step.action, plan.origin_node, step.event};
        plan.last_actuated = plan.cursor;
        plan.observed.push_back(step.event);
        ++plan.cursor;
        plan.step_since = now;
        plan.status = PlanStatus::Actuating;
        return act;
    }
    case StepKind::TimeGap:
        if (now - plan.step_since >= params.gap_wait) {
            ++plan.cursor;
            plan.step_since = now;
        } else {
            plan.status = PlanStatus::Waiting;
        }
        return std::nullopt;
    case StepKind::User:
        if (now - plan.step_since > params.wait_timeout) {
            finish(plan, PlanStatus::Aborted, AbortReason::Timeout, now);
        } else {
            plan.status = PlanStatus::Waiting;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Actuation> advance(ServicePlan& plan, std::optional<std::size_t> incoming, double now,
                               const SchedulerParams& params) {
    std::vector<Actuation> out;
    while (!plan.finished()) {
        const std::size_t cursor = plan.cursor;
        if (auto act = execute_step(plan, incoming, now, params)) out.push_back(std::move(*act));
        incoming.reset();
        if (plan.cursor == cursor && !plan.finished()) break;
    }
    return out;
}

Scheduler::Scheduler(SchedulerParams params) : params_(params) {}

std::vector<Actuation> Scheduler::start(ServicePlan plan, double now) {
    observing_ = false;
    replacement_.clear();
    plan_ = std::move(plan);
    return advance(*plan_, std::nullopt, now, params_);
}

std::vector<Actuation> Scheduler::on_observation(std::size_t event, double now) {
    if (active()) return advance(*plan_, event, now, params_);
    if (observing_) replacement_.push_back(event);
    return {};
}

std::vector<Actuation> Scheduler::on_tick(double now) {
    if (!active()) return {};
    return advance(*plan_, std::nullopt, now, params_);
}

FeedbackOutcome Scheduler::handle_feedback(double xi, double now, Network& network) {
    FeedbackOutcome out;
    if (!plan_ || (plan_->finished() && !(plan_->finished_at && now - *plan_->finished_at <= params_.feedback_grace)) ||
        plan_->reason != AbortReason::None) {
        out.note = "feedback ignored: no service in progress";
        return out;
    }
    ServicePlan& plan = *plan_;
    if (!network.find(plan.origin_node)) {
        out.note = "feedback ignored: served episode no longer stored";
        return out;
    }
    out.routed = true;
    out.result = network.apply_feedback(plan.origin_node, xi);
    out.negative_node = out.result->negative_node;
    if (out.result->kind == feedback::FeedbackKind::Negative) {
        const std::size_t served = plan.last_actuated.value_or(plan.cursor);
        replacement_.clear();
        for (std::size_t i = 0; i < served && i < plan.steps.size(); ++i) {
            replacement_.push_back(plan.steps[i].event);
        }
        finish(plan, PlanStatus::Aborted, AbortReason::NegativeFeedback, now);
        observing_ = true;
        out.aborted = true;
    }
    return out;
}

std::vector<std::size_t> Scheduler::take_replacement() {
    observing_ = false;
    return std::exchange(replacement_, {});
}

} // namespace sfem::psm
