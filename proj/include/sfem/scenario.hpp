#pragma once

// Scenario files and their replay: records flow through the interpreter into
// the network, idle user actions cue retrieval, retrieved routines run on the
// scheduler, and long pauses consolidate the working buffer into episodes.

#include "sfem/feedback_sim.hpp"
#include "sfem/interpreter.hpp"
#include "sfem/network.hpp"
#include "sfem/scheduler.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfem::scenario {

/// Parse or validation failure; the message names the offending field.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExpectedActuation {
    std::string device;
    std::string action;
};

struct Scenario {
    std::string name;
    interp::Catalog catalog;
    NetworkParams params;
    psm::SchedulerParams scheduler;
    /// A pause longer than this closes the current observation window.
    double consolidate_gap = 600.0;
    double noise_stddev = 0.0;
    std::vector<interp::EventRecord> timeline;
    std::optional<std::vector<ExpectedActuation>> expected_actuations;
};

Scenario parse_scenario(const nlohmann::json& doc, const std::string& name = "scenario");
/// Reads a file; JSON syntax errors report line and column.
Scenario load_scenario(const std::string& path);

/// "+", "strong" -> 2; "ok", "weak" -> 1; "-", "negative" -> -1; or a number.
std::optional<double> parse_feedback_token(const std::string& text);

struct RunOptions {
    sim::Arm arm = sim::Arm::Sfem;
    bool interactive = false;
    std::istream* input = nullptr; // interactive answers
    std::ostream* echo = nullptr;  // prompts and live transcript
    std::uint64_t seed = 7;
};

struct TraceRow {
    double time = 0.0;
    std::string kind;
    std::string name;
    std::optional<std::size_t> event;
    std::optional<std::size_t> winner;
    double activation = 0.0;
    std::string strengths;
    std::string vigilances;
    std::string actuation;
    std::string note;
};

struct RunResult {
    std::vector<TraceRow> rows;
    std::vector<psm::Actuation> actuations;

    void write_csv(std::ostream& out) const;
};

struct AssertionReport {
    bool passed = true;
    std::vector<std::string> mismatches;
};

class Runner {
public:
    Runner(const Scenario& scenario, RunOptions options);

    void step(const interp::EventRecord& record);
    /// Consolidates whatever is still pending.
    void finish();

    Network& network() { return net_; }
    const Network& network() const { return net_; }
    /// Swaps in a restored network, e.g. from a snapshot.
    void replace_network(Network net) { net_ = std::move(net); }
    const RunResult& result() const { return result_; }

private:
    void consolidate(double now);
    void emit(std::vector<psm::Actuation> acts);
    void feedback(double xi, double now, const std::string& origin);
    void add_row(TraceRow row);

    const Scenario& scenario_;
    RunOptions options_;
    interp::Interpreter interp_;
    Network net_;
    psm::Scheduler scheduler_;
    std::optional<double> last_time_;
    RunResult result_;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

AssertionReport check_expected(const Scenario& scenario, const RunResult& result);

} // namespace sfem::scenario
