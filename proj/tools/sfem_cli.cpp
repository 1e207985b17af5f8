// Command-line front end: strength simulations, the feedback comparison and
// scenario replay.

#include "sfem/csv.hpp"
#include "sfem/feedback_sim.hpp"
#include "sfem/scenario.hpp"
#include "sfem/strength_sim.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

constexpr int kOk = 0;
constexpr int kAssertFailed = 1;
constexpr int kUsage = 2;

std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

// "-" is stdout; an empty path falls back to the generated name.
class Output {
public:
    Output(const std::string& path, const std::string& fallback) {
        name_ = path.empty() ? fallback : path;
        if (name_ != "-") {
            file_ = std::make_unique<std::ofstream>(name_, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot write " + name_);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    const std::string& name() const { return name_; }
    bool to_stdout() const { return !file_; }

private:
    std::string name_;
    std::unique_ptr<std::ofstream> file_;
};

struct StrengthOptions {
    std::size_t n = 10;
    double delta = 0.01;
    bool adaptive = false;
    double r = 0.1;
    double s_init = 0.8;
    double theta = 0.1;
    std::size_t iters = 2000;
    bool dynamic = false;
    std::vector<std::size_t> schedule = sfem::sim::kDefaultSchedule;
    std::size_t activations = 4000;
    std::string out;
};

int cmd_strength(const StrengthOptions& o) {
    sfem::strength::StrengthParams p;
    p.s_init = o.s_init;
    p.r = o.r;
    p.theta = o.theta;
    p.delta = o.delta;
    p.mode = o.adaptive ? sfem::strength::DecayMode::Adaptive : sfem::strength::DecayMode::Fixed;
    p.validate();

    const auto trace = o.dynamic ? sfem::sim::simulate_dynamic_population(o.schedule, p, o.activations)
                                 : sfem::sim::simulate_fixed_population(o.n, p, o.iters);
    Output out(o.out, std::string("strength-") + (o.adaptive ? "adaptive" : "fixed") + "-" + timestamp() + ".csv");
    sfem::csv::Writer w(out.stream(), {"step", "iteration", "n", "node", "event", "strength", "band_min", "band_max"});
    for (const auto& r : trace.rows) {
        w.row({std::to_string(r.step), std::to_string(r.iteration), std::to_string(r.n), std::to_string(r.node),
               r.event, sfem::csv::number(r.strength), sfem::csv::number(r.band_min),
               sfem::csv::number(r.band_max)});
    }
    std::ostream& log = out.to_stdout() ? std::cerr : std::cout;
    if (o.dynamic) {
        log << "dynamic population, " << o.activations << " activations, pruned " << trace.pruned << "\n";
    } else {
        const double delta = sfem::strength::effective_decay(p, o.n);
        log << "n=" << o.n << " decay=" << delta << " final=" << trace.post_iteration.back();
        if (o.n >= 2) log << " terminal=" << sfem::strength::terminal_value(o.n, o.r, delta);
        if (trace.deleted_at) log << " deleted_at_iteration=" << *trace.deleted_at;
        log << "\n";
    }
    if (!out.to_stdout()) log << "trace written to " << out.name() << "\n";
    return kOk;
}

int cmd_feedback_sim(const std::string& arm_text, const std::string& out_path) {
    std::vector<sfem::sim::Arm> arms;
    if (arm_text == "all") {
        arms = {sfem::sim::Arm::Sfem, sfem::sim::Arm::FeedbackOnly, sfem::sim::Arm::Vanilla};
    } else {
        arms = {sfem::sim::arm_from_string(arm_text)};
    }
    Output out(out_path, "feedback-sim-" + arm_text + "-" + timestamp() + ".csv");
    std::ostream& log = out.to_stdout() ? std::cerr : std::cout;
    std::ostringstream rows;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const auto result = sfem::sim::run_feedback_sim(arms[i]);
        log << result.transcript();
        std::ostringstream one;
        result.write_csv(one);
        std::string text = one.str();
        if (i > 0) text = text.substr(text.find("\r\n") + 2); // one header only
        rows << text;
    }
    out.stream() << rows.str();
    if (!out.to_stdout()) log << "trace written to " << out.name() << "\n";
    return kOk;
}

struct RunOptions {
    std::string scenario;
    std::string arm = "sfem";
    bool interactive = false;
    bool assert_mode = false;
    std::string out;
    std::uint64_t seed = 7;
    std::string snapshot_in;
    std::string snapshot_out;
};

int cmd_run(const RunOptions& o) {
    const auto scenario = sfem::scenario::load_scenario(o.scenario);
    sfem::scenario::RunOptions ro;
    ro.arm = sfem::sim::arm_from_string(o.arm);
    ro.interactive = o.interactive;
    ro.seed = o.seed;
    if (o.interactive) {
        ro.input = &std::cin;
        // Keep stdout clean for the trace when it goes there.
        ro.echo = o.out == "-" ? &std::cerr : &std::cout;
    }

    sfem::scenario::Runner runner(scenario, ro);
    if (!o.snapshot_in.empty()) {
        std::ifstream in(o.snapshot_in);
        if (!in) throw std::runtime_error("cannot open snapshot " + o.snapshot_in);
        auto net = sfem::Network::from_json(nlohmann::json::parse(in));
        if (!(net.dims() == runner.network().dims())) {
            throw std::invalid_argument("snapshot dimensions do not match the scenario catalog");
        }
        runner.replace_network(std::move(net));
    }
    for (const auto& rec : scenario.timeline) runner.step(rec);
    runner.finish();
    const auto& result = runner.result();

    Output out(o.out, scenario.name + "-" + sfem::sim::to_string(ro.arm) + "-" + timestamp() + ".csv");
    result.write_csv(out.stream());
    std::ostream& log = out.to_stdout() ? std::cerr : std::cout;
    for (const auto& a : result.actuations) {
        log << "actuation t=" << a.time << " " << a.device << ":" << a.action << " (episode " << a.source_node << ")\n";
    }
    if (!out.to_stdout()) log << "trace written to " << out.name() << "\n";
    if (!o.snapshot_out.empty()) {
        std::ofstream snap(o.snapshot_out);
        snap << runner.network().to_json().dump(2) << "\n";
    }

    if (o.assert_mode) {
        if (!scenario.expected_actuations) {
            std::cerr << "--assert: scenario has no expected actuations\n";
            return kUsage;
        }
        const auto report = sfem::scenario::check_expected(scenario, result);
        for (const auto& m : report.mismatches) log << "MISMATCH " << m << "\n";
        log << (report.passed ? "assert: PASS" : "assert: FAIL") << "\n";
        return report.passed ? kOk : kAssertFailed;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Episodic memory with strength and feedback dynamics"};
    app.require_subcommand(1);

    StrengthOptions so;
    auto* strength = app.add_subcommand("strength", "Round-robin memory-strength simulation");
    strength->add_option("--n", so.n, "Live episodes (fixed population)")->check(CLI::PositiveNumber);
    strength->add_option("--delta", so.delta, "Fixed decay factor");
    strength->add_flag("--adaptive", so.adaptive, "Use the adaptive decay factor");
    strength->add_option("--r", so.r, "Reinforcement factor");
    strength->add_option("--s-init", so.s_init, "Initial strength");
    strength->add_option("--theta", so.theta, "Deletion threshold");
    strength->add_option("--iters", so.iters, "Rounds to simulate");
    strength->add_flag("--dynamic", so.dynamic, "Population size follows --schedule");
    strength->add_option("--schedule", so.schedule, "Population sizes over equal slices")->delimiter(',');
    strength->add_option("--activations", so.activations, "Activations in dynamic mode");
    strength->add_option("--out", so.out, "CSV path, '-' for stdout");

    std::string fb_arm = "all", fb_out;
    auto* fbsim = app.add_subcommand("feedback-sim", "Preference-change comparison of the three arms");
    fbsim->add_option("--arm", fb_arm, "sfem | fb_only | vanilla | all");
    fbsim->add_option("--out", fb_out, "CSV path, '-' for stdout");

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Replay a scenario file");
    run->add_option("scenario", ro.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--arm", ro.arm, "sfem | fb_only | vanilla");
    run->add_flag("--interactive", ro.interactive, "Ask for feedback after each actuation");
    run->add_flag("--assert", ro.assert_mode, "Compare actuations with the scenario's expected list");
    run->add_option("--out", ro.out, "CSV path, '-' for stdout");
    run->add_option("--seed", ro.seed, "Seed for environment noise");
    run->add_option("--snapshot-in", ro.snapshot_in, "Start from a saved network");
    run->add_option("--snapshot-out", ro.snapshot_out, "Save the network after the run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*strength) return cmd_strength(so);
        if (*fbsim) return cmd_feedback_sim(fb_arm, fb_out);
        if (*run) return cmd_run(ro);
    } catch (const sfem::scenario::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
