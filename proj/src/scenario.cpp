#include "sfem/scenario.hpp"

#include "sfem/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace sfem::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ScenarioError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing field '" + key + "'");
    return *it;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number, got " + v.dump());
    return v.get<double>();
}

std::string string_at(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string, got " + v.dump());
    return v.get<std::string>();
}

std::vector<std::string> strings_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) {
            std::string list;
            for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
            fail(path, "unknown field '" + key + "' (allowed: " + list + ")");
        }
    }
}

interp::Catalog parse_catalog(const json& cat, const json* membership) {
    const std::string path = "catalog";
    only_keys(cat, {"user_actions", "env_variables", "devices"}, path);
    auto actions = strings_at(require(cat, "user_actions", path), path + ".user_actions");

    std::vector<interp::EnvVariable> vars;
    if (cat.contains("env_variables")) {
        const auto& list = cat["env_variables"];
        if (!list.is_array()) fail(path + ".env_variables", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + ".env_variables[" + std::to_string(i) + "]";
            only_keys(list[i], {"name", "unit", "range"}, p);
            interp::EnvVariable v;
            v.name = string_at(require(list[i], "name", p), p + ".name");
            if (list[i].contains("unit")) v.unit = string_at(list[i]["unit"], p + ".unit");
            const auto& range = require(list[i], "range", p);
            if (!range.is_array() || range.size() != 2) fail(p + ".range", "expected [min, max]");
            v.min = number_at(range[0], p + ".range[0]");
            v.max = number_at(range[1], p + ".range[1]");

            const std::string mp = "membership." + v.name;
            if (!membership || !membership->contains(v.name)) fail(mp, "no membership levels for '" + v.name + "'");
            const auto& levels = (*membership)[v.name];
            if (!levels.is_array()) fail(mp, "expected an array of levels");
            for (std::size_t k = 0; k < levels.size(); ++k) {
                const std::string lp = mp + "[" + std::to_string(k) + "]";
                only_keys(levels[k], {"level", "left", "peak", "right"}, lp);
                v.levels.push_back({string_at(require(levels[k], "level", lp), lp + ".level"),
                                    number_at(require(levels[k], "left", lp), lp + ".left"),
                                    number_at(require(levels[k], "peak", lp), lp + ".peak"),
                                    number_at(require(levels[k], "right", lp), lp + ".right")});
            }
            vars.push_back(std::move(v));
        }
    }
    if (membership) {
        for (const auto& [key, _] : membership->items()) {
            if (std::none_of(vars.begin(), vars.end(), [&](const auto& v) { return v.name == key; })) {
                fail("membership." + key, "no env variable of that name in the catalog");
            }
        }
    }

    std::vector<interp::Device> devices;
    if (cat.contains("devices")) {
        const auto& list = cat["devices"];
        if (!list.is_array()) fail(path + ".devices", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string p = path + ".devices[" + std::to_string(i) + "]";
            only_keys(list[i], {"name", "states", "events"}, p);
            interp::Device d;
            d.name = string_at(require(list[i], "name", p), p + ".name");
            d.states = strings_at(require(list[i], "states", p), p + ".states");
            const auto& events = require(list[i], "events", p);
            if (!events.is_array()) fail(p + ".events", "expected an array");
            for (std::size_t k = 0; k < events.size(); ++k) {
                const std::string ep = p + ".events[" + std::to_string(k) + "]";
                if (events[k].is_string()) {
                    d.events.push_back({events[k].get<std::string>(), std::nullopt});
                    continue;
                }
                only_keys(events[k], {"name", "to"}, ep);
                interp::DeviceAction a{string_at(require(events[k], "name", ep), ep + ".name"), std::nullopt};
                if (events[k].contains("to")) a.resulting_state = string_at(events[k]["to"], ep + ".to");
                d.events.push_back(std::move(a));
            }
            devices.push_back(std::move(d));
        }
    }
    try {
        return interp::Catalog(std::move(actions), std::move(vars), std::move(devices));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

void apply_params(const json& p, Scenario& s) {
    const std::string path = "params";
    only_keys(p,
              {"event_rho", "event_gamma", "event_alpha", "event_beta", "episode_beta", "rho_init", "rho_negative",
               "activation_floor", "s_init", "r", "theta", "decay", "delta", "input_weight", "buffer_weight", "tau",
               "buffer_capacity", "r_s", "r_rho", "delta_rho", "p", "wait_timeout", "feedback_grace", "gap_wait",
               "consolidate_gap", "noise_stddev", "min_gap_seconds", "regular_gap_tolerance"},
              path);
    auto num = [&](const char* key, double& target) {
        if (p.contains(key)) target = number_at(p[key], path + "." + key);
    };
    auto per_channel = [&](const char* key, art::Vector& target) {
        if (!p.contains(key)) return;
        const auto& v = p[key];
        if (v.is_number()) {
            target.assign(4, v.get<double>());
        } else if (v.is_array() && v.size() == 4) {
            target.clear();
            for (std::size_t i = 0; i < 4; ++i) target.push_back(number_at(v[i], path + "." + key));
        } else {
            fail(path + "." + key, "expected a number or four numbers");
        }
    };
    NetworkParams& np = s.params;
    per_channel("event_rho", np.event_art.rho);
    per_channel("event_gamma", np.event_art.gamma);
    num("event_alpha", np.event_art.alpha);
    num("event_beta", np.event_art.beta);
    num("episode_beta", np.episode_beta);
    num("rho_init", np.rho_init);
    num("rho_negative", np.rho_negative);
    num("activation_floor", np.activation_floor);
    num("s_init", np.strength.s_init);
    num("r", np.strength.r);
    num("theta", np.strength.theta);
    num("delta", np.strength.delta);
    if (p.contains("decay")) {
        const auto mode = string_at(p["decay"], path + ".decay");
        if (mode == "adaptive") np.strength.mode = strength::DecayMode::Adaptive;
        else if (mode == "fixed") np.strength.mode = strength::DecayMode::Fixed;
        else fail(path + ".decay", "expected \"adaptive\" or \"fixed\"");
    }
    double iw = np.codec.input_weight(), bw = np.codec.buffer_weight(), tau = np.codec.tau();
    num("input_weight", iw);
    num("buffer_weight", bw);
    num("tau", tau);
    try {
        np.codec = codec::CodecParams(iw, bw, tau);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    if (p.contains("buffer_capacity")) {
        np.buffer_capacity = static_cast<std::size_t>(number_at(p["buffer_capacity"], path + ".buffer_capacity"));
    }
    num("r_s", np.feedback.r_s);
    num("r_rho", np.feedback.r_rho);
    num("delta_rho", np.feedback.delta_rho);
    if (p.contains("p")) np.feedback.p = static_cast<unsigned>(number_at(p["p"], path + ".p"));
    num("wait_timeout", s.scheduler.wait_timeout);
    num("feedback_grace", s.scheduler.feedback_grace);
    num("gap_wait", s.scheduler.gap_wait);
    num("consolidate_gap", s.consolidate_gap);
    num("noise_stddev", s.noise_stddev);
    num("min_gap_seconds", np.recognition.min_gap_seconds);
    num("regular_gap_tolerance", np.recognition.regular_gap_tolerance);
}

std::vector<interp::EventRecord> parse_timeline(const json& list) {
    if (!list.is_array()) fail("timeline", "expected an array");
    std::vector<interp::EventRecord> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "timeline[" + std::to_string(i) + "]";
        only_keys(list[i], {"t", "kind", "name", "value", "xi"}, p);
        interp::EventRecord r;
        r.time = number_at(require(list[i], "t", p), p + ".t");
        try {
            r.kind = interp::record_kind_from_string(string_at(require(list[i], "kind", p), p + ".kind"));
        } catch (const std::invalid_argument& e) {
            fail(p + ".kind", e.what());
        }
        if (list[i].contains("name")) r.name = string_at(list[i]["name"], p + ".name");
        if (list[i].contains("value")) r.value = number_at(list[i]["value"], p + ".value");
        if (list[i].contains("xi")) r.xi = number_at(list[i]["xi"], p + ".xi");
        if (r.kind == interp::RecordKind::Feedback && !r.xi) fail(p, "feedback record needs 'xi'");
        if (r.kind != interp::RecordKind::Feedback && r.name.empty()) fail(p, "record needs a 'name'");
        if (r.kind == interp::RecordKind::EnvReading && !r.value) fail(p, "env_reading needs a 'value'");
        if (!out.empty() && r.time < out.back().time) fail(p + ".t", "timeline times must be non-decreasing");
        out.push_back(std::move(r));
    }
    return out;
}

std::string snapshot_of(const Network& net, bool vigilance) {
    std::string out;
    for (const auto& node : net.episode_nodes()) {
        if (node.polarity != Polarity::Ordinary) continue;
        if (!out.empty()) out += ';';
        out += std::to_string(node.id) + ':' + csv::number(vigilance ? node.vigilance : node.strength);
    }
    return out;
}

std::string spell(const std::vector<std::size_t>& events) {
    std::string out;
    for (auto e : events) out += (out.empty() ? "" : " ") + std::to_string(e);
    return out;
}

} // namespace

Scenario parse_scenario(const json& doc, const std::string& name) {
    only_keys(doc, {"name", "description", "catalog", "membership", "params", "timeline", "expected"}, "scenario");
    const json* membership = doc.contains("membership") ? &doc["membership"] : nullptr;
    if (membership && !membership->is_object()) fail("membership", "expected an object");
    Scenario s{doc.contains("name") ? string_at(doc["name"], "name") : name,
               parse_catalog(require(doc, "catalog", "scenario"), membership),
               {}, {}, 600.0, 0.0, {}, std::nullopt};
    if (doc.contains("params")) apply_params(doc["params"], s);
    s.params.gap_user_index = s.catalog.gap_index();
    s.params.feedback.r = s.params.strength.r;
    s.params.feedback.s_init = s.params.strength.s_init;
    s.params.feedback.theta = s.params.strength.theta;
    s.params.feedback.rho_init = s.params.rho_init;
    try {
        s.params.validate();
    } catch (const std::invalid_argument& e) {
        fail("params", e.what());
    }
    if (!(s.consolidate_gap > 0.0)) fail("params.consolidate_gap", "must be positive");
    if (!(s.noise_stddev >= 0.0)) fail("params.noise_stddev", "must be >= 0");
    s.timeline = parse_timeline(require(doc, "timeline", "scenario"));
    // Dry run so unknown labels surface at load time with their position.
    interp::Interpreter dry(s.catalog);
    for (std::size_t i = 0; i < s.timeline.size(); ++i) {
        try {
            dry.interpret(s.timeline[i]);
        } catch (const std::invalid_argument& e) {
            fail("timeline[" + std::to_string(i) + "]", e.what());
        }
    }

    if (doc.contains("expected")) {
        const auto& exp = doc["expected"];
        only_keys(exp, {"actuations"}, "expected");
        if (exp.contains("actuations")) {
            const auto& list = exp["actuations"];
            if (!list.is_array()) fail("expected.actuations", "expected an array");
            std::vector<ExpectedActuation> acts;
            for (std::size_t i = 0; i < list.size(); ++i) {
                const std::string p = "expected.actuations[" + std::to_string(i) + "]";
                only_keys(list[i], {"device", "action"}, p);
                ExpectedActuation a{string_at(require(list[i], "device", p), p + ".device"),
                                    string_at(require(list[i], "action", p), p + ".action")};
                try {
                    s.catalog.event_index(a.device, a.action);
                } catch (const std::invalid_argument& e) {
                    fail(p, e.what());
                }
                acts.push_back(std::move(a));
            }
            s.expected_actuations = std::move(acts);
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ScenarioError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
    std::string stem = path;
    if (const auto slash = stem.find_last_of("/\\"); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    try {
        return parse_scenario(doc, stem);
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

std::optional<double> parse_feedback_token(const std::string& raw) {
    std::string text;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) text += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (text == "+" || text == "strong") return feedback::kStrongPositive;
    if (text == "ok" || text == "weak") return feedback::kWeakPositive;
    if (text == "-" || text == "negative") return feedback::kNegative;
    if (text.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

Runner::Runner(const Scenario& scenario, RunOptions options)
    : scenario_(scenario),
      options_(options),
      interp_(scenario.catalog),
      net_(scenario.catalog.dims(), sim::arm_params(options.arm, scenario.params)),
      scheduler_(scenario.scheduler) {
    if (scenario.noise_stddev > 0.0) interp_.enable_noise(scenario.noise_stddev, options.seed);
}

void Runner::add_row(TraceRow row) {
    if (options_.echo) {
        *options_.echo << "[" << row.time << "] " << row.kind << " " << row.name;
        if (!row.actuation.empty()) *options_.echo << " -> " << row.actuation;
        if (!row.note.empty()) *options_.echo << " (" << row.note << ")";
        *options_.echo << "\n";
    }
    row.strengths = snapshot_of(net_, false);
    row.vigilances = snapshot_of(net_, true);
    result_.rows.push_back(std::move(row));
}

void Runner::consolidate(double now) {
    if (scheduler_.observing()) {
        const auto replacement = scheduler_.take_replacement();
        if (replacement.size() >= 2) {
            const auto id = net_.learn_episode(Episode{replacement}, Polarity::Ordinary);
            add_row({now, "consolidate", "replacement", std::nullopt, id, 0.0, {}, {}, {},
                     (id ? "learned " : "refused ") + spell(replacement)});
        }
    }
    for (const auto& ep : net_.recognize_episodes()) {
        const auto id = net_.learn_episode(ep, Polarity::Ordinary);
        add_row({now, "consolidate", "episode", std::nullopt, id, 0.0, {}, {}, {},
                 (id ? "learned " : "refused ") + spell(ep.events)});
    }
    net_.buffer().clear();
}

void Runner::feedback(double xi, double now, const std::string& origin) {
    const auto out = scheduler_.handle_feedback(xi, now, net_);
    std::string note = out.note;
    if (out.routed) {
        note = std::string(out.result->modulated ? "modulated" : "not modulated") +
               (out.aborted ? ", service stopped" : "") +
               (out.negative_node ? ", negative memory " + std::to_string(*out.negative_node) : "");
    }
    add_row({now, "feedback", origin + " xi=" + csv::number(xi), std::nullopt,
             out.routed ? std::optional<std::size_t>(out.result->node_id) : std::nullopt, 0.0, {}, {}, {}, note});
}

void Runner::emit(std::vector<psm::Actuation> acts) {
    for (auto& act : acts) {
        const std::string label = act.device + ":" + act.action;
        interp_.interpret({act.time, interp::RecordKind::DeviceEvent, label, {}, {}});
        const auto e = net_.observe_event(interp_.service_input(act.device, act.action), act.time);
        add_row({act.time, "actuation", label, e, act.source_node, 0.0, {}, {}, label, {}});
        result_.actuations.push_back(act);
        if (options_.interactive && options_.input) {
            std::optional<double> xi;
            std::string line;
            while (true) {
                if (options_.echo) *options_.echo << "feedback for " << label << " [+ / ok / - / number, empty skips]: " << std::flush;
                if (!std::getline(*options_.input, line)) break;
                xi = parse_feedback_token(line);
                if (xi || line.find_first_not_of(" \t\r") == std::string::npos) break;
                if (options_.echo) *options_.echo << "unrecognised answer '" << line << "'\n";
            }
            if (xi) feedback(*xi, act.time, "interactive");
        }
    }
}

void Runner::step(const interp::EventRecord& rec) {
    if (last_time_ && rec.time < *last_time_) {
        throw ScenarioError("record " + rec.describe() + " goes back in time");
    }
    if (last_time_ && rec.time - *last_time_ > scenario_.consolidate_gap) consolidate(rec.time);
    last_time_ = rec.time;
    emit(scheduler_.on_tick(rec.time));

    using interp::RecordKind;
    switch (rec.kind) {
    case RecordKind::Feedback:
        if (options_.interactive) {
            add_row({rec.time, "feedback", "scripted", std::nullopt, std::nullopt, 0.0, {}, {}, {},
                     "skipped in interactive mode"});
        } else {
            feedback(*rec.xi, rec.time, "scripted");
        }
        return;
    case RecordKind::EnvReading:
    case RecordKind::DeviceState:
        interp_.interpret(rec);
        add_row({rec.time, to_string(rec.kind), rec.name, std::nullopt, std::nullopt, 0.0, {}, {}, {}, {}});
        return;
    case RecordKind::UserAction:
    case RecordKind::DeviceEvent:
        break;
    }

    const auto input = interp_.interpret(rec).value();
    const auto e = net_.observe_event(input, rec.time);
    TraceRow row{rec.time, to_string(rec.kind), rec.name, e, std::nullopt, 0.0, {}, {}, {}, {}};
    std::vector<psm::Actuation> acts;
    if (scheduler_.active()) {
        acts = scheduler_.on_observation(e, rec.time);
        row.note = "in service";
    } else if (scheduler_.observing()) {
        scheduler_.on_observation(e, rec.time);
        row.note = "observing replacement";
    } else if (rec.kind == RecordKind::UserAction) {
        const std::vector<std::size_t> cue{e};
        if (const auto got = net_.retrieve_service(cue)) {
            row.winner = got->node_id;
            row.activation = got->activation;
            row.note = "retrieved " + spell(got->episode);
            acts = scheduler_.start(psm::make_plan(*got, e, net_, scenario_.catalog, rec.time), rec.time);
        } else {
            row.note = "no service";
        }
    }
    add_row(std::move(row));
    emit(std::move(acts));
}

void Runner::finish() {
    if (last_time_) consolidate(*last_time_);
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    Runner runner(scenario, options);
    for (const auto& rec : scenario.timeline) runner.step(rec);
    runner.finish();
    return runner.result();
}

void RunResult::write_csv(std::ostream& out) const {
    csv::Writer w(out, {"time", "kind", "name", "event", "winner", "activation", "strengths", "vigilances",
                        "actuation", "note"});
    for (const auto& r : rows) {
        w.row({csv::number(r.time), r.kind, r.name, r.event ? std::to_string(*r.event) : "",
               r.winner ? std::to_string(*r.winner) : "", csv::number(r.activation), r.strengths, r.vigilances,
               r.actuation, r.note});
    }
}

AssertionReport check_expected(const Scenario& scenario, const RunResult& result) {
    AssertionReport report;
    if (!scenario.expected_actuations) return report;
    const auto& want = *scenario.expected_actuations;
    const auto& got = result.actuations;
    for (std::size_t i = 0; i < std::max(want.size(), got.size()); ++i) {
        const std::string w = i < want.size() ? want[i].device + ":" + want[i].action : "(none)";
        const std::string g = i < got.size() ? got[i].device + ":" + got[i].action : "(none)";
        if (w != g) report.mismatches.push_back("actuation " + std::to_string(i + 1) + ": expected " + w + ", got " + g);
    }
    report.passed = report.mismatches.empty();
    return report;
}

} // namespace sfem::scenario
