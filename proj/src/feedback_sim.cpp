#include "sfem/feedback_sim.hpp"

#include "sfem/csv.hpp"
#include "sfem/interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sfem::sim {

namespace {

const std::vector<std::string> kLabels{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
const std::vector<std::string> kStream{"a", "b", "c", "d", "a", "b", "c", "d",
                                       "e", "f", "g", "e", "f", "g"};

class Arena {
public:
    explicit Arena(Arm arm)
        : interp_(interp::Catalog(kLabels, {}, {})), net_(make_network(arm, interp_.catalog())) {}

    Network& net() { return net_; }

    std::size_t observe(const std::string& label, double t) {
        const auto e = net_.observe_event(interp_.interpret({t, interp::RecordKind::UserAction, label, {}, {}}).value(), t);
        labels_[e] = label;
        return e;
    }

    std::vector<std::size_t> observe_all(const std::vector<std::string>& routine, double& t) {
        std::vector<std::size_t> out;
        for (const auto& label : routine) out.push_back(observe(label, t++));
        return out;
    }

    std::string spell(const std::vector<std::size_t>& events) const {
        std::string out;
        for (auto e : events) {
            if (!out.empty()) out += ' ';
            const auto it = labels_.find(e);
            out += it == labels_.end() ? "?" : it->second;
        }
        return out;
    }

    std::size_t episode_number(const std::string& routine) {
        const auto it = std::find(known_.begin(), known_.end(), routine);
        if (it != known_.end()) return static_cast<std::size_t>(it - known_.begin()) + 1;
        known_.push_back(routine);
        return known_.size();
    }

    void learn(const std::vector<std::size_t>& events) {
        if (net_.learn_episode(Episode{events}, Polarity::Ordinary)) episode_number(spell(events));
    }

private:
    static Network make_network(Arm arm, const interp::Catalog& catalog) {
        NetworkParams p = arm_params(arm);
        p.gap_user_index = catalog.gap_index();
        return Network(catalog.dims(), p);
    }

    interp::Interpreter interp_;
    Network net_;
    std::map<std::size_t, std::string> labels_;
    std::vector<std::string> known_;
};

void snapshot(const Network& net, CueOutcome& out) {
    for (const auto& node : net.episode_nodes()) {
        if (node.polarity != Polarity::Ordinary) continue;
        out.strengths.emplace_back(node.id, node.strength);
        out.vigilances.emplace_back(node.id, node.vigilance);
    }
}

std::string pairs(const std::vector<std::pair<std::size_t, double>>& values) {
    std::string out;
    for (const auto& [id, v] : values) {
        if (!out.empty()) out += ';';
        out += std::to_string(id) + ':' + csv::number(v);
    }
    return out;
}

} // namespace

const char* to_string(Arm arm) {
    switch (arm) {
    case Arm::Sfem: return "sfem";
    case Arm::FeedbackOnly: return "fb_only";
    case Arm::Vanilla: return "vanilla";
    }
    return "?";
}

Arm arm_from_string(const std::string& text) {
    std::string lower;
    for (char c : text) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (auto a : {Arm::Sfem, Arm::FeedbackOnly, Arm::Vanilla}) {
        if (lower == to_string(a)) return a;
    }
    throw std::invalid_argument("unknown arm '" + text + "'; valid: sfem, fb_only, vanilla");
}

NetworkParams arm_params(Arm arm, NetworkParams base) {
    base.feedback_enabled = arm != Arm::Vanilla;
    base.negative_memory_enabled = arm == Arm::Sfem;
    return base;
}

FeedbackSimResult run_feedback_sim(Arm arm, std::size_t cues_after_change) {
    FeedbackSimResult result;
    result.arm = arm;
    Arena arena(arm);
    Network& net = arena.net();

    double t = 0.0;
    arena.observe_all(kStream, t);
    result.recognised = net.recognize_episodes();
    for (const auto& ep : result.recognised) arena.learn(ep.events);
    net.buffer().clear();

    std::map<std::string, std::vector<std::string>> preferred{{"a", {"a", "b", "c", "d"}},
                                                              {"e", {"e", "f", "g"}}};
    std::size_t position = 1;

    auto cue = [&](const std::string& label) {
        CueOutcome out;
        out.position = position;
        out.cue = label;
        const auto& wanted = preferred.at(label);
        const std::size_t event = arena.observe(label, t++);
        const std::vector<std::size_t> cue_events{event};
        const auto served = net.retrieve_service(cue_events);

        if (served) {
            out.node_id = served->node_id;
            out.routine = arena.spell(served->episode);
            out.episode = arena.episode_number(out.routine);
            out.activation = served->activation;
        }
        std::string wanted_text;
        for (const auto& w : wanted) wanted_text += (wanted_text.empty() ? "" : " ") + w;

        if (served && out.routine == wanted_text) {
            out.outcome = "accepted";
            position += served->episode.size();
            t += static_cast<double>(served->episode.size() - 1);
        } else {
            std::vector<std::size_t> demonstrated{event};
            if (served) {
                out.outcome = "rejected";
                // The user stops the service after its first delivered step.
                position += 2;
                t += 1.0;
                net.apply_feedback(served->node_id, feedback::kNegative);
            } else {
                out.outcome = "none";
                position += 1;
            }
            const std::vector<std::string> rest(wanted.begin() + 1, wanted.end());
            const auto shown = arena.observe_all(rest, t);
            demonstrated.insert(demonstrated.end(), shown.begin(), shown.end());
            position += rest.size();
            arena.learn(demonstrated);
        }
        snapshot(net, out);
        result.cues.push_back(std::move(out));
    };

    cue("a");
    cue("e");
    preferred["e"] = {"e", "h", "i", "j"};
    result.change_index = result.cues.size();
    cue("e");
    for (std::size_t k = 0; k < cues_after_change; ++k) cue("e");
    return result;
}

std::string FeedbackSimResult::transcript() const {
    std::ostringstream out;
    out << "arm " << to_string(arm) << "\n";
    out << "recognised";
    for (const auto& ep : recognised) out << " [" << ep.events.size() << " events]";
    out << "\n";
    for (std::size_t i = 0; i < cues.size(); ++i) {
        const auto& c = cues[i];
        if (i == change_index) out << "-- preference change --\n";
        out << "cue " << c.position << " " << c.cue << " -> ";
        if (c.node_id) {
            out << "episode " << c.episode << " (" << c.routine << ") " << c.outcome;
        } else {
            out << "nothing " << c.outcome;
        }
        out << "\n";
    }
    return out.str();
}

void FeedbackSimResult::write_csv(std::ostream& out) const {
    csv::Writer w(out, {"arm", "position", "cue", "node", "episode", "routine", "activation", "outcome",
                        "strengths", "vigilances"});
    for (const auto& c : cues) {
        w.row({to_string(arm), std::to_string(c.position), c.cue, c.node_id ? std::to_string(*c.node_id) : "",
               std::to_string(c.episode), c.routine, csv::number(c.activation), c.outcome, pairs(c.strengths),
               pairs(c.vigilances)});
    }
}

} // namespace sfem::sim
