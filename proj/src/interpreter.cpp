#include "sfem/interpreter.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sfem::interp {

namespace {

constexpr int kCoverageSamples = 1000;

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ", ";
        out += s;
    }
    return out;
}

void check_variable(const EnvVariable& v) {
    if (v.levels.size() < 2) {
        throw std::invalid_argument("env variable '" + v.name + "' needs at least two levels");
    }
    if (!(v.max > v.min)) throw std::invalid_argument("env variable '" + v.name + "' has an empty range");
    for (const auto& m : v.levels) {
        if (!(m.left <= m.peak && m.peak <= m.right)) {
            throw std::invalid_argument("membership '" + m.label + "' of '" + v.name +
                                        "' must satisfy left <= peak <= right");
        }
    }
    for (int i = 0; i <= kCoverageSamples; ++i) {
        const double x = v.min + (v.max - v.min) * i / kCoverageSamples;
        const bool covered = std::any_of(v.levels.begin(), v.levels.end(),
                                         [x](const Membership& m) { return m.degree(x) > 0.0; });
        if (!covered) {
            throw std::invalid_argument("memberships of '" + v.name + "' leave " + std::to_string(x) +
                                        " uncovered");
        }
    }
}

} // namespace

double Membership::degree(double x) const {
    if (x <= peak) {
        if (peak == left) return 1.0;
        return x <= left ? 0.0 : (x - left) / (peak - left);
    }
    if (peak == right) return 1.0;
    return x >= right ? 0.0 : (right - x) / (right - peak);
}

Catalog::Catalog(std::vector<std::string> user_actions, std::vector<EnvVariable> env_variables,
                 std::vector<Device> devices)
    : user_actions_(std::move(user_actions)), env_(std::move(env_variables)), devices_(std::move(devices)) {
    std::set<std::string> seen;
    for (const auto& a : user_actions_) {
        if (a == kTimeGapLabel) throw std::invalid_argument("'time_gap' is reserved");
        if (!seen.insert(a).second) throw std::invalid_argument("duplicate user action '" + a + "'");
    }
    user_actions_.emplace_back(kTimeGapLabel);

    std::set<std::string> vars;
    for (const auto& v : env_) {
        if (!vars.insert(v.name).second) throw std::invalid_argument("duplicate env variable '" + v.name + "'");
        check_variable(v);
    }
    std::set<std::string> names;
    for (const auto& d : devices_) {
        if (!names.insert(d.name).second) throw std::invalid_argument("duplicate device '" + d.name + "'");
        if (d.states.empty()) throw std::invalid_argument("device '" + d.name + "' declares no states");
        std::set<std::string> states(d.states.begin(), d.states.end());
        if (states.size() != d.states.size()) {
            throw std::invalid_argument("device '" + d.name + "' repeats a state");
        }
        std::set<std::string> actions;
        for (const auto& e : d.events) {
            if (!actions.insert(e.name).second) {
                throw std::invalid_argument("device '" + d.name + "' repeats event '" + e.name + "'");
            }
            if (e.resulting_state && !states.count(*e.resulting_state)) {
                throw std::invalid_argument("event '" + d.name + ":" + e.name + "' leads to unknown state '" +
                                            *e.resulting_state + "'");
            }
        }
    }
}

ChannelDims Catalog::dims() const {
    ChannelDims d;
    d.user = user_actions_.size();
    for (const auto& v : env_) d.env += v.levels.size();
    for (const auto& dev : devices_) {
        d.dev_state += dev.states.size();
        d.dev_event += dev.events.size();
    }
    return d;
}

std::size_t Catalog::action_index(const std::string& label) const {
    const auto it = std::find(user_actions_.begin(), user_actions_.end(), label);
    if (it == user_actions_.end()) {
        throw std::invalid_argument("unknown user action '" + label + "'; valid: " + join(user_actions_));
    }
    return static_cast<std::size_t>(it - user_actions_.begin());
}

const Device& Catalog::device(const std::string& name) const {
    const auto it = std::find_if(devices_.begin(), devices_.end(), [&](const Device& d) { return d.name == name; });
    if (it == devices_.end()) {
        std::vector<std::string> known;
        for (const auto& d : devices_) known.push_back(d.name);
        throw std::invalid_argument("unknown device '" + name + "'; valid: " + join(known));
    }
    return *it;
}

std::size_t Catalog::event_index(const std::string& device, const std::string& action) const {
    std::size_t offset = 0;
    for (const auto& d : devices_) {
        if (d.name == device) {
            for (std::size_t i = 0; i < d.events.size(); ++i) {
                if (d.events[i].name == action) return offset + i;
            }
            std::vector<std::string> known;
            for (const auto& e : d.events) known.push_back(e.name);
            throw std::invalid_argument("unknown event '" + action + "' for device '" + device +
                                        "'; valid: " + join(known));
        }
        offset += d.events.size();
    }
    this->device(device); // throws with the list of devices
    return 0;
}

std::pair<std::string, std::string> Catalog::event_at(std::size_t index) const {
    for (const auto& d : devices_) {
        if (index < d.events.size()) return {d.name, d.events[index].name};
        index -= d.events.size();
    }
    throw std::out_of_range("device-event index outside the catalog");
}

art::Vector encode_user_action(const std::string& label, const Catalog& catalog) {
    art::Vector v(catalog.user_actions().size(), 0.0);
    v[catalog.action_index(label)] = 1.0;
    return v;
}

art::Vector fuzzify_environment(const std::map<std::string, double>& readings, const Catalog& catalog,
                                std::vector<std::string>* warnings) {
    for (const auto& [name, value] : readings) {
        const auto& vars = catalog.env_variables();
        if (std::none_of(vars.begin(), vars.end(), [&](const EnvVariable& v) { return v.name == name; })) {
            throw std::invalid_argument("unknown env variable '" + name + "'");
        }
    }
    art::Vector out;
    for (const auto& var : catalog.env_variables()) {
        const auto it = readings.find(var.name);
        if (it == readings.end()) {
            out.insert(out.end(), var.levels.size(), 0.0);
            continue;
        }
        double x = it->second;
        if (x < var.min || x > var.max) {
            const double clamped = std::clamp(x, var.min, var.max);
            if (warnings) {
                std::ostringstream msg;
                msg << var.name << " reading " << x << " clamped to " << clamped;
                warnings->push_back(msg.str());
            }
            x = clamped;
        }
        for (const auto& level : var.levels) out.push_back(level.degree(x));
    }
    return out;
}

art::Vector encode_device_state(const std::map<std::string, std::string>& states, const Catalog& catalog) {
    for (const auto& [name, state] : states) {
        const auto& dev = catalog.device(name);
        if (std::find(dev.states.begin(), dev.states.end(), state) == dev.states.end()) {
            throw std::invalid_argument("unknown state '" + state + "' for device '" + name +
                                        "'; valid: " + join(dev.states));
        }
    }
    art::Vector out;
    for (const auto& dev : catalog.devices()) {
        const auto it = states.find(dev.name);
        for (const auto& s : dev.states) out.push_back(it != states.end() && it->second == s ? 1.0 : 0.0);
    }
    return out;
}

art::Vector encode_device_event(const std::string& device, const std::string& action, const Catalog& catalog) {
    art::Vector v(catalog.dims().dev_event, 0.0);
    v[catalog.event_index(device, action)] = 1.0;
    return v;
}

const char* to_string(RecordKind kind) {
    switch (kind) {
    case RecordKind::UserAction: return "user_action";
    case RecordKind::EnvReading: return "env_reading";
    case RecordKind::DeviceState: return "device_state";
    case RecordKind::DeviceEvent: return "device_event";
    case RecordKind::Feedback: return "feedback";
    }
    return "?";
}

RecordKind record_kind_from_string(const std::string& text) {
    for (auto k : {RecordKind::UserAction, RecordKind::EnvReading, RecordKind::DeviceState,
                   RecordKind::DeviceEvent, RecordKind::Feedback}) {
        if (text == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown record kind '" + text +
                                "'; valid: user_action, env_reading, device_state, device_event, feedback");
}

std::string EventRecord::describe() const {
    std::ostringstream out;
    out << "{t=" << time << ", kind=" << to_string(kind) << ", name=\"" << name << "\"";
    if (value) out << ", value=" << *value;
    if (xi) out << ", xi=" << *xi;
    out << "}";
    return out.str();
}

std::pair<std::string, std::string> split_device_label(const std::string& label) {
    const auto colon = label.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == label.size()) {
        throw std::invalid_argument("expected 'device:item', got '" + label + "'");
    }
    return {label.substr(0, colon), label.substr(colon + 1)};
}

Interpreter::Interpreter(Catalog catalog) : catalog_(std::move(catalog)) {}

void Interpreter::enable_noise(double stddev, std::uint64_t seed) {
    if (!(stddev >= 0.0)) throw std::invalid_argument("noise stddev must be >= 0");
    rng_.seed(seed);
    noise_.emplace(0.0, stddev);
}

NetworkInput Interpreter::context_input(std::optional<std::size_t> action) const {
    NetworkInput in = NetworkInput::zeros(catalog_.dims(), InputKind::Context);
    if (action) in.user.at(*action) = 1.0;
    in.env = fuzzify_environment(env_, catalog_);
    in.dev_state = encode_device_state(states_, catalog_);
    return in;
}

NetworkInput Interpreter::service_input(const std::string& device, const std::string& action) const {
    NetworkInput in = NetworkInput::zeros(catalog_.dims(), InputKind::Service);
    in.dev_event = encode_device_event(device, action, catalog_);
    return in;
}

std::optional<NetworkInput> Interpreter::interpret(const EventRecord& record) {
    try {
        switch (record.kind) {
        case RecordKind::UserAction:
            return context_input(catalog_.action_index(record.name));
        case RecordKind::EnvReading: {
            if (!record.value) throw std::invalid_argument("env reading without a value");
            const auto& vars = catalog_.env_variables();
            const auto var = std::find_if(vars.begin(), vars.end(),
                                          [&](const EnvVariable& v) { return v.name == record.name; });
            if (var == vars.end()) throw std::invalid_argument("unknown env variable '" + record.name + "'");
            double x = *record.value;
            if (noise_) x += (*noise_)(rng_);
            if (x < var->min || x > var->max) {
                std::ostringstream msg;
                msg << record.name << " reading " << x << " clamped";
                warnings_.push_back(msg.str());
                x = std::clamp(x, var->min, var->max);
            }
            env_[record.name] = x;
            return context_input(std::nullopt);
        }
        case RecordKind::DeviceState: {
            const auto [dev, state] = split_device_label(record.name);
            const auto& d = catalog_.device(dev);
            if (std::find(d.states.begin(), d.states.end(), state) == d.states.end()) {
                throw std::invalid_argument("unknown state '" + state + "'; valid: " + join(d.states));
            }
            states_[dev] = state;
            return context_input(std::nullopt);
        }
        case RecordKind::DeviceEvent: {
            const auto [dev, action] = split_device_label(record.name);
            NetworkInput in = service_input(dev, action);
            const auto& d = catalog_.device(dev);
            for (const auto& e : d.events) {
                if (e.name == action && e.resulting_state) states_[dev] = *e.resulting_state;
            }
            return in;
        }
        case RecordKind::Feedback:
            if (!record.xi) throw std::invalid_argument("feedback without xi");
            return std::nullopt;
        }
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string(e.what()) + " in record " + record.describe());
    }
    return std::nullopt;
}

} // namespace sfem::interp
