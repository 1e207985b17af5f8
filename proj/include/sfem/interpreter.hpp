#pragma once

// Turns labelled observations into network inputs. User actions become
// one-hots, environment readings are fuzzified through triangular
// memberships, device states and device events become one-hots per catalog
// order. Context inputs carry the latest environment and device-state
// snapshot.

#include "sfem/network.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sfem::interp {

inline constexpr const char* kTimeGapLabel = "time_gap";

/// Triangular membership. A level whose peak sits on its left (right) edge is
/// a shoulder: full membership everywhere below (above) the peak.
struct Membership {
    std::string label;
    double left = 0.0;
    double peak = 0.0;
    double right = 0.0;

    double degree(double x) const;
};

struct EnvVariable {
    std::string name;
    std::string unit;
    double min = 0.0;
    double max = 1.0;
    std::vector<Membership> levels;
};

struct DeviceAction {
    std::string name;
    std::optional<std::string> resulting_state;
};

struct Device {
    std::string name;
    std::vector<std::string> states;
    std::vector<DeviceAction> events;
};

class Catalog {
public:
    /// Appends the reserved time-gap token as the last user action. Throws
    /// std::invalid_argument on duplicate labels, an explicit time_gap entry,
    /// fewer than two levels per variable, or memberships leaving part of the
    /// declared range uncovered.
    Catalog(std::vector<std::string> user_actions, std::vector<EnvVariable> env_variables,
            std::vector<Device> devices);

    const std::vector<std::string>& user_actions() const { return user_actions_; }
    const std::vector<EnvVariable>& env_variables() const { return env_; }
    const std::vector<Device>& devices() const { return devices_; }

    ChannelDims dims() const;
    std::size_t gap_index() const { return user_actions_.size() - 1; }

    std::size_t action_index(const std::string& label) const;
    const Device& device(const std::string& name) const;
    /// Position of (device, action) in the device-event channel.
    std::size_t event_index(const std::string& device, const std::string& action) const;
    /// Inverse of event_index.
    std::pair<std::string, std::string> event_at(std::size_t index) const;

private:
    std::vector<std::string> user_actions_;
    std::vector<EnvVariable> env_;
    std::vector<Device> devices_;
};

art::Vector encode_user_action(const std::string& label, const Catalog& catalog);

/// Concatenated membership degrees. Out-of-range readings are clamped and a
/// note is appended to `warnings` when given; a missing variable leaves its
/// block at zero.
art::Vector fuzzify_environment(const std::map<std::string, double>& readings,
                                const Catalog& catalog,
                                std::vector<std::string>* warnings = nullptr);

/// Concatenated one-hot per device; a device without a known state stays zero.
art::Vector encode_device_state(const std::map<std::string, std::string>& states,
                                const Catalog& catalog);

art::Vector encode_device_event(const std::string& device, const std::string& action,
                                const Catalog& catalog);

enum class RecordKind { UserAction, EnvReading, DeviceState, DeviceEvent, Feedback };

const char* to_string(RecordKind kind);
RecordKind record_kind_from_string(const std::string& text);

/// One timeline observation. Device records name "device:state" or
/// "device:action"; EnvReading carries `value`; Feedback carries `xi`.
struct EventRecord {
    double time = 0.0;
    RecordKind kind = RecordKind::UserAction;
    std::string name;
    std::optional<double> value;
    std::optional<double> xi;

    std::string describe() const;
};

/// Splits "device:item". Throws std::invalid_argument without a colon.
std::pair<std::string, std::string> split_device_label(const std::string& label);

class Interpreter {
public:
    explicit Interpreter(Catalog catalog);

    /// Updates the snapshot and returns the network input for the record;
    /// Feedback records yield nullopt. Throws std::invalid_argument with the
    /// record echoed when it is malformed or names something unknown.
    std::optional<NetworkInput> interpret(const EventRecord& record);

    /// Context input for an optional user action over the current snapshot.
    NetworkInput context_input(std::optional<std::size_t> action) const;
    NetworkInput service_input(const std::string& device, const std::string& action) const;

    /// Gaussian noise on environment readings, in the variable's unit.
    void enable_noise(double stddev, std::uint64_t seed);

    const Catalog& catalog() const { return catalog_; }
    const std::map<std::string, double>& env_readings() const { return env_; }
    const std::map<std::string, std::string>& device_states() const { return states_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    Catalog catalog_;
    std::map<std::string, double> env_;
    std::map<std::string, std::string> states_;
    std::vector<std::string> warnings_;
    std::optional<std::normal_distribution<double>> noise_;
    std::mt19937_64 rng_;
};

} // namespace sfem::interp
