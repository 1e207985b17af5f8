#pragma once

// The stabilized feedback episodic memory.
//
//   inputs (user, env, device state, device event)
//     -> event layer (Fusion ART, four channels)
//     -> Deep ART sequence code over event-node indices
//     -> episode field: ordinary memory (strength + vigilance dynamics)
//                       negative memory (frozen; blocks rejected routines)

#include "sfem/art.hpp"
#include "sfem/episode_recognition.hpp"
#include "sfem/feedback.hpp"
#include "sfem/sequence_codec.hpp"
#include "sfem/strength.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sfem {

enum class InputKind { Context, Service };

struct ChannelDims {
    std::size_t user = 0;
    std::size_t env = 0;
    std::size_t dev_state = 0;
    std::size_t dev_event = 0;

    bool operator==(const ChannelDims&) const = default;
};

/// One network input. A Context input carries the user, environment and
/// device-state blocks with an all-zero device event; a Service input carries
/// only the device event.
struct NetworkInput {
    art::Vector user;
    art::Vector env;
    art::Vector dev_state;
    art::Vector dev_event;
    InputKind kind = InputKind::Context;

    /// Throws std::invalid_argument on a dimension mismatch or when the
    /// context/service exclusivity does not hold.
    void validate(const ChannelDims& dims) const;

    std::vector<art::Vector> channels() const;

    static NetworkInput zeros(const ChannelDims& dims, InputKind kind);
};

enum class Polarity { Ordinary, Negative };

struct EpisodeNode {
    std::size_t id = 0; // stable across pruning
    std::vector<double> weights;
    double strength = 0.0;
    double vigilance = 0.0;
    Polarity polarity = Polarity::Ordinary;
};

class WorkingBuffer {
public:
    explicit WorkingBuffer(std::size_t capacity = 256);

    /// Appends an entry, evicting the oldest one when full. Throws
    /// std::invalid_argument if the timestamp goes backwards.
    void push(BufferEntry entry);
    void clear() { entries_.clear(); }

    std::span<const BufferEntry> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::vector<BufferEntry> entries_;
};

struct NetworkParams {
    art::ArtParams event_art = art::ArtParams::uniform(4);
    codec::CodecParams codec{};
    double episode_beta = 0.5;
    double rho_init = 0.9;
    double rho_negative = 0.9;
    /// Retrieval floor on the modulated episode activation.
    double activation_floor = 0.01;
    strength::StrengthParams strength{};
    feedback::FeedbackParams feedback{};
    bool feedback_enabled = true;
    bool negative_memory_enabled = true;
    std::size_t buffer_capacity = 256;
    RecognitionParams recognition{};
    /// User-channel index reserved for the time-gap token.
    std::optional<std::size_t> gap_user_index;

    void validate() const;
};

struct Retrieval {
    std::vector<std::size_t> episode; // chronological event indices
    std::size_t node_id = 0;
    double activation = 0.0;
};

struct FeedbackResult {
    std::size_t node_id = 0;
    feedback::FeedbackKind kind = feedback::FeedbackKind::None;
    bool modulated = false;
    double strength = 0.0;
    double vigilance = 0.0;
    std::optional<std::size_t> negative_node;
};

class Network {
public:
    explicit Network(ChannelDims dims, NetworkParams params = {});

    /// Classifies the input at the event layer (learning or committing), then
    /// appends it to the working buffer and advances the running sequence code.
    std::size_t observe_event(const NetworkInput& input, double time);

    /// Event-layer classification only; the buffer and code are untouched.
    std::size_t classify_event(const NetworkInput& input);

    /// Event node standing for a regular pause, if a gap index is configured.
    std::optional<std::size_t> gap_event();

    std::vector<Episode> recognize_episodes();

    /// Learns an episode into the field of the given polarity. Returns the
    /// node id, or nullopt when an ordinary episode is refused because it
    /// matches a negative memory. Throws std::invalid_argument for episodes
    /// shorter than two events.
    std::optional<std::size_t> learn_episode(const Episode& episode, Polarity polarity);

    /// Partial-cue retrieval over ordinary memory, skipping candidates whose
    /// routine resonates with a negative memory. Every call decays the
    /// non-winning ordinary nodes and prunes.
    std::optional<Retrieval> retrieve_service(std::span<const std::size_t> cue);

    /// Modulated activations of the ordinary nodes for a cue, in node order.
    /// Read-only.
    std::vector<double> retrieval_activations(std::span<const std::size_t> cue) const;

    /// Applies user feedback to an ordinary node. Explicit feedback on the
    /// node that was just served replaces that serve's reactivation step.
    /// Negative feedback also stores the served template in negative memory.
    /// Throws std::out_of_range for an unknown id and std::invalid_argument
    /// for a negative-memory node.
    FeedbackResult apply_feedback(std::size_t node_id, double xi);

    std::vector<std::size_t> decode_node(std::size_t node_id) const;

    const EpisodeNode* find(std::size_t node_id) const;
    const std::vector<EpisodeNode>& episode_nodes() const { return episodes_; }
    std::size_t ordinary_count() const;
    std::size_t event_count() const { return events_.nodes().size(); }
    InputKind event_kind(std::size_t event) const;
    const art::FusionArt& event_layer() const { return events_; }
    const codec::SequenceCode& current_code() const { return code_; }
    const WorkingBuffer& buffer() const { return buffer_; }
    WorkingBuffer& buffer() { return buffer_; }
    const ChannelDims& dims() const { return dims_; }
    const NetworkParams& params() const { return params_; }
    /// Ids removed by the most recent pruning pass.
    const std::vector<std::size_t>& last_pruned() const { return last_pruned_; }

    nlohmann::json to_json() const;
    static Network from_json(const nlohmann::json& doc);

private:
    EpisodeNode* find_mutable(std::size_t node_id);
    std::optional<std::size_t> learn_code(const std::vector<double>& code, Polarity polarity);
    std::vector<double> activations_for(const std::vector<double>& cue_code) const;
    bool blocked_by_negative(const std::vector<double>& code) const;
    void decay_ordinary(std::optional<std::size_t> except);
    void prune_ordinary();

    struct ServedNode {
        std::size_t id;
        double strength_before;
    };

    ChannelDims dims_;
    NetworkParams params_;
    art::FusionArt events_;
    codec::SequenceCode code_;
    WorkingBuffer buffer_;
    std::vector<EpisodeNode> episodes_;
    std::size_t next_id_ = 0;
    std::optional<ServedNode> last_served_;
    std::vector<std::size_t> last_pruned_;
};

const char* to_string(Polarity p);
const char* to_string(InputKind k);

} // namespace sfem
