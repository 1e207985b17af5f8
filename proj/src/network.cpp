#include "sfem/network.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfem {

using nlohmann::json;

namespace {

constexpr int kSnapshotVersion = 1;

bool all_zero(const art::Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void check_dim(const art::Vector& v, std::size_t expected, const char* channel) {
    if (v.size() != expected) {
        throw std::invalid_argument(std::string("NetworkInput: channel '") + channel +
                                    "' expects dimension " + std::to_string(expected) + ", got " +
                                    std::to_string(v.size()));
    }
}

// Episode-field choice: overlap relative to the template size.
double episode_choice(const std::vector<double>& code, const std::vector<double>& weights) {
    const double wn = art::norm(weights);
    return wn > 0.0 ? art::fuzzy_and_norm(code, weights) / wn : 0.0;
}

double episode_match(const std::vector<double>& code, const std::vector<double>& weights) {
    const double cn = art::norm(code);
    return cn > 0.0 ? art::fuzzy_and_norm(code, weights) / cn : 0.0;
}

json strength_to_json(const strength::StrengthParams& p) {
    return {{"s_init", p.s_init},
            {"r", p.r},
            {"theta", p.theta},
            {"mode", p.mode == strength::DecayMode::Adaptive ? "adaptive" : "fixed"},
            {"delta", p.delta}};
}

strength::StrengthParams strength_from_json(const json& j) {
    strength::StrengthParams p;
    p.s_init = j.at("s_init").get<double>();
    p.r = j.at("r").get<double>();
    p.theta = j.at("theta").get<double>();
    p.mode = j.at("mode").get<std::string>() == "adaptive" ? strength::DecayMode::Adaptive
                                                            : strength::DecayMode::Fixed;
    p.delta = j.at("delta").get<double>();
    return p;
}

json feedback_to_json(const feedback::FeedbackParams& p) {
    return {{"xi_w", p.xi_w},         {"r", p.r},
            {"r_s", p.r_s},           {"delta_s", p.delta_s},
            {"p", p.p},               {"r_rho", p.r_rho},
            {"delta_rho", p.delta_rho}, {"rho_init", p.rho_init},
            {"theta", p.theta},       {"s_init", p.s_init}};
}

feedback::FeedbackParams feedback_from_json(const json& j) {
    feedback::FeedbackParams p;
    p.xi_w = j.at("xi_w").get<double>();
    p.r = j.at("r").get<double>();
    p.r_s = j.at("r_s").get<double>();
    p.delta_s = j.at("delta_s").get<double>();
    p.p = j.at("p").get<unsigned>();
    p.r_rho = j.at("r_rho").get<double>();
    p.delta_rho = j.at("delta_rho").get<double>();
    p.rho_init = j.at("rho_init").get<double>();
    p.theta = j.at("theta").get<double>();
    p.s_init = j.at("s_init").get<double>();
    return p;
}

json params_to_json(const NetworkParams& p) {
    json j;
    j["event_art"] = {{"gamma", p.event_art.gamma},
                      {"alpha", p.event_art.alpha},
                      {"beta", p.event_art.beta},
                      {"rho", p.event_art.rho}};
    j["codec"] = {{"i_w", p.codec.input_weight()},
                  {"b_w", p.codec.buffer_weight()},
                  {"tau", p.codec.tau()}};
    j["episode_beta"] = p.episode_beta;
    j["rho_init"] = p.rho_init;
    j["rho_negative"] = p.rho_negative;
    j["activation_floor"] = p.activation_floor;
    j["strength"] = strength_to_json(p.strength);
    j["feedback"] = feedback_to_json(p.feedback);
    j["feedback_enabled"] = p.feedback_enabled;
    j["negative_memory_enabled"] = p.negative_memory_enabled;
    j["buffer_capacity"] = p.buffer_capacity;
    j["recognition"] = {{"regular_gap_tolerance", p.recognition.regular_gap_tolerance},
                        {"min_gap_seconds", p.recognition.min_gap_seconds},
                        {"min_occurrences", p.recognition.min_occurrences}};
    j["gap_user_index"] = p.gap_user_index ? json(*p.gap_user_index) : json(nullptr);
    return j;
}

NetworkParams params_from_json(const json& j) {
    NetworkParams p;
    const auto& art = j.at("event_art");
    p.event_art.gamma = art.at("gamma").get<art::Vector>();
    p.event_art.alpha = art.at("alpha").get<double>();
    p.event_art.beta = art.at("beta").get<double>();
    p.event_art.rho = art.at("rho").get<art::Vector>();
    const auto& codec = j.at("codec");
    p.codec = codec::CodecParams(codec.at("i_w").get<double>(), codec.at("b_w").get<double>(),
                                 codec.at("tau").get<double>());
    p.episode_beta = j.at("episode_beta").get<double>();
    p.rho_init = j.at("rho_init").get<double>();
    p.rho_negative = j.at("rho_negative").get<double>();
    p.activation_floor = j.at("activation_floor").get<double>();
    p.strength = strength_from_json(j.at("strength"));
    p.feedback = feedback_from_json(j.at("feedback"));
    p.feedback_enabled = j.at("feedback_enabled").get<bool>();
    p.negative_memory_enabled = j.at("negative_memory_enabled").get<bool>();
    p.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
    const auto& rec = j.at("recognition");
    p.recognition.regular_gap_tolerance = rec.at("regular_gap_tolerance").get<double>();
    p.recognition.min_gap_seconds = rec.at("min_gap_seconds").get<double>();
    p.recognition.min_occurrences = rec.at("min_occurrences").get<std::size_t>();
    if (!j.at("gap_user_index").is_null()) {
        p.gap_user_index = j.at("gap_user_index").get<std::size_t>();
    }
    return p;
}

} // namespace

const char* to_string(Polarity p) { return p == Polarity::Ordinary ? "ordinary" : "negative"; }
const char* to_string(InputKind k) { return k == InputKind::Context ? "context" : "service"; }

void NetworkInput::validate(const ChannelDims& dims) const {
    check_dim(user, dims.user, "user");
    check_dim(env, dims.env, "env");
    check_dim(dev_state, dims.dev_state, "dev_state");
    check_dim(dev_event, dims.dev_event, "dev_event");
    if (kind == InputKind::Context && !all_zero(dev_event)) {
        throw std::invalid_argument("NetworkInput: context input carries a device event");
    }
    if (kind == InputKind::Service && !(all_zero(user) && all_zero(env) && all_zero(dev_state))) {
        throw std::invalid_argument("NetworkInput: service input carries context values");
    }
}

std::vector<art::Vector> NetworkInput::channels() const { return {user, env, dev_state, dev_event}; }

NetworkInput NetworkInput::zeros(const ChannelDims& dims, InputKind kind) {
    return {art::Vector(dims.user, 0.0), art::Vector(dims.env, 0.0),
            art::Vector(dims.dev_state, 0.0), art::Vector(dims.dev_event, 0.0), kind};
}

WorkingBuffer::WorkingBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("WorkingBuffer: capacity must be positive");
}

void WorkingBuffer::push(BufferEntry entry) {
    if (!entries_.empty() && entry.time < entries_.back().time) {
        throw std::invalid_argument("WorkingBuffer: timestamps must be non-decreasing");
    }
    if (entries_.size() == capacity_) entries_.erase(entries_.begin());
    entries_.push_back(entry);
}

void NetworkParams::validate() const {
    event_art.validate(4);
    if (!(episode_beta >= 0.0 && episode_beta <= 1.0)) {
        throw std::invalid_argument("episode_beta must be in [0,1]");
    }
    if (!(rho_init > 0.0 && rho_init <= 1.0)) throw std::invalid_argument("rho_init must be in (0,1]");
    if (!(rho_negative > 0.0 && rho_negative <= 1.0)) {
        throw std::invalid_argument("rho_negative must be in (0,1]");
    }
    if (!(activation_floor >= 0.0)) throw std::invalid_argument("activation_floor must be >= 0");
    strength.validate();
    feedback.validate();
}

Network::Network(ChannelDims dims, NetworkParams params)
    : dims_(dims),
      params_(std::move(params)),
      events_({dims.user, dims.env, dims.dev_state, dims.dev_event}, params_.event_art),
      buffer_(params_.buffer_capacity) {
    params_.validate();
    if (params_.gap_user_index && *params_.gap_user_index >= dims_.user) {
        throw std::invalid_argument("gap_user_index outside the user channel");
    }
}

std::size_t Network::classify_event(const NetworkInput& input) {
    input.validate(dims_);
    return events_.present(input.channels()).node;
}

std::size_t Network::observe_event(const NetworkInput& input, double time) {
    const std::size_t index = classify_event(input);
    buffer_.push({index, time});
    code_ = codec::deepart_step(std::move(code_), index, params_.codec);
    return index;
}

std::optional<std::size_t> Network::gap_event() {
    if (!params_.gap_user_index) return std::nullopt;
    NetworkInput gap = NetworkInput::zeros(dims_, InputKind::Context);
    gap.user[*params_.gap_user_index] = 1.0;
    return classify_event(gap);
}

InputKind Network::event_kind(std::size_t event) const {
    const auto& node = events_.nodes().at(event);
    const auto& channel = node.weights[3];
    for (std::size_t i = 0; i < dims_.dev_event; ++i) {
        if (channel[i] > 0.0) return InputKind::Service;
    }
    return InputKind::Context;
}

std::vector<Episode> Network::recognize_episodes() {
    const auto gap = gap_event();
    return sfem::recognize_episodes(buffer_.entries(), params_.recognition, gap);
}

std::size_t Network::ordinary_count() const {
    return static_cast<std::size_t>(std::count_if(episodes_.begin(), episodes_.end(), [](const auto& n) {
        return n.polarity == Polarity::Ordinary;
    }));
}

const EpisodeNode* Network::find(std::size_t node_id) const {
    const auto it = std::find_if(episodes_.begin(), episodes_.end(),
                                 [&](const EpisodeNode& n) { return n.id == node_id; });
    return it == episodes_.end() ? nullptr : &*it;
}

EpisodeNode* Network::find_mutable(std::size_t node_id) {
    return const_cast<EpisodeNode*>(std::as_const(*this).find(node_id));
}

bool Network::blocked_by_negative(const std::vector<double>& code) const {
    if (!params_.negative_memory_enabled) return false;
    return std::any_of(episodes_.begin(), episodes_.end(), [&](const EpisodeNode& n) {
        return n.polarity == Polarity::Negative && episode_match(code, n.weights) >= n.vigilance;
    });
}

void Network::decay_ordinary(std::optional<std::size_t> except) {
    const std::size_t n = ordinary_count();
    for (auto& node : episodes_) {
        if (node.polarity != Polarity::Ordinary || (except && node.id == *except)) continue;
        node.strength = strength::update_strength(node.strength, strength::StrengthEvent::Decayed,
                                                  params_.strength, n);
    }
}

void Network::prune_ordinary() {
    last_pruned_.clear();
    std::erase_if(episodes_, [&](const EpisodeNode& n) {
        const bool dead = n.polarity == Polarity::Ordinary &&
                          strength::below_threshold(n.strength, params_.strength.theta);
        if (dead) last_pruned_.push_back(n.id);
        return dead;
    });
    if (last_served_ && !find(last_served_->id)) last_served_.reset();
}

std::optional<std::size_t> Network::learn_episode(const Episode& episode, Polarity polarity) {
    if (episode.events.size() < 2) {
        throw std::invalid_argument("learn_episode: an episode needs at least two events");
    }
    for (std::size_t e : episode.events) {
        if (e >= event_count()) throw std::out_of_range("learn_episode: unknown event index");
    }
    return learn_code(codec::encode_sequence(episode.events, event_count(), params_.codec).values, polarity);
}

std::optional<std::size_t> Network::learn_code(const std::vector<double>& y, Polarity polarity) {
    if (polarity == Polarity::Ordinary && blocked_by_negative(y)) return std::nullopt;

    std::vector<std::size_t> candidates;
    std::vector<double> choice;
    for (std::size_t i = 0; i < episodes_.size(); ++i) {
        if (episodes_[i].polarity != polarity) continue;
        candidates.push_back(i);
        choice.push_back(episode_choice(y, episodes_[i].weights));
    }

    std::optional<std::size_t> resonant;
    if (const auto winner = art::compete(choice)) {
        const auto& node = episodes_[candidates[*winner]];
        if (episode_match(y, node.weights) >= node.vigilance) resonant = candidates[*winner];
    }

    std::size_t id = 0;
    if (resonant) {
        auto& node = episodes_[*resonant];
        if (node.weights.size() < y.size()) node.weights.resize(y.size(), 0.0);
        const double beta = params_.episode_beta;
        for (std::size_t i = 0; i < node.weights.size(); ++i) {
            const double yi = i < y.size() ? y[i] : 0.0;
            node.weights[i] = (1.0 - beta) * node.weights[i] + beta * std::min(yi, node.weights[i]);
        }
        if (polarity == Polarity::Ordinary) {
            node.strength = strength::update_strength(
                node.strength, strength::StrengthEvent::Reactivated, params_.strength, ordinary_count());
        }
        id = node.id;
    } else {
        EpisodeNode node;
        node.id = next_id_++;
        node.weights = y;
        node.polarity = polarity;
        node.strength = params_.strength.s_init;
        node.vigilance = polarity == Polarity::Ordinary ? params_.rho_init : params_.rho_negative;
        episodes_.push_back(std::move(node));
        id = episodes_.back().id;
    }

    if (polarity == Polarity::Ordinary) {
        decay_ordinary(id);
        prune_ordinary();
    }
    return id;
}

std::vector<double> Network::activations_for(const std::vector<double>& cue_code) const {
    std::vector<double> t;
    for (const auto& node : episodes_) {
        if (node.polarity != Polarity::Ordinary) continue;
        t.push_back((params_.rho_init / node.vigilance) * episode_choice(cue_code, node.weights));
    }
    return t;
}

std::vector<double> Network::retrieval_activations(std::span<const std::size_t> cue) const {
    for (std::size_t e : cue) {
        if (e >= event_count()) throw std::out_of_range("retrieve: unknown event index in cue");
    }
    return activations_for(codec::encode_sequence(cue, event_count(), params_.codec).values);
}

std::optional<Retrieval> Network::retrieve_service(std::span<const std::size_t> cue) {
    if (cue.empty()) throw std::invalid_argument("retrieve_service: empty cue");
    const auto t = retrieval_activations(cue);

    std::vector<std::size_t> ordinary;
    for (std::size_t i = 0; i < episodes_.size(); ++i) {
        if (episodes_[i].polarity == Polarity::Ordinary) ordinary.push_back(i);
    }
    std::vector<std::size_t> order(ordinary.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] > t[b]; });

    std::optional<Retrieval> result;
    for (std::size_t k : order) {
        if (t[k] <= 0.0 || t[k] < params_.activation_floor) break;
        const auto& node = episodes_[ordinary[k]];
        std::vector<std::size_t> routine;
        try {
            routine = codec::decode_sequence(node.weights, params_.codec);
        } catch (const codec::DecodeError&) {
            continue;
        }
        if (routine.size() < 2) continue;
        const auto code = codec::encode_sequence(routine, event_count(), params_.codec).values;
        if (blocked_by_negative(code)) continue;
        result = Retrieval{std::move(routine), node.id, t[k]};
        break;
    }

    if (result) {
        auto* winner = find_mutable(result->node_id);
        last_served_ = ServedNode{winner->id, winner->strength};
        winner->strength = strength::update_strength(
            winner->strength, strength::StrengthEvent::Reactivated, params_.strength, ordinary_count());
        decay_ordinary(winner->id);
    } else {
        decay_ordinary(std::nullopt);
    }
    prune_ordinary();
    return result;
}

FeedbackResult Network::apply_feedback(std::size_t node_id, double xi) {
    EpisodeNode* node = find_mutable(node_id);
    if (!node) throw std::out_of_range("apply_feedback: unknown episode node " + std::to_string(node_id));
    if (node->polarity != Polarity::Ordinary) {
        throw std::invalid_argument("apply_feedback: negative-memory nodes take no feedback");
    }

    FeedbackResult result;
    result.node_id = node_id;
    result.kind = feedback::classify_feedback(xi, params_.feedback.xi_w);
    if (!params_.feedback_enabled) {
        result.strength = node->strength;
        result.vigilance = node->vigilance;
        return result;
    }

    const double base =
        last_served_ && last_served_->id == node_id ? last_served_->strength_before : node->strength;
    last_served_.reset();

    feedback::FeedbackParams fp = params_.feedback;
    fp.delta_s = strength::effective_decay(params_.strength, ordinary_count());
    node->strength = feedback::modulate_strength(base, result.kind, fp);
    node->vigilance = feedback::modulate_vigilance(node->vigilance, result.kind, fp);
    result.modulated = true;
    result.strength = node->strength;
    result.vigilance = node->vigilance;

    if (result.kind == feedback::FeedbackKind::Negative && params_.negative_memory_enabled) {
        // Store the served template itself: a learned average need not decode.
        const std::vector<double> served = node->weights;
        result.negative_node = learn_code(served, Polarity::Negative);
    }
    prune_ordinary();
    return result;
}

std::vector<std::size_t> Network::decode_node(std::size_t node_id) const {
    const EpisodeNode* node = find(node_id);
    if (!node) throw std::out_of_range("decode_node: unknown episode node " + std::to_string(node_id));
    return codec::decode_sequence(node->weights, params_.codec);
}

json Network::to_json() const {
    json doc;
    doc["format"] = "sfem-network";
    doc["version"] = kSnapshotVersion;
    doc["dims"] = {{"user", dims_.user},
                   {"env", dims_.env},
                   {"dev_state", dims_.dev_state},
                   {"dev_event", dims_.dev_event}};
    doc["params"] = params_to_json(params_);
    json events = json::array();
    for (const auto& node : events_.nodes()) events.push_back({{"weights", node.weights}});
    doc["event_nodes"] = std::move(events);
    json episodes = json::array();
    for (const auto& node : episodes_) {
        episodes.push_back({{"id", node.id},
                            {"polarity", to_string(node.polarity)},
                            {"weights", node.weights},
                            {"strength", node.strength},
                            {"vigilance", node.vigilance}});
    }
    doc["episode_nodes"] = std::move(episodes);
    doc["next_id"] = next_id_;
    json buffer = json::array();
    for (const auto& e : buffer_.entries()) buffer.push_back({{"event", e.event}, {"t", e.time}});
    doc["buffer"] = std::move(buffer);
    doc["code"] = code_.values;
    doc["last_served"] = last_served_ ? json{{"id", last_served_->id},
                                             {"strength_before", last_served_->strength_before}}
                                      : json(nullptr);
    return doc;
}

Network Network::from_json(const json& doc) {
    if (doc.value("format", "") != "sfem-network") {
        throw std::invalid_argument("snapshot: not an sfem-network document");
    }
    if (doc.at("version").get<int>() != kSnapshotVersion) {
        throw std::invalid_argument("snapshot: unsupported version " + doc.at("version").dump());
    }
    const auto& d = doc.at("dims");
    ChannelDims dims{d.at("user").get<std::size_t>(), d.at("env").get<std::size_t>(),
                     d.at("dev_state").get<std::size_t>(), d.at("dev_event").get<std::size_t>()};
    Network net(dims, params_from_json(doc.at("params")));
    for (const auto& node : doc.at("event_nodes")) {
        net.events_.mutable_nodes().push_back({node.at("weights").get<std::vector<art::Vector>>()});
    }
    for (const auto& node : doc.at("episode_nodes")) {
        EpisodeNode n;
        n.id = node.at("id").get<std::size_t>();
        n.polarity = node.at("polarity").get<std::string>() == "negative" ? Polarity::Negative
                                                                           : Polarity::Ordinary;
        n.weights = node.at("weights").get<std::vector<double>>();
        n.strength = node.at("strength").get<double>();
        n.vigilance = node.at("vigilance").get<double>();
        net.episodes_.push_back(std::move(n));
    }
    net.next_id_ = doc.at("next_id").get<std::size_t>();
    for (const auto& e : doc.at("buffer")) {
        net.buffer_.push({e.at("event").get<std::size_t>(), e.at("t").get<double>()});
    }
    net.code_.values = doc.at("code").get<std::vector<double>>();
    if (const auto& served = doc.at("last_served"); !served.is_null()) {
        net.last_served_ = ServedNode{served.at("id").get<std::size_t>(),
                                      served.at("strength_before").get<double>()};
    }
    return net;
}

} // namespace sfem
