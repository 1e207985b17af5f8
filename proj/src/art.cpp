#include "sfem/art.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sfem::art {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace

ArtParams ArtParams::uniform(std::size_t channels, double gamma, double rho, double alpha,
                             double beta) {
    ArtParams p;
    p.gamma.assign(channels, gamma);
    p.rho.assign(channels, rho);
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

void ArtParams::validate(std::size_t channels) const {
    if (gamma.size() != channels || rho.size() != channels) {
        throw std::invalid_argument("ArtParams: expected " + std::to_string(channels) +
                                    " per-channel gamma/rho values");
    }
    if (!(alpha > 0.0)) throw std::invalid_argument("ArtParams: alpha must be > 0");
    if (!in_unit_interval(beta)) throw std::invalid_argument("ArtParams: beta must be in [0,1]");
    for (double g : gamma) {
        if (!in_unit_interval(g)) throw std::invalid_argument("ArtParams: gamma must be in [0,1]");
    }
    for (double r : rho) {
        if (!in_unit_interval(r)) throw std::invalid_argument("ArtParams: rho must be in [0,1]");
    }
}

double norm(std::span<const double> p) { return std::accumulate(p.begin(), p.end(), 0.0); }

double fuzzy_and_norm(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = std::min(p.size(), q.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += std::min(p[i], q[i]);
    return sum;
}

Vector complement_code(std::span<const double> input) {
    const std::size_t d = input.size();
    Vector out(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!in_unit_interval(input[i])) {
            throw std::domain_error("complement_code: element " + std::to_string(i) + " = " +
                                    std::to_string(input[i]) + " outside [0,1]");
        }
        out[i] = input[i];
        out[i + d] = 1.0 - input[i];
    }
    return out;
}

Activity complement_code_channels(const std::vector<Vector>& inputs) {
    Activity x;
    x.reserve(inputs.size());
    for (const auto& channel : inputs) x.push_back(complement_code(channel));
    return x;
}

Vector choice_activation(const Activity& x, std::span<const CategoryNode> nodes,
                         const ArtParams& params, std::span<const double> vigilances,
                         double rho_init) {
    if (!(rho_init > 0.0)) throw std::domain_error("choice_activation: rho_init must be > 0");
    if (vigilances.size() != nodes.size()) {
        throw std::invalid_argument("choice_activation: one vigilance per node required");
    }
    Vector t(nodes.size(), 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (!(vigilances[j] > 0.0)) {
            throw std::domain_error("choice_activation: node vigilance must be > 0");
        }
        const auto& node = nodes[j];
        if (node.weights.size() != x.size()) {
            throw std::invalid_argument("choice_activation: channel count mismatch");
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double overlap = fuzzy_and_norm(x[k], node.weights[k]);
            sum += params.gamma[k] * overlap / (params.alpha + norm(node.weights[k]));
        }
        t[j] = (rho_init / vigilances[j]) * sum;
    }
    return t;
}

Vector choice_activation(const Activity& x, std::span<const CategoryNode> nodes,
                         const ArtParams& params) {
    const Vector same(nodes.size(), 1.0);
    return choice_activation(x, nodes, params, same, 1.0);
}

std::optional<std::size_t> compete(std::span<const double> activations) {
    if (activations.empty()) return std::nullopt;
    std::size_t best = 0;
    for (std::size_t j = 1; j < activations.size(); ++j) {
        if (activations[j] > activations[best]) best = j;
    }
    return best;
}

MatchResult template_match(const Activity& x, const CategoryNode& node,
                           std::span<const double> rho) {
    if (node.weights.size() != x.size() || rho.size() != x.size()) {
        throw std::invalid_argument("template_match: channel count mismatch");
    }
    MatchResult result;
    result.match.resize(x.size());
    result.resonates = true;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k].size() != node.weights[k].size()) {
            throw std::invalid_argument("template_match: dimension mismatch on channel " +
                                        std::to_string(k));
        }
        const double denom = norm(x[k]);
        // An empty channel matches vacuously.
        const double m = denom > 0.0 ? fuzzy_and_norm(x[k], node.weights[k]) / denom : 1.0;
        result.match[k] = m;
        if (m < rho[k]) result.resonates = false;
    }
    return result;
}

void template_learn(const Activity& x, CategoryNode& node, double beta) {
    if (!in_unit_interval(beta)) throw std::domain_error("template_learn: beta outside [0,1]");
    if (node.weights.size() != x.size()) {
        throw std::invalid_argument("template_learn: channel count mismatch");
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        auto& w = node.weights[k];
        if (w.size() != x[k].size()) {
            throw std::invalid_argument("template_learn: dimension mismatch");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            // Algebraically never above w; the min guards against rounding.
            w[i] = std::min(w[i], (1.0 - beta) * w[i] + beta * std::min(x[k][i], w[i]));
        }
    }
}

CategoryNode commit_new(const Activity& x) { return CategoryNode{x}; }

FusionArt::FusionArt(std::vector<std::size_t> channel_dims, ArtParams params)
    : dims_(std::move(channel_dims)), params_(std::move(params)) {
    params_.validate(dims_.size());
}

Activity FusionArt::encode(const std::vector<Vector>& input) const {
    if (input.size() != dims_.size()) {
        throw std::invalid_argument("FusionArt: expected " + std::to_string(dims_.size()) +
                                    " channels, got " + std::to_string(input.size()));
    }
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (input[k].size() != dims_[k]) {
            throw std::invalid_argument("FusionArt: channel " + std::to_string(k) +
                                        " expects dimension " + std::to_string(dims_[k]) +
                                        ", got " + std::to_string(input[k].size()));
        }
    }
    return complement_code_channels(input);
}

std::optional<std::size_t> FusionArt::classify(const std::vector<Vector>& input) const {
    const Activity x = encode(input);
    const Vector t = choice_activation(x, nodes_, params_);
    const auto winner = compete(t);
    if (winner && template_match(x, nodes_[*winner], params_.rho).resonates) return winner;
    return std::nullopt;
}

FusionArt::Presentation FusionArt::present(const std::vector<Vector>& input) {
    const Activity x = encode(input);
    const Vector t = choice_activation(x, nodes_, params_);
    if (const auto winner = compete(t)) {
        if (template_match(x, nodes_[*winner], params_.rho).resonates) {
            template_learn(x, nodes_[*winner], params_.beta);
            return {*winner, false};
        }
    }
    nodes_.push_back(commit_new(x));
    return {nodes_.size() - 1, true};
}

} // namespace sfem::art
