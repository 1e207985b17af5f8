#pragma once

// Fusion ART primitives: complement coding, code activation, competition,
// template matching and template learning over multi-channel inputs.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sfem::art {

using Vector = std::vector<double>;

/// Per-channel complement-coded activity, one entry per input channel.
using Activity = std::vector<Vector>;

struct ArtParams {
    Vector gamma;        // per-channel contribution, each in [0,1]
    double alpha = 0.01; // choice parameter, strictly positive
    double beta = 0.5;   // learning rate in [0,1]
    Vector rho;          // per-channel vigilance, each in [0,1]

    /// Parameters with the same gamma/rho on every channel.
    static ArtParams uniform(std::size_t channels, double gamma = 0.25, double rho = 0.9,
                             double alpha = 0.01, double beta = 0.5);

    /// Throws std::invalid_argument when a value is outside its domain or the
    /// per-channel vectors do not have `channels` entries.
    void validate(std::size_t channels) const;
};

struct CategoryNode {
    std::vector<Vector> weights; // one complement-coded template per channel
};

struct MatchResult {
    Vector match;           // m_k for every channel
    bool resonates = false; // m_k >= rho_k on every channel
};

/// |p| = sum of elements.
double norm(std::span<const double> p);

/// |p ∧ q| where ∧ is the element-wise minimum. Shorter operand is treated as
/// zero-padded.
double fuzzy_and_norm(std::span<const double> p, std::span<const double> q);

/// (I; 1 - I). Throws std::domain_error for elements outside [0,1].
Vector complement_code(std::span<const double> input);

/// Complement-codes every channel.
Activity complement_code_channels(const std::vector<Vector>& inputs);

/// Choice function with the vigilance coefficient:
///   T_j = (rho_init / rho_j) * sum_k gamma_k |x_k ∧ w_jk| / (alpha + |w_jk|)
/// With every rho_j equal to rho_init this is the plain Fusion ART choice.
/// Throws std::domain_error when rho_init or any rho_j is not positive.
Vector choice_activation(const Activity& x, std::span<const CategoryNode> nodes,
                         const ArtParams& params, std::span<const double> vigilances,
                         double rho_init);

/// Plain choice function (every node at the same vigilance).
Vector choice_activation(const Activity& x, std::span<const CategoryNode> nodes,
                         const ArtParams& params);

/// Index of the largest activation; ties go to the lowest index. Empty input
/// has no winner.
std::optional<std::size_t> compete(std::span<const double> activations);

/// m_k = |x_k ∧ w_k| / |x_k|; resonance is inclusive at equality.
MatchResult template_match(const Activity& x, const CategoryNode& node,
                           std::span<const double> rho);

/// w <- (1 - beta) w + beta (x ∧ w). Throws std::domain_error for beta
/// outside [0,1].
void template_learn(const Activity& x, CategoryNode& node, double beta);

/// New node whose templates are exactly x.
CategoryNode commit_new(const Activity& x);

/// A single Fusion ART field with fixed channel dimensions. Presenting an
/// input either refines the resonating winner or commits a new node; there
/// is no match-tracking search past the first winner.
class FusionArt {
public:
    FusionArt(std::vector<std::size_t> channel_dims, ArtParams params);

    struct Presentation {
        std::size_t node = 0;
        bool committed = false;
    };

    /// Raw (not complement-coded) per-channel input.
    Presentation present(const std::vector<Vector>& input);

    /// Winner that would resonate with the input, without learning.
    std::optional<std::size_t> classify(const std::vector<Vector>& input) const;

    const std::vector<CategoryNode>& nodes() const { return nodes_; }
    std::vector<CategoryNode>& mutable_nodes() { return nodes_; }
    const std::vector<std::size_t>& channel_dims() const { return dims_; }
    const ArtParams& params() const { return params_; }

private:
    Activity encode(const std::vector<Vector>& input) const;

    std::vector<std::size_t> dims_;
    ArtParams params_;
    std::vector<CategoryNode> nodes_;
};

} // namespace sfem::art
