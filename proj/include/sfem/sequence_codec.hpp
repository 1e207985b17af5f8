#pragma once

// Temporal encoding of event sequences into a fixed-length code.
//
// Two schemes are provided:
//  * EM-ART decay: the fired entry is set to 1 and every other entry decays
//    by (1 - tau). Recency order is recovered by sorting.
//  * Deep ART buffer: o_new = i_w * onehot(J) + b_w * o_prev. Each firing at
//    lag n contributes i_w * b_w^n to its event's entry, so a code is a sum of
//    distinct powers and can be decoded exactly while b_w < 0.5 (the geometric
//    tail b_w / (1 - b_w) stays below one unit).

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sfem::codec {

enum class Scheme { EmArt, DeepArt };

struct SequenceCode {
    std::vector<double> values;
    Scheme scheme = Scheme::DeepArt;
};

class CodecParams {
public:
    /// Throws std::invalid_argument unless tau in (0,1), input_weight > 0 and
    /// buffer_weight in (0, 0.5).
    explicit CodecParams(double input_weight = 1.0, double buffer_weight = 0.4,
                         double tau = 0.5);

    double input_weight() const { return input_weight_; }
    double buffer_weight() const { return buffer_weight_; }
    double tau() const { return tau_; }

    /// i_w / (1 - b_w), the exclusive upper bound of any Deep ART element.
    double code_bound() const { return input_weight_ / (1.0 - buffer_weight_); }

private:
    double input_weight_;
    double buffer_weight_;
    double tau_;
};

/// Signals a code that is not a clean sum of distinct buffer powers.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kDecodeEpsilon = 1e-9;
inline constexpr double kMatchFraction = 0.05;

/// EM-ART decay update. Grows the code when `fired` is past its end.
SequenceCode emart_update(SequenceCode code, std::size_t fired, double tau);

/// Deep ART buffer update. Grows the code when `fired` is past its end.
SequenceCode deepart_step(SequenceCode code, std::size_t fired, const CodecParams& params);

/// Encodes a whole sequence into a code of at least `length` entries.
SequenceCode encode_sequence(std::span<const std::size_t> events, std::size_t length,
                             const CodecParams& params, Scheme scheme = Scheme::DeepArt);

/// Entries with a positive value, most recent first (EM-ART decode).
std::vector<std::size_t> recency_order(const SequenceCode& code);

/// Greedy Deep ART decode, returned in chronological order.
///
/// Repeatedly takes the largest element, records its index and removes the
/// next buffer power i_w * b_w^q from it, until every element is below
/// `epsilon`. A learned (averaged) code may deviate from a pure power sum:
/// the element must lie within kMatchFraction * i_w * b_w^q of the expected
/// term, otherwise DecodeError is thrown.
std::vector<std::size_t> decode_sequence(std::span<const double> code, const CodecParams& params,
                                         double epsilon = kDecodeEpsilon);

} // namespace sfem::codec
