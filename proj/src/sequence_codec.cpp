#include "sfem/sequence_codec.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace sfem::codec {

CodecParams::CodecParams(double input_weight, double buffer_weight, double tau)
    : input_weight_(input_weight), buffer_weight_(buffer_weight), tau_(tau) {
    if (!(input_weight_ > 0.0)) throw std::invalid_argument("CodecParams: i_w must be > 0");
    if (!(buffer_weight_ > 0.0 && buffer_weight_ < 0.5)) {
        throw std::invalid_argument("CodecParams: b_w must be in (0, 0.5) for decodability, got " +
                                    std::to_string(buffer_weight_));
    }
    if (!(tau_ > 0.0 && tau_ < 1.0)) throw std::invalid_argument("CodecParams: tau must be in (0,1)");
}

SequenceCode emart_update(SequenceCode code, std::size_t fired, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("emart_update: tau must be in (0,1)");
    if (fired >= code.values.size()) code.values.resize(fired + 1, 0.0);
    for (double& v : code.values) v *= (1.0 - tau);
    code.values[fired] = 1.0;
    code.scheme = Scheme::EmArt;
    return code;
}

SequenceCode deepart_step(SequenceCode code, std::size_t fired, const CodecParams& params) {
    if (fired >= code.values.size()) code.values.resize(fired + 1, 0.0);
    for (double& v : code.values) v *= params.buffer_weight();
    code.values[fired] += params.input_weight();
    code.scheme = Scheme::DeepArt;
    return code;
}

SequenceCode encode_sequence(std::span<const std::size_t> events, std::size_t length,
                             const CodecParams& params, Scheme scheme) {
    SequenceCode code{std::vector<double>(length, 0.0), scheme};
    for (std::size_t e : events) {
        code = scheme == Scheme::DeepArt ? deepart_step(std::move(code), e, params)
                                         : emart_update(std::move(code), e, params.tau());
    }
    return code;
}

std::vector<std::size_t> recency_order(const SequenceCode& code) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < code.values.size(); ++i) {
        if (code.values[i] > 0.0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return code.values[a] > code.values[b];
    });
    return order;
}

std::vector<std::size_t> decode_sequence(std::span<const double> code, const CodecParams& params,
                                         double epsilon) {
    std::vector<double> work(code.begin(), code.end());
    std::vector<std::size_t> queue;
    const double b = params.buffer_weight();
    double term = params.input_weight();

    while (!work.empty()) {
        const auto it = std::max_element(work.begin(), work.end());
        const double top = *it;
        if (top <= epsilon) break;
        const auto index = static_cast<std::size_t>(it - work.begin());

        if (term <= epsilon) {
            throw DecodeError("decode_sequence: residue " + std::to_string(top) + " at index " +
                              std::to_string(index) + " below resolvable precision");
        }
        const double tolerance = kMatchFraction * term;
        // A clean element holds this term plus a tail strictly below term * b / (1 - b).
        if (top < term - tolerance || top > term / (1.0 - b) + tolerance) {
            throw DecodeError("decode_sequence: element " + std::to_string(index) + " = " +
                              std::to_string(top) + " does not contain term " +
                              std::to_string(term));
        }
        *it = std::max(0.0, top - term);
        queue.push_back(index);
        term *= b;
    }

    std::reverse(queue.begin(), queue.end());
    return queue;
}

} // namespace sfem::codec
