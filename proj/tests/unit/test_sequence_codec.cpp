#include "sfem/sequence_codec.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace sfem::codec;

namespace {

void check_values(const std::vector<double>& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

std::vector<std::size_t> random_sequence(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> len(1, 12), alpha(1, 10);
    const std::size_t n = len(rng), k = alpha(rng);
    std::uniform_int_distribution<std::size_t> sym(0, k - 1);
    std::vector<std::size_t> seq;
    while (seq.size() < n) {
        const std::size_t s = sym(rng);
        if (!seq.empty() && seq.back() == s) {
            if (k == 1) break;
            continue;
        }
        seq.push_back(s);
    }
    return seq;
}

} // namespace

TEST_CASE("decay encoding") {
    SequenceCode y{{0.0, 0.0, 0.0}, Scheme::EmArt};
    y = emart_update(y, 0, 0.5);
    check_values(y.values, {1.0, 0.0, 0.0});
    y = emart_update(y, 1, 0.5);
    check_values(y.values, {0.5, 1.0, 0.0});
    y = emart_update(y, 2, 0.5);
    check_values(y.values, {0.25, 0.5, 1.0});
    CHECK(recency_order(y) == std::vector<std::size_t>{2, 1, 0});
}

TEST_CASE("property: the latest event holds the strict maximum of a decay code") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        SequenceCode y{{}, Scheme::EmArt};
        for (std::size_t e : random_sequence(rng)) {
            y = emart_update(y, e, 0.3);
            for (std::size_t i = 0; i < y.values.size(); ++i) {
                if (i != e) CHECK(y.values[i] < y.values[e]);
            }
        }
    }
}

TEST_CASE("buffer encoding") {
    const CodecParams p;
    SequenceCode o{{0.0, 0.0, 0.0}};
    o = deepart_step(o, 0, p);
    check_values(o.values, {1.0, 0.0, 0.0});
    o = deepart_step(o, 1, p);
    check_values(o.values, {0.4, 1.0, 0.0});
    o = deepart_step(o, 2, p);
    check_values(o.values, {0.16, 0.4, 1.0});

    SequenceCode again{{1.0, 0.0, 0.0}};
    check_values(deepart_step(again, 0, p).values, {1.4, 0.0, 0.0});
    SequenceCode mixed{{0.4, 1.0, 0.0}};
    check_values(deepart_step(mixed, 0, p).values, {1.16, 0.4, 0.0});
}

TEST_CASE("buffer decoding") {
    const CodecParams p;
    CHECK(decode_sequence(std::vector<double>{0.16, 0.4, 1.0}, p) == std::vector<std::size_t>{0, 1, 2});
    CHECK(decode_sequence(std::vector<double>{1.16, 0.4, 0.0}, p) == std::vector<std::size_t>{0, 1, 0});
    CHECK(decode_sequence(std::vector<double>{0.0, 0.0, 0.0}, p).empty());
    CHECK_THROWS_AS(decode_sequence(std::vector<double>{0.5, 0.0}, p), DecodeError);
}

TEST_CASE("a slightly averaged code still decodes") {
    const CodecParams p;
    // Each element within 5 % of its buffer power.
    CHECK(decode_sequence(std::vector<double>{0.158, 0.4, 0.99}, p) == std::vector<std::size_t>{0, 1, 2});
    CHECK(decode_sequence(std::vector<double>{0.153, 0.39, 0.96}, p) == std::vector<std::size_t>{0, 1, 2});
    // Residue that matches no power is a decode failure.
    CHECK_THROWS_AS(decode_sequence(std::vector<double>{0.155, 0.41, 0.98}, p), DecodeError);
}

TEST_CASE("property: random sequences round-trip through the buffer code") {
    std::mt19937_64 rng(20240601);
    const CodecParams p;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto seq = random_sequence(rng);
        SequenceCode code;
        for (std::size_t e : seq) code = deepart_step(code, e, p);
        CHECK(decode_sequence(code.values, p) == seq);
        for (double v : code.values) CHECK(v < p.code_bound());
        CHECK(encode_sequence(seq, 10, p).values.size() >= 10);
    }
}

TEST_CASE("codec parameters are validated") {
    CHECK_THROWS_AS(CodecParams(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(CodecParams(1.0, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(CodecParams(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CodecParams(0.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(CodecParams(1.0, 0.4, 1.0), std::invalid_argument);
    CHECK_NOTHROW(CodecParams(2.0, 0.45, 0.3));
}

TEST_CASE("shorter episodes win a cue at their shared first event") {
    const CodecParams p;
    auto activation = [&](std::size_t length) {
        std::vector<std::size_t> seq;
        for (std::size_t i = 0; i < length; ++i) seq.push_back(i);
        const auto w = encode_sequence(seq, length, p).values;
        double wn = 0.0;
        for (double v : w) wn += v;
        return std::min(1.0, w[0]) / wn;
    };
    for (std::size_t len = 2; len < 12; ++len) CHECK(activation(len) > activation(len + 1));
}
