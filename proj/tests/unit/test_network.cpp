#include "sfem/network.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>

using namespace sfem;

namespace {

// Letters used by these tests, one user action each, then the gap slot. Kept
// under twenty actions so distinct one-hots stay apart at vigilance 0.9.
const std::string kLetters = "abcdefghijxyz";
const ChannelDims kDims{kLetters.size() + 1, 0, 0, 0};

NetworkInput action(std::size_t i) {
    auto in = NetworkInput::zeros(kDims, InputKind::Context);
    in.user[i] = 1.0;
    return in;
}

struct Fixture {
    Network net;
    std::map<char, std::size_t> ev;
    double t = 0.0;

    explicit Fixture(NetworkParams p = {}) : net(kDims, [&] { p.gap_user_index = kLetters.size(); return p; }()) {}

    std::size_t see(char c) {
        const auto e = net.observe_event(action(kLetters.find(c)), t);
        t += 1.0;
        ev[c] = e;
        return e;
    }
    Episode ep(const std::string& s) {
        Episode out;
        for (char c : s) {
            if (!ev.count(c)) see(c);
            out.events.push_back(ev.at(c));
        }
        return out;
    }
    std::vector<std::size_t> cue(char c) {
        if (!ev.count(c)) see(c);
        return {ev.at(c)};
    }
};

} // namespace

TEST_CASE("event layer") {
    Network net(kDims);
    const auto first = net.observe_event(action(0), 0.0);
    CHECK(net.observe_event(action(0), 1.0) == first);
    CHECK(net.observe_event(action(1), 2.0) != first);
    CHECK(net.buffer().size() == 3);
    CHECK(net.current_code().values.size() == 2);
}

TEST_CASE("input exclusivity is enforced") {
    const ChannelDims dims{2, 1, 2, 2};
    auto ctx = NetworkInput::zeros(dims, InputKind::Context);
    ctx.user[0] = 1.0;
    ctx.dev_event[1] = 1.0;
    CHECK_THROWS_AS(ctx.validate(dims), std::invalid_argument);
    auto svc = NetworkInput::zeros(dims, InputKind::Service);
    svc.dev_event[0] = 1.0;
    CHECK_NOTHROW(svc.validate(dims));
    svc.env[0] = 0.5;
    CHECK_THROWS_AS(svc.validate(dims), std::invalid_argument);
    CHECK_THROWS_AS(NetworkInput::zeros(ChannelDims{1, 1, 2, 2}, InputKind::Context).validate(dims),
                    std::invalid_argument);

    Network net(dims);
    auto s = NetworkInput::zeros(dims, InputKind::Service);
    s.dev_event[1] = 1.0;
    CHECK(net.event_kind(net.observe_event(s, 0.0)) == InputKind::Service);
    CHECK(net.event_kind(net.observe_event(NetworkInput::zeros(dims, InputKind::Context), 0.0)) == InputKind::Context);
}

TEST_CASE("working buffer") {
    WorkingBuffer buf(2);
    buf.push({0, 1.0});
    buf.push({1, 2.0});
    buf.push({2, 3.0});
    CHECK(buf.size() == 2);
    CHECK(buf.entries()[0].event == 1);
    CHECK_THROWS_AS(buf.push({3, 0.5}), std::invalid_argument);
}

TEST_CASE("learning episodes") {
    Fixture fx;
    const auto id = fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
    REQUIRE(id);
    const auto again = fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
    CHECK(again == id);
    CHECK(fx.net.episode_nodes().size() == 1);
    CHECK(fx.net.find(*id)->strength == doctest::Approx(0.82));

    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    CHECK(fx.net.ordinary_count() == 2);
    CHECK_THROWS_AS(fx.net.learn_episode(fx.ep("a"), Polarity::Ordinary), std::invalid_argument);
}

TEST_CASE("negative memories are frozen and never pruned") {
    Fixture fx;
    const auto neg = fx.net.learn_episode(fx.ep("xyz"), Polarity::Negative);
    REQUIRE(neg);
    for (int k = 0; k < 500; ++k) fx.net.learn_episode(fx.ep(k % 2 ? "abcd" : "efg"), Polarity::Ordinary);
    const auto* node = fx.net.find(*neg);
    REQUIRE(node);
    CHECK(node->strength == doctest::Approx(0.8));
    CHECK(node->vigilance == doctest::Approx(0.9));
    CHECK_THROWS_AS(fx.net.apply_feedback(*neg, 2.0), std::invalid_argument);
}

TEST_CASE("partial-cue retrieval") {
    Fixture fx;
    fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    auto got = fx.net.retrieve_service(fx.cue('a'));
    REQUIRE(got);
    CHECK(got->episode == fx.ep("abcd").events);

    fx.see('z');
    CHECK_FALSE(fx.net.retrieve_service(fx.cue('z')).has_value());
    CHECK_THROWS_AS(fx.net.retrieve_service(std::vector<std::size_t>{}), std::invalid_argument);
}

TEST_CASE("negative memory redirects retrieval") {
    Fixture fx;
    fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("ehij"), Polarity::Ordinary);
    // Without blocking the shorter routine wins the cue.
    CHECK(fx.net.retrieve_service(fx.cue('e'))->episode == fx.ep("efg").events);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Negative);
    CHECK(fx.net.retrieve_service(fx.cue('e'))->episode == fx.ep("ehij").events);
    // An ordinary copy of a rejected routine is refused.
    CHECK_FALSE(fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary).has_value());
}

TEST_CASE("everything blocked means no service") {
    Fixture fx;
    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Negative);
    CHECK_FALSE(fx.net.retrieve_service(fx.cue('e')).has_value());
}

TEST_CASE("shorter episode gets the larger activation") {
    Fixture fx;
    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("ehij"), Polarity::Ordinary);
    const auto t = fx.net.retrieval_activations(fx.cue('e'));
    REQUIRE(t.size() == 2);
    CHECK(t[0] > t[1]);
}

TEST_CASE("feedback on episodes") {
    SUBCASE("strong positive lowers vigilance and lifts the activation coefficient") {
        Fixture fx;
        const auto id = *fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
        const auto before = fx.net.retrieval_activations(fx.cue('a'))[0];
        const auto r = fx.net.apply_feedback(id, 2.0);
        CHECK(r.vigilance == doctest::Approx(0.855));
        CHECK(fx.net.retrieval_activations(fx.cue('a'))[0] == doctest::Approx(before * 0.9 / 0.855));
    }
    SUBCASE("weak positive reinforces and keeps vigilance") {
        Fixture fx;
        const auto id = *fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
        const auto r = fx.net.apply_feedback(id, 1.0);
        CHECK(r.strength == doctest::Approx(0.82));
        CHECK(r.vigilance == doctest::Approx(0.9));
    }
    SUBCASE("two negatives then one missed activation delete the episode") {
        Fixture fx;
        const auto id = *fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
        fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
        const auto first = fx.net.apply_feedback(id, -1.0);
        CHECK(first.strength > 0.5);
        CHECK(first.negative_node.has_value());
        const auto second = fx.net.apply_feedback(id, -1.0);
        const double delta = strength::effective_decay(fx.net.params().strength, 2);
        CHECK(second.strength == doctest::Approx(0.1 / (1.0 - delta)));
        CHECK(fx.net.find(id) != nullptr);
        fx.net.retrieve_service(fx.cue('e'));
        CHECK(fx.net.find(id) == nullptr);
        CHECK(fx.net.last_pruned() == std::vector<std::size_t>{id});
    }
    SUBCASE("feedback replaces the reactivation of the serve it rates") {
        Fixture fx;
        const auto id = *fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
        const double before = fx.net.find(id)->strength;
        fx.net.retrieve_service(fx.cue('a'));
        CHECK(fx.net.find(id)->strength > before);
        const auto r = fx.net.apply_feedback(id, 1.0);
        CHECK(r.strength == doctest::Approx(before + (1.0 - before) * 0.1));
    }
    SUBCASE("disabled feedback changes nothing") {
        NetworkParams p;
        p.feedback_enabled = false;
        p.negative_memory_enabled = false;
        Fixture fx(p);
        const auto id = *fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
        const auto r = fx.net.apply_feedback(id, -1.0);
        CHECK_FALSE(r.modulated);
        CHECK(fx.net.find(id)->strength == doctest::Approx(0.8));
        CHECK(fx.net.episode_nodes().size() == 1);
    }
    Fixture fx;
    CHECK_THROWS_AS(fx.net.apply_feedback(42, 1.0), std::out_of_range);
}

TEST_CASE("property: uniform vigilance scaling keeps the retrieval winner") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> letter(0, 9);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Fixture fx;
        for (int k = 0; k < 4; ++k) {
            std::string s;
            while (s.size() < 3) {
                const char c = static_cast<char>('a' + letter(rng));
                if (s.find(c) == std::string::npos) s += c;
            }
            fx.net.learn_episode(fx.ep(s), Polarity::Ordinary);
        }
        auto doc = fx.net.to_json();
        for (auto& n : doc["episode_nodes"]) n["vigilance"] = u(rng);
        const Network base = Network::from_json(doc);
        const double scale = 0.5 + 0.5 * u(rng);
        for (auto& n : doc["episode_nodes"]) n["vigilance"] = n["vigilance"].get<double>() * scale;
        const Network scaled = Network::from_json(doc);
        for (const auto& [c, _] : fx.ev) {
            CHECK(art::compete(base.retrieval_activations(fx.cue(c))) ==
                  art::compete(scaled.retrieval_activations(fx.cue(c))));
        }
    }
}

TEST_CASE("property: strengths stay in range and no ordinary node survives at theta") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> letter(0, 9), kind(0, 3);
    Fixture fx;
    for (int step = 0; step < 400; ++step) {
        std::string s;
        while (s.size() < 3) {
            const char c = static_cast<char>('a' + letter(rng));
            if (s.find(c) == std::string::npos) s += c;
        }
        switch (kind(rng)) {
        case 0: fx.net.learn_episode(fx.ep(s), Polarity::Ordinary); break;
        case 1: fx.net.retrieve_service(fx.cue(s[0])); break;
        case 2:
            if (fx.net.ordinary_count() > 0) {
                for (const auto& n : fx.net.episode_nodes()) {
                    if (n.polarity == Polarity::Ordinary) {
                        fx.net.apply_feedback(n.id, step % 3 == 0 ? -1.0 : 2.0);
                        break;
                    }
                }
            }
            break;
        default: fx.net.retrieve_service(fx.cue(s[1])); break;
        }
        for (const auto& n : fx.net.episode_nodes()) {
            CHECK(n.strength >= 0.0);
            CHECK(n.strength <= 1.0);
            CHECK(n.vigilance > 0.0);
            CHECK(n.vigilance <= 1.0);
            if (n.polarity == Polarity::Ordinary) CHECK(n.strength > fx.net.params().strength.theta);
        }
    }
}

TEST_CASE("snapshot round trip") {
    Fixture fx;
    fx.net.learn_episode(fx.ep("abcd"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Ordinary);
    fx.net.learn_episode(fx.ep("efg"), Polarity::Negative);
    fx.net.learn_episode(fx.ep("ehij"), Polarity::Ordinary);
    fx.net.retrieve_service(fx.cue('a'));

    const auto doc = fx.net.to_json();
    Network copy = Network::from_json(doc);
    CHECK(copy.to_json() == doc);
    for (char c : std::string("aeh")) {
        const auto x = fx.net.retrieve_service(fx.cue(c));
        const auto y = copy.retrieve_service(fx.cue(c));
        REQUIRE(x.has_value() == y.has_value());
        if (x) CHECK(x->episode == y->episode);
    }
    CHECK(copy.to_json() == fx.net.to_json());

    auto bad = doc;
    bad["version"] = 99;
    CHECK_THROWS_AS(Network::from_json(bad), std::invalid_argument);
}
