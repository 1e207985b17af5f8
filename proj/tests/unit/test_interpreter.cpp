#include "sfem/interpreter.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>

using namespace sfem;
using namespace sfem::interp;

namespace {

EnvVariable illumination() {
    return {"illumination", "lux", 0.0, 1000.0, {{"dark", 0.0, 0.0, 1000.0}, {"bright", 0.0, 1000.0, 1000.0}}};
}

EnvVariable temperature() {
    return {"temperature", "C", 10.0, 34.0,
            {{"cold", 10.0, 10.0, 22.0}, {"mild", 10.0, 22.0, 34.0}, {"hot", 22.0, 34.0, 34.0}}};
}

Catalog home() {
    return Catalog({"enter_kitchen", "open_fridge", "sit_down"}, {illumination(), temperature()},
                   {Device{"light", {"off", "on"}, {{"on", "on"}, {"off", "off"}}},
                    Device{"cup", {"in-use", "in-sink"}, {{"move-cup-to-sink", "in-sink"}, {"ping", std::nullopt}}}});
}

EventRecord rec(double t, RecordKind k, std::string name, std::optional<double> value = std::nullopt,
                std::optional<double> xi = std::nullopt) {
    return {t, k, std::move(name), value, xi};
}

void check_values(const art::Vector& got, const std::vector<double>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
}

} // namespace

TEST_CASE("catalog layout") {
    const auto c = home();
    CHECK(c.user_actions().back() == kTimeGapLabel);
    CHECK(c.gap_index() == 3);
    CHECK(c.dims() == ChannelDims{4, 5, 4, 4});
    CHECK(c.event_index("cup", "move-cup-to-sink") == 2);
    CHECK(c.event_at(2) == std::pair<std::string, std::string>{"cup", "move-cup-to-sink"});
    CHECK_THROWS_AS(c.event_at(9), std::out_of_range);
}

TEST_CASE("catalog validation") {
    CHECK_THROWS_AS(Catalog({"a", "a"}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Catalog({"time_gap"}, {}, {}), std::invalid_argument);
    EnvVariable single = illumination();
    single.levels.pop_back();
    CHECK_THROWS_AS(Catalog({"a"}, {single}, {}), std::invalid_argument);
    EnvVariable holey = illumination();
    holey.levels = {{"dark", 0.0, 0.0, 300.0}, {"bright", 600.0, 1000.0, 1000.0}};
    CHECK_THROWS_AS(Catalog({"a"}, {holey}, {}), std::invalid_argument);
    CHECK_THROWS_AS(Catalog({"a"}, {}, {Device{"d", {"x"}, {{"go", "nowhere"}}}}), std::invalid_argument);
}

TEST_CASE("user actions are one-hot") {
    const auto c = home();
    check_values(encode_user_action("open_fridge", c), {0, 1, 0, 0});
    check_values(encode_user_action(kTimeGapLabel, c), {0, 0, 0, 1});
    try {
        encode_user_action("dance", c);
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("dance") != std::string::npos);
        CHECK(msg.find("enter_kitchen, open_fridge, sit_down") != std::string::npos);
    }
}

TEST_CASE("environment fuzzification") {
    const Catalog c({"a"}, {illumination()}, {});
    check_values(fuzzify_environment({{"illumination", 0.0}}, c), {1.0, 0.0});
    check_values(fuzzify_environment({{"illumination", 500.0}}, c), {0.5, 0.5});
    check_values(fuzzify_environment({{"illumination", 1000.0}}, c), {0.0, 1.0});
    check_values(fuzzify_environment({}, c), {0.0, 0.0});

    const Catalog t({"a"}, {temperature()}, {});
    check_values(fuzzify_environment({{"temperature", 10.0}}, t), {1, 0, 0});
    check_values(fuzzify_environment({{"temperature", 22.0}}, t), {0, 1, 0});
    check_values(fuzzify_environment({{"temperature", 34.0}}, t), {0, 0, 1});

    std::vector<std::string> warnings;
    check_values(fuzzify_environment({{"temperature", 50.0}}, t, &warnings), {0, 0, 1});
    CHECK(warnings.size() == 1);
    CHECK_THROWS_AS(fuzzify_environment({{"humidity", 3.0}}, t), std::invalid_argument);
}

TEST_CASE("property: fuzzified readings vary continuously") {
    const Catalog t({"a"}, {temperature()}, {});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(10.0, 34.0);
    for (int k = 0; k < 500; ++k) {
        const double x = u(rng);
        const auto lo = fuzzify_environment({{"temperature", x}}, t);
        const auto hi = fuzzify_environment({{"temperature", std::min(34.0, x + 1e-6)}}, t);
        for (std::size_t i = 0; i < lo.size(); ++i) {
            CHECK(std::abs(lo[i] - hi[i]) < 1e-6);
            CHECK(lo[i] >= 0.0);
            CHECK(lo[i] <= 1.0);
        }
    }
}

TEST_CASE("device states and events") {
    const auto c = home();
    check_values(encode_device_state({{"light", "on"}, {"cup", "in-use"}}, c), {0, 1, 1, 0});
    check_values(encode_device_state({{"cup", "in-sink"}}, c), {0, 0, 0, 1});
    check_values(encode_device_event("light", "off", c), {0, 1, 0, 0});
    CHECK_THROWS_AS(encode_device_state({{"light", "dim"}}, c), std::invalid_argument);
    CHECK_THROWS_AS(encode_device_event("oven", "on", c), std::invalid_argument);
    CHECK(split_device_label("cup:in-use") == std::pair<std::string, std::string>{"cup", "in-use"});
    CHECK_THROWS_AS(split_device_label("cup"), std::invalid_argument);
}

TEST_CASE("record kinds") {
    for (auto k : {RecordKind::UserAction, RecordKind::EnvReading, RecordKind::DeviceState, RecordKind::DeviceEvent,
                   RecordKind::Feedback}) {
        CHECK(record_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS(record_kind_from_string("gesture"), std::invalid_argument);
}

TEST_CASE("interpreter keeps a snapshot and respects exclusivity") {
    const auto c = home();
    Interpreter in(c);
    const auto dims = c.dims();

    auto x = in.interpret(rec(0, RecordKind::EnvReading, "illumination", 0.0));
    REQUIRE(x);
    CHECK(x->kind == InputKind::Context);
    x->validate(dims);

    in.interpret(rec(1, RecordKind::DeviceState, "light:off"));
    x = in.interpret(rec(2, RecordKind::UserAction, "enter_kitchen"));
    REQUIRE(x);
    x->validate(dims);
    check_values(x->user, {1, 0, 0, 0});
    check_values(x->env, {1, 0, 0, 0, 0});
    check_values(x->dev_state, {1, 0, 0, 0});

    x = in.interpret(rec(3, RecordKind::DeviceEvent, "light:on"));
    REQUIRE(x);
    CHECK(x->kind == InputKind::Service);
    x->validate(dims);
    check_values(x->dev_event, {1, 0, 0, 0});
    CHECK(in.device_states().at("light") == "on");

    in.interpret(rec(4, RecordKind::DeviceEvent, "cup:ping"));
    CHECK(in.device_states().count("cup") == 0);

    CHECK_FALSE(in.interpret(rec(5, RecordKind::Feedback, "", std::nullopt, 2.0)).has_value());
    CHECK_THROWS_AS(in.interpret(rec(5, RecordKind::Feedback, "")), std::invalid_argument);

    in.interpret(rec(6, RecordKind::EnvReading, "illumination", 4000.0));
    CHECK(in.env_readings().at("illumination") == 1000.0);
    CHECK(in.warnings().size() == 1);
}

TEST_CASE("errors echo the offending record") {
    Interpreter in(home());
    try {
        in.interpret(rec(12, RecordKind::DeviceState, "light:dim"));
        FAIL("expected an error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("light:dim") != std::string::npos);
        CHECK(msg.find("off, on") != std::string::npos);
    }
    CHECK_THROWS_AS(in.interpret(rec(0, RecordKind::EnvReading, "illumination")), std::invalid_argument);
}

TEST_CASE("noise is seeded") {
    auto run = [](std::uint64_t seed) {
        Interpreter in(home());
        in.enable_noise(20.0, seed);
        in.interpret(rec(0, RecordKind::EnvReading, "illumination", 500.0));
        return in.env_readings().at("illumination");
    };
    CHECK(run(3) == run(3));
    CHECK(run(3) != run(4));
    Interpreter in(home());
    CHECK_THROWS_AS(in.enable_noise(-1.0, 1), std::invalid_argument);
}
