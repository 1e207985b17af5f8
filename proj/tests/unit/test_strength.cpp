#include "sfem/strength.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace sfem::strength;

namespace {

// Literal round-robin loop: start at s_init, then per round decay n - 1 times
// and reinforce once. Independent of the closed form on purpose.
double step_oracle(std::size_t T, std::size_t n, double s_init, double r, double delta) {
    double s = s_init;
    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t k = 0; k + 1 < n; ++k) s = s * (1.0 - delta);
        s = s + (1.0 - s) * r;
    }
    return s;
}

StrengthParams fixed(double r, double delta, double theta = 0.1) {
    StrengthParams p;
    p.mode = DecayMode::Fixed;
    p.r = r;
    p.delta = delta;
    p.theta = theta;
    return p;
}

} // namespace

TEST_CASE("strength updates") {
    const auto p = fixed(0.1, 0.01);
    CHECK(update_strength(0.3, StrengthEvent::Created, p, 5) == doctest::Approx(0.8));
    CHECK(update_strength(0.5, StrengthEvent::Reactivated, p, 5) == doctest::Approx(0.55));
    CHECK(update_strength(0.5, StrengthEvent::Decayed, p, 5) == doctest::Approx(0.495));
}

TEST_CASE("closed form against the step oracle") {
    CHECK(closed_form_strength(1, 10, 0.8, 0.1, 0.01) == doctest::Approx(0.8));
    CHECK(closed_form_strength(2, 10, 0.8, 0.1, 0.01) == doctest::Approx(0.75773).epsilon(1e-5));
    CHECK(step_oracle(2, 10, 0.8, 0.1, 0.01) == doctest::Approx(0.75773).epsilon(1e-5));
    CHECK(closed_form_strength(5000, 10, 0.8, 0.1, 0.01) == doctest::Approx(0.5623).epsilon(1e-4));

    for (std::size_t n : {10u, 20u, 50u, 100u}) {
        for (double delta : {0.01, 0.05}) {
            for (double r : {0.05, 0.1}) {
                for (std::size_t T = 1; T <= 1000; T += 37) {
                    const double a = closed_form_strength(T, n, 0.8, r, delta);
                    const double b = step_oracle(T, n, 0.8, r, delta);
                    CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
                }
            }
        }
    }
    CHECK_THROWS_AS(closed_form_strength(3, 10, 0.8, 0.0, 0.0), DegenerateError);
}

TEST_CASE("terminal values") {
    CHECK(terminal_value(10, 0.10, 0.01) == doctest::Approx(0.5623).epsilon(1e-4));
    CHECK(terminal_value(100, 0.05, 0.05) == doctest::Approx(0.0503).epsilon(1e-3));
    CHECK(terminal_value(50, 0.05, 0.01) == doctest::Approx(0.1192).epsilon(1e-3));
}

TEST_CASE("adaptive initial decay") {
    CHECK(adaptive_delta_init(0.8, 0.1) == doctest::Approx(std::log(0.72 / 0.7)).epsilon(1e-12));
    CHECK(adaptive_delta_init(0.8, 0.1) == doctest::Approx(0.0281709).epsilon(1e-6));
    CHECK(adaptive_delta_init(0.8, 0.05) == doctest::Approx(0.0132453).epsilon(1e-6));
    CHECK(adaptive_delta_init(0.8, 0.0) == 0.0);
    CHECK_THROWS_AS(adaptive_delta_init(0.1, 0.1), std::domain_error);

    StrengthParams p;
    CHECK(effective_decay(p, 1) == adaptive_delta_init(0.8, 0.1));
    CHECK(effective_decay(p, 11) == doctest::Approx(adaptive_delta_init(0.8, 0.1) / 10));
}

TEST_CASE("pruning is inclusive") {
    std::map<std::size_t, double> s{{1, 0.05}, {2, 0.5}};
    CHECK(prune(s, 0.1) == std::vector<std::size_t>{1});
    CHECK(s.size() == 1);
    std::map<std::size_t, double> edge{{1, 0.1}};
    CHECK(prune(edge, 0.1) == std::vector<std::size_t>{1});
    std::map<std::size_t, double> empty;
    CHECK(prune(empty, 0.1).empty());
}

TEST_CASE("property: adaptive decay keeps a regularly used memory near s_init") {
    for (double r : {0.05, 0.1}) {
        for (std::size_t n : {10u, 20u, 50u, 100u}) {
            StrengthParams p;
            p.r = r;
            double s = p.s_init;
            for (int it = 0; it < 1000; ++it) {
                for (std::size_t k = 0; k + 1 < n; ++k) {
                    s = update_strength(s, StrengthEvent::Decayed, p, n);
                    CHECK(s > p.theta);
                }
                s = update_strength(s, StrengthEvent::Reactivated, p, n);
                CHECK(s <= p.s_init + 1e-12);
                CHECK(s >= p.s_init - 0.01);
            }
        }
    }
}

TEST_CASE("property: fixed decay converges monotonically to the terminal value") {
    for (std::size_t n : {10u, 20u, 50u, 100u}) {
        for (double delta : {0.01, 0.05}) {
            for (double r : {0.05, 0.1}) {
                const double limit = terminal_value(n, r, delta);
                double prev = std::abs(closed_form_strength(1, n, 0.8, r, delta) - limit);
                for (std::size_t T = 2; T <= 400; ++T) {
                    const double gap = std::abs(closed_form_strength(T, n, 0.8, r, delta) - limit);
                    CHECK(gap <= prev + 1e-15);
                    prev = gap;
                }
                CHECK(prev < 1e-3);
            }
        }
    }
}

TEST_CASE("property: updates stay within [0, 1]") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> ev(0, 2);
    for (int trial = 0; trial < 2000; ++trial) {
        auto p = fixed(u(rng), u(rng), 0.0);
        const double s = update_strength(u(rng), static_cast<StrengthEvent>(ev(rng)), p, 1 + trial % 50);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}
