#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "gossim/rng.hpp"
#include "gossim/threshold.hpp"

using namespace gossim;

namespace {

ThresholdState make_state(double base, double sigma, std::uint64_t delta) {
    ThresholdState s;
    s.base = base;
    s.sigma = sigma;
    s.delta = delta;
    return s;
}

// Independent evaluator: folds a stimulus schedule through the piecewise
// linear model in extended precision.
long double oracle_value(double base, double sigma, std::uint64_t delta,
                         const std::vector<std::uint64_t>& stim_times,
                         std::uint64_t query) {
    long double level = base;
    bool stimulated = false;
    std::uint64_t last = 0;
    auto value_at = [&](std::uint64_t t) -> long double {
        if (!stimulated || delta == 0) return base;
        std::uint64_t elapsed = t - last;
        if (elapsed >= delta) return base;
        return base + (level - base) *
                          (1.0L - (long double)elapsed / (long double)delta);
    };
    for (std::uint64_t t : stim_times) {
        long double bumped = value_at(t) + (long double)sigma;
        level = bumped > 1.0L ? 1.0L : bumped;
        last = t;
        stimulated = true;
    }
    return value_at(query);
}

} // namespace

TEST_CASE("linear decay endpoints and midpoint") {
    auto s = make_state(0.2, 0.5, 1000);
    s.stimulate(0);
    CHECK(s.value_at(0) == Catch::Approx(0.7).epsilon(1e-12));
    CHECK(s.value_at(500) == Catch::Approx(0.45).epsilon(1e-12));
    CHECK(s.value_at(1000) == 0.2);
    CHECK(s.value_at(5000) == 0.2);
}

TEST_CASE("unstimulated state sits exactly at the base") {
    auto s = make_state(0.37, 0.5, 1000);
    for (std::uint64_t t : {0ull, 1ull, 999ull, 1000000ull})
        CHECK(s.value_at(t) == 0.37);
}

TEST_CASE("value is capped at one") {
    auto s = make_state(0.8, 0.5, 1000);
    s.stimulate(0);
    CHECK(s.value_at(0) == 1.0);
}

TEST_CASE("a stimulus compounds on the partially decayed value") {
    auto s = make_state(0.2, 0.5, 1000);
    s.stimulate(0);
    s.stimulate(500); // current value 0.45, bumped to 0.95
    CHECK(s.level_at_last_stim == Catch::Approx(0.95).epsilon(1e-12));
    // halfway through the restarted decay: 0.2 + 0.75 * (1 - 500/1000)
    CHECK(s.value_at(1000) == Catch::Approx(0.575).epsilon(1e-12));
}

TEST_CASE("two stimuli at the same instant hit the cap") {
    auto s = make_state(0.2, 0.5, 1000);
    s.stimulate(100);
    s.stimulate(100);
    CHECK(s.value_at(100) == 1.0);
}

TEST_CASE("decay completes after delta steps") {
    auto s = make_state(0.2, 0.5, 1000);
    s.stimulate(42);
    CHECK(s.value_at(42 + 1000) == 0.2);
    CHECK(s.value_at(42 + 1001) == 0.2);
}

TEST_CASE("delta zero makes stimuli inert") {
    auto s = make_state(0.3, 0.5, 0);
    s.stimulate(10);
    CHECK(s.value_at(10) == 0.3);
    CHECK(s.value_at(11) == 0.3);
}

TEST_CASE("randomized schedules match the fold oracle") {
    Rng rng(2024);
    for (int iter = 0; iter < 20000; ++iter) {
        double base = 0.01 + 0.98 * rng.next_unit();
        double sigma = rng.next_unit();
        std::uint64_t delta = rng.next_below(2000);
        auto s = make_state(base, sigma, delta);
        std::vector<std::uint64_t> stim_times;
        std::uint64_t t = 0;
        int stimuli = int(rng.next_below(6));
        for (int k = 0; k < stimuli; ++k) {
            t += rng.next_below(800);
            stim_times.push_back(t);
            s.stimulate(t);
        }
        std::uint64_t query = t + rng.next_below(2500);
        double got = s.value_at(query);
        long double want = oracle_value(base, sigma, delta, stim_times, query);
        CHECK(std::abs((long double)got - want) < 1e-12L);
        CHECK(got >= base);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("value decays monotonically between stimuli") {
    auto s = make_state(0.25, 0.6, 700);
    s.stimulate(50);
    double prev = s.value_at(50);
    for (std::uint64_t t = 51; t <= 800; ++t) {
        double v = s.value_at(t);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(prev == 0.25);
}

TEST_CASE("a stimulus never lowers the value at its own instant") {
    Rng rng(5);
    for (int iter = 0; iter < 2000; ++iter) {
        auto s = make_state(0.1 + 0.8 * rng.next_unit(), rng.next_unit(),
                            1 + rng.next_below(1000));
        std::uint64_t t = rng.next_below(500);
        s.stimulate(t);
        std::uint64_t t2 = t + rng.next_below(1500);
        double before = s.value_at(t2);
        s.stimulate(t2);
        CHECK(s.value_at(t2) >= before);
    }
}

TEST_CASE("pairwise keys are independent in the table") {
    ThresholdTable table(Keying::source_receiver, 0.2, 0.5, 1000);
    auto key_a = ThresholdTable::pair_key(3, 7);
    auto key_b = ThresholdTable::pair_key(7, 3);
    auto key_c = ThresholdTable::pair_key(3, 8);
    std::vector<double> before;
    for (std::uint64_t t : {0ull, 100ull, 900ull}) {
        before.push_back(table.value(key_b, t));
        before.push_back(table.value(key_c, t));
    }
    table.stimulate(key_a, 0);
    std::size_t i = 0;
    for (std::uint64_t t : {0ull, 100ull, 900ull}) {
        CHECK(table.value(key_b, t) == before[i++]);
        CHECK(table.value(key_c, t) == before[i++]);
    }
    CHECK(table.value(key_a, 0) == Catch::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("absent table keys behave as fresh states at base") {
    ThresholdTable table(Keying::receiver, 0.42, 0.2, 300);
    CHECK(table.value(12345, 0) == 0.42);
    CHECK(table.value(12345, 99999) == 0.42);
    CHECK(table.materialized_entries() == 0);
}
