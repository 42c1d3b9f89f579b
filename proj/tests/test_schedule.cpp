#include <array>
#include <cmath>

#include <doctest.h>

#include "ghz/schedule.hpp"

using namespace ghz;

TEST_CASE("default schedule windows") {
    Schedule s = build_default_schedule(1000, 42);
    CHECK(s.windows[0].setting == SettingVector::yyx);
    CHECK(s.windows[0].start == Tick{0});
    CHECK(s.windows[0].end == Tick{4294967296ull});
    CHECK(s.windows[1].setting == SettingVector::yxy);
    CHECK(s.windows[1].start.ticks == 4831838208ull);   // 1.125 units
    CHECK(s.windows[2].start.ticks == 9663676416ull);   // 2.25 units
    CHECK(s.windows[3].setting == SettingVector::xxx);
    CHECK(s.windows[3].start.ticks == 14495514624ull);  // 3.375 units
    CHECK(s.windows[3].end.ticks == 18790481920ull);    // 4.375 units
    CHECK_THROWS_AS(build_default_schedule(0, 42), std::invalid_argument);
}

TEST_CASE("measurement tick golden value") {
    // Frozen from the splitmix64 reference: mix64(42) mod 2^32.
    Schedule s = build_default_schedule(1000, 42);
    CHECK(measurement_tick(s, 0, 0).ticks == 803958421ull);
}

TEST_CASE("measurement ticks are deterministic and contained") {
    Schedule a = build_default_schedule(500, 987654321);
    Schedule b = build_default_schedule(500, 987654321);
    for (int w = 0; w < 4; ++w) {
        for (std::uint64_t n = 0; n < 500; ++n) {
            Tick t = measurement_tick(a, w, n);
            CHECK(t == measurement_tick(b, w, n));
            CHECK(a.windows[w].start <= t);
            CHECK(t < a.windows[w].end);
        }
    }
}

TEST_CASE("measurement tick rejects out-of-range indices") {
    Schedule s = build_default_schedule(10, 1);
    CHECK_THROWS_AS(measurement_tick(s, 4, 0), std::out_of_range);
    CHECK_THROWS_AS(measurement_tick(s, -1, 0), std::out_of_range);
    CHECK_THROWS_AS(measurement_tick(s, 0, 10), std::out_of_range);
}

TEST_CASE("window_for_tick") {
    Schedule s = build_default_schedule(10, 1);
    CHECK(window_for_tick(s, Tick{kTicksPerUnit / 2}) == 0);
    CHECK(window_for_tick(s, Tick{kTicksPerUnit + kTicksPerUnit / 16}) == std::nullopt);  // gap
    CHECK(window_for_tick(s, Tick{7 * kTicksPerUnit / 2}) == 3);
    CHECK(window_for_tick(s, Tick{100 * kTicksPerUnit}) == std::nullopt);
}

TEST_CASE("scheduled ticks are approximately uniform in the window") {
    // Chi-square over 16 equal bins, significance 1e-3 (critical value for
    // 15 degrees of freedom: 37.70).
    const std::uint64_t rounds = 10000;
    Schedule s = build_default_schedule(rounds, 20240817);
    for (int w = 0; w < 4; ++w) {
        std::array<std::uint64_t, 16> bins{};
        std::uint64_t span = s.windows[w].end.ticks - s.windows[w].start.ticks;
        for (std::uint64_t n = 0; n < rounds; ++n) {
            Tick t = measurement_tick(s, w, n);
            std::uint64_t offset = t.ticks - s.windows[w].start.ticks;
            bins[offset * 16 / span] += 1;
        }
        double expected = static_cast<double>(rounds) / 16.0;
        double chi2 = 0;
        for (std::uint64_t count : bins) {
            double d = static_cast<double>(count) - expected;
            chi2 += d * d / expected;
        }
        CHECK(chi2 < 37.70);
    }
}
