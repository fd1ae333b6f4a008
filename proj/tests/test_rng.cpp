#include <catch2/catch_amalgamated.hpp>

#include "rgos/rng.hpp"

using namespace rgos;

TEST_CASE("equal (seed, stream) replays identically") {
    RngStream a(42, 3), b(42, 3);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
    RngStream a(42, 0), b(42, 1), c(43, 0);
    int equal_ab = 0, equal_ac = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uint64_t x = a.next_u64();
        equal_ab += (x == b.next_u64());
        equal_ac += (x == c.next_u64());
    }
    REQUIRE(equal_ab == 0);
    REQUIRE(equal_ac == 0);
}

TEST_CASE("uniform stays inside (0,1) and is roughly uniform") {
    RngStream rng(1, 0);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    double mean = sum / n;
    REQUIRE(std::fabs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("substreams are reproducible and distinct from parent") {
    RngStream root(9, 1);
    RngStream c1 = root.substream(5);
    RngStream c2 = root.substream(5);
    RngStream c3 = root.substream(6);
    REQUIRE(c1.next_u64() == c2.next_u64());
    REQUIRE(c1.next_u64() != c3.next_u64());
}
