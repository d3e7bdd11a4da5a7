#include <sstream>
#include <vector>

#include "doctest.h"
#include "isingmdp/lattice.hpp"
#include "support.hpp"

using namespace isingmdp;

TEST_SUITE("lattice") {

TEST_CASE("lattice validates side and field") {
    CHECK_THROWS_AS(Lattice(3), std::invalid_argument);
    CHECK_THROWS_AS(Lattice(8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Lattice(8, 1.0), std::invalid_argument);
    CHECK_NOTHROW(Lattice(4, 0.5));
    const Lattice lat(5);
    CHECK(lat.site_count() == 25);
    CHECK(lat.wrap(-1, 5) == Site{4, 0});
}

TEST_CASE("neighbors wrap around the torus") {
    const Lattice lat(4);
    const auto nb = lat.neighbors(lat.index({0, 0}));
    CHECK(nb[0] == lat.index({3, 0}));
    CHECK(nb[1] == lat.index({1, 0}));
    CHECK(nb[2] == lat.index({0, 3}));
    CHECK(nb[3] == lat.index({0, 1}));
}

TEST_CASE("torus distance") {
    CHECK(torus_distance({0, 0}, {0, 0}, 32) == 0);
    CHECK(torus_distance({0, 0}, {31, 0}, 32) == 1);
    CHECK(torus_distance({0, 0}, {3, 4}, 5) == 3);
    CHECK(torus_distance({3, 4}, {0, 0}, 5) == 3);
}

TEST_CASE("set distance") {
    const std::vector<Site> origin{{0, 0}};
    CHECK(set_distance(origin, origin, 32) == 0);
    const std::vector<Site> pair{{0, 3}, {2, 2}};
    CHECK(set_distance(origin, pair, 8) == 3);
    CHECK_THROWS(set_distance(std::vector<Site>{}, origin, 8));

    // Stripes on columns 0..2 and 16..18 leave 13 free columns on each side,
    // so their nearest sites are 14 apart.
    std::vector<Site> a, b;
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 3; ++c) {
            a.push_back({r, c});
            b.push_back({r, 16 + c});
        }
    }
    CHECK(set_distance(a, b, 32) == 14);
    CHECK(interval_distance(0, 3, 16, 3, 32) == 14);
    CHECK(interval_distance(0, 3, 2, 3, 32) == 0);
    CHECK(interval_distance(0, 3, 30, 1, 32) == 2);
}

TEST_CASE("hamiltonian") {
    const Lattice lat(4, 0.5);
    CHECK(hamiltonian(SpinConfiguration::all_minus(lat)) == doctest::Approx(-56));
    CHECK(hamiltonian(SpinConfiguration::all_plus(lat)) == doctest::Approx(-72));
    CHECK(hamiltonian(flip(SpinConfiguration::all_minus(lat), {0, 0})) == doctest::Approx(-41));
}

TEST_CASE("energy delta") {
    const Lattice lat(4, 0.5);
    auto two_plus = SpinConfiguration::all_minus(lat);
    two_plus.set({0, 1}, 1);
    two_plus.set({1, 0}, 1);
    CHECK(energy_delta(two_plus, {0, 0}) == doctest::Approx(-1));

    auto pair = SpinConfiguration::all_minus(lat);
    pair.set({0, 0}, 1);
    pair.set({0, 1}, 1);
    CHECK(energy_delta(pair, {0, 0}) == doctest::Approx(-7));

    auto single = SpinConfiguration::all_minus(lat);
    single.set({0, 1}, 1);
    CHECK(energy_delta(single, {0, 0}) == doctest::Approx(7));
}

TEST_CASE("energy delta equals the hamiltonian difference") {
    Rng rng = make_stream(7, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto sigma = testing::random_configuration(6, 0.4, rng);
        const Site s{static_cast<int>(uniform_index(rng, 6)), static_cast<int>(uniform_index(rng, 6))};
        CHECK(energy_delta(sigma, s) == doctest::Approx(hamiltonian(flip(sigma, s)) - hamiltonian(sigma)));
    }
}

TEST_CASE("flip is an involution and plus_count tracks spins") {
    const Lattice lat(4);
    CHECK(flip(SpinConfiguration::all_minus(lat), {0, 0}).plus_count() == 1);
    CHECK(flip(SpinConfiguration::all_plus(lat), {2, 3}).plus_count() == 15);
    Rng rng = make_stream(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto sigma = testing::random_configuration(8, 0.5, rng);
        const Site s{static_cast<int>(uniform_index(rng, 8)), static_cast<int>(uniform_index(rng, 8))};
        CHECK(flip(flip(sigma, s), s) == sigma);
        int count = 0;
        for (auto v : sigma.spins()) count += v > 0;
        CHECK(count == sigma.plus_count());
    }
}

TEST_CASE("fill_plus wraps") {
    auto sigma = SpinConfiguration::all_minus(Lattice(6));
    sigma.fill_plus(5, 5, 2, 2);
    CHECK(sigma.plus_count() == 4);
    CHECK(sigma.is_plus(Site{0, 0}));
    CHECK(sigma.is_plus(Site{5, 0}));
    CHECK(sigma.is_plus(Site{0, 5}));
}

TEST_CASE("set rejects values other than +-1") {
    auto sigma = SpinConfiguration::all_minus(Lattice(4));
    CHECK_THROWS(sigma.set({0, 0}, 0));
}

TEST_CASE("pgm and ascii round trips") {
    Rng rng = make_stream(3, 0);
    const auto sigma = testing::random_configuration(7, 0.5, rng);
    std::stringstream pgm;
    write_pgm(pgm, sigma);
    CHECK(pgm.str().rfind("P2\n", 0) == 0);
    CHECK(read_pgm(pgm) == sigma);

    std::vector<std::string> rows;
    std::istringstream text(to_ascii(sigma));
    for (std::string line; std::getline(text, line);) rows.push_back(line);
    CHECK(from_ascii(rows) == sigma);
}

}
