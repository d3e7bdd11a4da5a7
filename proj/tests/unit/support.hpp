#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "isingmdp/lattice.hpp"
#include "isingmdp/rng.hpp"

namespace testing {

inline isingmdp::SpinConfiguration random_configuration(int n, double plus_fraction, isingmdp::Rng& rng) {
    auto sigma = isingmdp::SpinConfiguration::all_minus(isingmdp::Lattice(n));
    for (int i = 0; i < sigma.lattice().site_count(); ++i) {
        if (isingmdp::uniform01(rng) < plus_fraction) sigma.flip_in_place(i);
    }
    return sigma;
}

// |observed fraction - p| within k binomial standard deviations.
inline bool within_sigma(std::int64_t hits, std::int64_t trials, double p, double k = 3.0) {
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return std::abs(static_cast<double>(hits) / static_cast<double>(trials) - p) <= k * sd;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("isingmdp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing
