#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "isingmdp/lattice.hpp"
#include "isingmdp/rng.hpp"

namespace isingmdp {

using Rational = boost::multiprecision::cpp_rational;

struct ToRobust {};

/// kappa raw Metropolis proposals (rejections included).
struct Capped {
    std::uint64_t kappa = 1;
};

using RelaxationMode = std::variant<ToRobust, Capped>;

std::string describe(const RelaxationMode& mode);

/// A plus site with at most one plus neighbour, or a minus site with at
/// least two. Equivalent to energy_delta <= 0 for h in (0, 1).
inline bool is_susceptible(const SpinConfiguration& sigma, int idx) noexcept {
    const int plus = sigma.plus_neighbors(idx);
    return sigma.is_plus(idx) ? plus <= 1 : plus >= 2;
}

std::vector<Site> susceptible_sites(const SpinConfiguration& sigma);
bool is_robust(const SpinConfiguration& sigma);

/// One raw proposal: uniform site, flipped iff energy_delta <= 0.
/// Returns true when a flip happened.
bool metropolis_step_in_place(SpinConfiguration& sigma, Rng& rng);
SpinConfiguration metropolis_step(const SpinConfiguration& sigma, Rng& rng);

/// Susceptible set kept current under single flips. Only the flipped site
/// and its four neighbours can change status.
class SusceptibleSet {
public:
    explicit SusceptibleSet(const SpinConfiguration& sigma);

    int size() const noexcept { return static_cast<int>(members_.size()); }
    bool empty() const noexcept { return members_.empty(); }
    int at(int k) const noexcept { return members_[static_cast<std::size_t>(k)]; }
    bool contains(int idx) const noexcept { return pos_[static_cast<std::size_t>(idx)] >= 0; }

    /// Flips idx in sigma and refreshes the affected entries.
    void flip(SpinConfiguration& sigma, int idx);

private:
    void refresh(const SpinConfiguration& sigma, int idx);
    void insert(int idx);
    void erase(int idx);

    std::vector<int> members_;
    std::vector<int> pos_;
};

struct RelaxStats {
    std::uint64_t flips = 0;
    std::uint64_t proposals = 0;  // Capped mode only
    /// Largest energy_delta seen on an accepted flip; stays negative when
    /// the energy decreased strictly at every jump.
    double max_accepted_delta = -1e300;
    bool reached_robust = false;
};

/// ToRobust jumps uniformly among susceptible sites until none is left.
/// Capped(kappa) consumes kappa proposals; with k susceptible sites the
/// number of proposals up to the next accepted one is Geometric(k / N^2),
/// so the proposals that would be rejected are skipped in bulk.
void relax_in_place(SpinConfiguration& sigma, const RelaxationMode& mode, Rng& rng,
                    RelaxStats* stats = nullptr);
SpinConfiguration relax(const SpinConfiguration& sigma, const RelaxationMode& mode, Rng& rng,
                        RelaxStats* stats = nullptr);

class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact distribution over robust endpoints, keyed by packed spins.
struct AbsorptionDistribution {
    struct Entry {
        SpinConfiguration config;
        Rational probability;
    };
    std::map<std::vector<std::uint64_t>, Entry> entries;

    Rational total() const;
    std::size_t size() const noexcept { return entries.size(); }
};

/// The endpoint every downhill path from sigma must reach, when the plus
/// sites already determine it: the threshold-2 bootstrap closure of the
/// 2-core of the plus set, provided it contains every plus site. Robust
/// configurations return themselves.
std::optional<SpinConfiguration> forced_endpoint(const SpinConfiguration& sigma);

/// D(sigma) = point mass if robust, else the uniform average of D over the
/// susceptible flips. Throws ResourceError once more than `budget`
/// configurations are memoised.
AbsorptionDistribution downhill_absorption(const SpinConfiguration& sigma,
                                           std::size_t budget = 1'000'000);

enum class ComponentKind { Rectangle, StripeRows, StripeCols };

std::string to_string(ComponentKind kind);

/// anchor is the first row / column of the cyclic row and column intervals.
struct RobustComponent {
    ComponentKind kind = ComponentKind::Rectangle;
    Site anchor;
    int width = 0;
    int height = 0;

    int top() const noexcept { return anchor.row; }
    int left() const noexcept { return anchor.col; }
    bool full_height(int n) const noexcept { return height == n; }
    bool full_width(int n) const noexcept { return width == n; }

    friend bool operator==(const RobustComponent&, const RobustComponent&) = default;
};

struct RobustClassification {
    bool all_plus = false;
    std::vector<RobustComponent> components;
};

class CharacterizationViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decomposes a robust configuration into rectangles and stripes and checks
/// that distinct components are more than two apart. All-plus yields the
/// all_plus sentinel, all-minus an empty list.
RobustClassification classify_robust(const SpinConfiguration& sigma);

}  // namespace isingmdp
