#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isingmdp/dynamics.hpp"
#include "isingmdp/lattice.hpp"
#include "isingmdp/rng.hpp"

namespace isingmdp {

/// Flip one site, or do nothing.
struct IsingAction {
    std::optional<Site> site;

    static IsingAction noop() { return {}; }
    static IsingAction flip_at(Site s) { return {s}; }
    bool is_noop() const noexcept { return !site.has_value(); }

    friend bool operator==(const IsingAction&, const IsingAction&) = default;
};

/// "noop" or "row:col".
std::string to_string(const IsingAction& action);

SpinConfiguration apply_action(const SpinConfiguration& sigma, const IsingAction& action);

/// apply_action followed by relaxation.
SpinConfiguration epoch(const SpinConfiguration& sigma, const IsingAction& action, const RelaxationMode& mode,
                        Rng& rng, RelaxStats* stats = nullptr);

struct EpochLog {
    std::int64_t epoch = 0;
    IsingAction action;
    std::string aux_state;  // after relaxation; "?" when unclassifiable
    bool robust = true;
};

struct TrajectoryRecord {
    std::string initial_state;
    std::int64_t epochs = 0;
    /// First epoch at which the configuration is all-plus; empty when the
    /// run hit max_epochs first.
    std::optional<std::int64_t> hitting_time;
    std::vector<EpochLog> log;

    std::int64_t classification_misses = 0;
    std::int64_t fallbacks = 0;
    std::int64_t plus_flip_warnings = 0;
    std::int64_t nonrobust_boundaries = 0;
    RelaxStats relax;

    bool resolved() const noexcept { return hitting_time.has_value(); }
    /// lambda^tau / (1 - lambda); throws std::logic_error when unresolved.
    double discounted_value(double lambda) const;
};

class DecisionRule;

struct RunOptions {
    RelaxationMode mode = ToRobust{};
    std::int64_t max_epochs = 50'000;
    bool record_log = false;
    /// Called with epoch 0 and after every epoch.
    std::function<void(std::int64_t, const SpinConfiguration&)> observer;
};

/// Runs the decision rule from sigma0 until all-plus or max_epochs. A
/// non-robust boundary (possible under Capped) or a configuration outside
/// the rule's regime counts as a classification miss and the epoch uses
/// noop.
TrajectoryRecord run_policy(const SpinConfiguration& sigma0, const DecisionRule& rule, const RunOptions& options,
                            Rng& rng);

}  // namespace isingmdp
