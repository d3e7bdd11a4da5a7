#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isingmdp/analysis.hpp"
#include "isingmdp/aux_states.hpp"
#include "isingmdp/dynamics.hpp"
#include "isingmdp/ising_mdp.hpp"
#include "isingmdp/policies.hpp"

namespace isingmdp {

inline constexpr std::string_view kToolkitVersion = "0.3.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 2;
inline constexpr int kExitUnresolved = 3;
inline constexpr int kExitConfig = 4;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StripeSeed {
    int col = 0;
    int width = 1;
};

struct DropletSeed {
    int row = 0;
    int col = 0;
    int height = 2;
    int width = 2;
};

struct SeedGeometry {
    std::vector<StripeSeed> stripes;
    std::vector<DropletSeed> droplets;
};

struct ExperimentConfig {
    Regime regime = Regime::X;
    int n = 32;
    double field = 0.5;
    SeedGeometry seed_geometry;
    std::vector<Family> families;
    RelaxationMode relaxation = ToRobust{};
    std::vector<double> lambdas;
    std::int64_t replications = 2000;
    std::uint64_t master_seed = 1;
    std::int64_t max_epochs = 50'000;
    std::string output_dir = "out";
    std::vector<std::int64_t> snapshot_epochs;
    int threads = 0;  // 0: hardware concurrency
    AuxStateX start_state{13, 13};
    bool trajectory_log = false;
};

/// Parses the JSON text of a config; throws ConfigError on any problem.
/// Unset families default to every family of the regime.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

/// Lattice seed of the config. Throws ConfigError unless it is robust and
/// classifies into the declared regime.
SpinConfiguration build_seed(const ExperimentConfig& config);

/// FNV-1a 64-bit, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

/// Shortest round-trip decimal form, e.g. 0.5 -> "0.5".
std::string format_number(double x);

struct FamilyRun {
    Family family = Family::XA1;
    std::vector<TrajectoryRecord> records;  // index = replication
    std::map<std::int64_t, SpinConfiguration> snapshots;  // replication 0

    std::vector<HittingSample> samples() const;
    std::int64_t unresolved() const;
};

/// Runs `replications` independent trajectories on a worker pool. Stream of
/// replication r is make_stream(family_seed(master, family), r), so the
/// result does not depend on the thread count.
FamilyRun simulate_family(const SpinConfiguration& seed, Family family, const RunOptions& options,
                          std::int64_t replications, std::uint64_t master_seed, int threads,
                          const std::vector<std::int64_t>& snapshot_epochs = {});

std::uint64_t family_seed(std::uint64_t master_seed, Family family);

struct KernelCheck {
    AuxStateX state;
    std::string action;
    std::string expected;
    std::string observed;
    bool match = false;
    std::size_t sites_checked = 0;
};

/// Compares every non-noop row of build_stripe_stripe_mdp(n) with the exact
/// downhill absorption of a lattice realisation, projected through
/// classify_x and compared as unordered gap pairs. Each row is checked from
/// one site in every column of its candidate set.
std::vector<KernelCheck> verify_kernel_rows(int n);

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<std::string> outputs;  // file names inside output_dir
};

CommandResult cmd_verify_kernel(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_evaluate(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_simulate(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_moments(const ExperimentConfig& config, std::ostream& log);
CommandResult cmd_render(const ExperimentConfig& config, std::ostream& log);

/// Writes manifest.json (config hash, version, output checksums, timing).
void write_manifest(const ExperimentConfig& config, std::string_view command, const CommandResult& result,
                    double wall_seconds);

}  // namespace isingmdp
