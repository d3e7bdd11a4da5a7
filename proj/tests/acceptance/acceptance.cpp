// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "isingmdp/experiment.hpp"

using namespace isingmdp;
namespace fs = std::filesystem;

namespace {

constexpr double kLambdaC = 15.0 / 17.0;
constexpr double kClosedFormTol = 1e-10;
constexpr double kCrossingTol = 1e-4;
constexpr double kOptimalResidual = 1e-10;
constexpr double kSuboptimalResidual = 1e-6;
constexpr double kMcRelativeTol = 0.03;
constexpr std::int64_t kReplications = 2000;
constexpr double kKernelSeconds = 60.0;
constexpr double kStripeSeconds = 300.0;
constexpr double kTableSeconds = 900.0;

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
    failures += pass ? 0 : 1;
}

std::string fmt(double x, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << x;
    return ss.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Aggregates the property checks over every Monte Carlo run.
struct RunAudit {
    std::int64_t trajectories = 0;
    std::int64_t misses = 0;
    std::int64_t nonrobust = 0;
    std::int64_t unresolved = 0;
    double max_delta = -1e300;

    void add(const FamilyRun& run) {
        for (const auto& r : run.records) {
            ++trajectories;
            misses += r.classification_misses;
            nonrobust += r.nonrobust_boundaries;
            unresolved += r.resolved() ? 0 : 1;
            max_delta = std::max(max_delta, r.relax.max_accepted_delta);
        }
    }
};

RunAudit audit;

ExperimentConfig mc_config(Regime regime, std::uint64_t seed) {
    ExperimentConfig c;
    c.regime = regime;
    c.n = 32;
    c.replications = kReplications;
    c.master_seed = seed;
    c.threads = 0;
    switch (regime) {
        case Regime::X: c.seed_geometry.stripes = {{0, 3}, {16, 3}}; break;
        case Regime::Y:
            c.seed_geometry.stripes = {{0, 3}};
            c.seed_geometry.droplets = {{0, 16, 3, 3}};
            break;
        case Regime::Z: c.seed_geometry.droplets = {{0, 0, 3, 3}, {16, 16, 3, 3}}; break;
    }
    for (Family f : all_families()) {
        if (regime_of(f) == regime) c.families.push_back(f);
    }
    return c;
}

std::map<Family, FamilyRun> run_table(const ExperimentConfig& c) {
    std::map<Family, FamilyRun> out;
    const SpinConfiguration seed = build_seed(c);
    RunOptions opt;
    opt.mode = c.relaxation;
    opt.max_epochs = c.max_epochs;
    for (Family f : c.families) {
        out.emplace(f, simulate_family(seed, f, opt, c.replications, c.master_seed, c.threads));
        audit.add(out.at(f));
    }
    return out;
}

double mean_tau(const FamilyRun& run) {
    if (run.unresolved() > 0) return std::nan("");
    return estimate_hitting(run.samples()).mean;
}

void kernel_exactness() {
    const auto t0 = Clock::now();
    const auto checks = verify_kernel_rows(12);
    const double secs = seconds_since(t0);
    int mismatches = 0;
    std::map<std::string, bool> seen{{"(1/3, 2/3)", false}, {"(5/9, 7/27, 5/27)", false},
                                     {"(1/4, 3/4)", false}, {"(7/18, 31/144, 19/48)", false}};
    auto has = [](const std::string& s, std::initializer_list<const char*> parts) {
        for (const char* p : parts) {
            if (s.find(std::string("=") + p) == std::string::npos) return false;
        }
        return true;
    };
    for (const auto& k : checks) {
        mismatches += k.match ? 0 : 1;
        if (!k.match) continue;
        if (has(k.observed, {"1/3", "2/3"})) seen["(1/3, 2/3)"] = true;
        if (has(k.observed, {"5/9", "7/27", "5/27"})) seen["(5/9, 7/27, 5/27)"] = true;
        if (has(k.observed, {"1/4", "3/4"})) seen["(1/4, 3/4)"] = true;
        if (has(k.observed, {"7/18", "31/144", "19/48"})) seen["(7/18, 31/144, 19/48)"] = true;
    }
    bool all_seen = true;
    for (const auto& [k, v] : seen) all_seen = all_seen && v;
    report(mismatches == 0 && all_seen && secs < kKernelSeconds, "kernel exactness",
           std::to_string(checks.size()) + " rows at N=12, " + std::to_string(mismatches) + " mismatches, all four " +
               "row types " + (all_seen ? "present" : "NOT present") + ", " + fmt(secs, 2) + " s");
}

void closed_form() {
    const auto mdp = build_stripe_stripe_mdp(32);
    const auto policy = x_family_member(mdp, Family::XA1, 0);
    double worst = 0.0;
    int compared = 0;
    for (double l : {0.3, 0.5, 0.8, kLambdaC, 0.95}) {
        const auto v = policy_evaluation(mdp, policy, l);
        for (int i = 0; i <= 8; ++i) {
            for (int j = 0; j <= 8; ++j) {
                const auto s = mdp.find(x_label(i, j));
                if (!s) continue;
                worst = std::max(worst, std::abs(v[*s] - analytic_value_x({i, j}, l)));
                ++compared;
            }
        }
    }
    report(worst <= kClosedFormTol, "closed-form agreement",
           std::to_string(compared) + " comparisons, max abs error " + fmt(worst * 1e12, 3) + "e-12");
}

void critical_discount() {
    const auto mdp = build_stripe_stripe_mdp(32);
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const auto a2 = x_family_policy(mdp, Family::XA2);
    const int s = mdp.index(x_label(13, 13));
    const double cross = find_lambda_crossing(mdp, a1, a2, s, {0.8, 0.95});
    const double greedy = greedy_switch_lambda(mdp, s, "a_l1", "a_l2", {0.8, 0.95});
    const double r1_hi = bellman_residual(mdp, a1, 0.95);
    const double r1_lo = bellman_residual(mdp, a1, 0.80);
    const double r2_hi = bellman_residual(mdp, a2, 0.95);
    const double r2_lo = bellman_residual(mdp, a2, 0.80);
    const bool pass = std::abs(cross - kLambdaC) <= kCrossingTol && std::abs(greedy - kLambdaC) <= kCrossingTol &&
                      r1_hi <= kOptimalResidual && r1_lo > kSuboptimalResidual && r2_lo <= kOptimalResidual &&
                      r2_hi > kSuboptimalResidual;
    std::ostringstream d;
    d << std::setprecision(8) << "value crossing " << cross << ", greedy switch " << greedy << " (15/17 = " << kLambdaC
      << "); residuals A1 " << r1_hi << " at 0.95, " << r1_lo << " at 0.80; A2 " << r2_lo << " at 0.80, " << r2_hi
      << " at 0.95";
    report(pass, "critical discount factor", d.str());
}

void hitting_limit() {
    const auto mdp = build_stripe_stripe_mdp(32);
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const int target = mdp.index(x_label(0, 0));
    const auto m = hitting_time_moments(mdp, a1, target);
    bool pass = true;
    std::ostringstream d;
    d << std::setprecision(6);
    for (auto [i, j] : {std::pair{2, 0}, std::pair{13, 13}}) {
        const int s = mdp.index(x_label(i, j));
        const auto& mom = m[static_cast<std::size_t>(s)];
        double previous = std::numeric_limits<double>::infinity();
        for (double l : {0.9, 0.99, 0.999}) {
            const double gap = 1.0 / (1.0 - l) - policy_evaluation(mdp, a1, l)[s];
            const double err = std::abs(gap - mom.e_tau);
            pass = pass && err < previous;
            previous = err;
        }
        const double correction = (1.0 - 0.999) / 2.0 * mom.e_tau_factorial2;
        pass = pass && previous <= 2.0 * correction;
        d << "(" << i << "," << j << "): E[tau] " << mom.e_tau << ", |gap - E[tau]| at 0.999 = " << previous
          << " vs bound " << 2.0 * correction << "; ";
    }
    report(pass, "hitting-time limit", d.str());
}

void stripe_stripe(std::map<Family, FamilyRun>& runs) {
    const auto t0 = Clock::now();
    runs = run_table(mc_config(Regime::X, 20240601));
    const double secs = seconds_since(t0);
    const double m1 = mean_tau(runs.at(Family::XA1));
    const double m2 = mean_tau(runs.at(Family::XA2));
    const bool pass = m1 >= 34.4 && m1 <= 35.4 && m2 >= 37.0 && m2 <= 38.2 && secs < kStripeSeconds;
    report(pass, "stripe-stripe Monte Carlo",
           "A1 mean " + fmt(m1) + " (target [34.4, 35.4]), A2 mean " + fmt(m2) + " (target [37.0, 38.2]), " +
               fmt(secs, 1) + " s");
}

void table_check(const std::string& name, Regime regime, std::uint64_t seed,
                 const std::vector<std::pair<Family, double>>& targets, const std::vector<Family>& order) {
    const auto t0 = Clock::now();
    const auto runs = run_table(mc_config(regime, seed));
    const double secs = seconds_since(t0);
    bool pass = secs < kTableSeconds;
    std::ostringstream d;
    for (const auto& [f, target] : targets) {
        const double m = mean_tau(runs.at(f));
        const double rel = (m - target) / target;
        pass = pass && std::abs(rel) <= kMcRelativeTol;
        d << family_id(f) << " " << fmt(m, 3) << " vs " << target << " (" << (rel >= 0 ? "+" : "") << fmt(100 * rel, 1)
          << "%); ";
    }
    bool ordered = true;
    for (std::size_t k = 1; k < order.size(); ++k) {
        ordered = ordered && mean_tau(runs.at(order[k - 1])) < mean_tau(runs.at(order[k]));
    }
    d << "ordering " << (ordered ? "holds" : "violated") << ", " << fmt(secs, 1) << " s";
    report(pass && ordered, name, d.str());
}

void mc_exact(const std::map<Family, FamilyRun>& runs) {
    const auto mdp = build_stripe_stripe_mdp(32);
    const int s = mdp.index(x_label(13, 13));
    bool pass = true;
    std::ostringstream d;
    d << std::setprecision(5);
    for (Family f : {Family::XA1, Family::XA2}) {
        const auto policy = x_family_policy(mdp, f);
        const auto samples = runs.at(f).samples();
        for (double l : {0.5, 0.8, 0.9}) {
            const double exact = policy_evaluation(mdp, policy, l)[s];
            const auto est = estimate_value(samples, l);
            const bool inside = est.ci95_low <= exact && exact <= est.ci95_high;
            pass = pass && inside;
            d << family_id(f) << "@" << l << (inside ? " in" : " OUT") << " [" << est.ci95_low << ", "
              << est.ci95_high << "] exact " << exact << "; ";
        }
    }
    report(pass, "MC/exact consistency", d.str());
}

void properties(const fs::path& out) {
    bool rows = true;
    for (int n : {12, 32}) {
        const auto mdp = build_stripe_stripe_mdp(n);
        for (const auto& st : mdp.states()) {
            for (const auto& a : st.actions) {
                Rational sum = 0;
                for (const auto& t : a.row) sum += t.probability;
                rows = rows && sum == 1;
            }
        }
    }

    auto c = mc_config(Regime::X, 7);
    c.replications = 200;
    c.lambdas = {0.5, 0.9};
    c.snapshot_epochs = {0, 10};
    std::ostringstream log;
    c.threads = 1;
    c.output_dir = (out / "rerun_a").string();
    const auto ra = cmd_simulate(c, log);
    c.threads = 0;
    c.output_dir = (out / "rerun_b").string();
    const auto rb = cmd_simulate(c, log);
    bool identical = ra.outputs == rb.outputs;
    for (const auto& name : ra.outputs) {
        identical = identical && slurp(out / "rerun_a" / name) == slurp(out / "rerun_b" / name);
    }

    const bool pass = rows && audit.max_delta < 0.0 && audit.nonrobust == 0 && audit.misses == 0 && identical;
    std::ostringstream d;
    d << "rows sum to 1: " << (rows ? "yes" : "no") << "; over " << audit.trajectories
      << " trajectories max accepted energy change " << audit.max_delta << ", non-robust boundaries "
      << audit.nonrobust << ", classification misses " << audit.misses << "; reruns byte-identical: "
      << (identical ? "yes" : "no");
    report(pass, "property suites", d.str());
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out = fs::temp_directory_path() / "isingmdp_acceptance";
    for (int k = 1; k + 1 < argc; ++k) {
        if (std::string(argv[k]) == "--output-dir") out = argv[k + 1];
    }
    fs::remove_all(out);
    fs::create_directories(out);

    try {
        kernel_exactness();
        closed_form();
        critical_discount();
        hitting_limit();
        std::map<Family, FamilyRun> stripes;
        stripe_stripe(stripes);
        table_check("stripe-droplet Monte Carlo", Regime::Y, 20240602,
                    {{Family::YA1, 35.816},
                     {Family::YA1p, 36.884},
                     {Family::YA2, 77.587},
                     {Family::YA3, 67.636},
                     {Family::YA4, 60.165}},
                    {Family::YA1, Family::YA1p, Family::YA4, Family::YA3, Family::YA2});
        table_check("droplet-droplet Monte Carlo", Regime::Z, 20240603,
                    {{Family::ZA1, 199.567}, {Family::ZA2, 79.758}, {Family::ZA3, 58.318}},
                    {Family::ZA3, Family::ZA2, Family::ZA1});
        mc_exact(stripes);
        properties(out);
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance harness: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failures ? 1 : 0;
}
