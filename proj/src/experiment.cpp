#include "isingmdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace isingmdp {

namespace {

const std::set<std::string> kConfigKeys{
    "regime",         "n",       "field_strength", "seed_geometry", "families",        "family",
    "relaxation",     "lambdas", "replications",   "master_seed",   "max_epochs",      "output_dir",
    "snapshot_epochs", "threads", "start_state",   "trajectory_log",
};

template <class T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

std::vector<Family> default_families(Regime regime) {
    std::vector<Family> out;
    for (Family f : all_families()) {
        if (regime_of(f) == regime) out.push_back(f);
    }
    return out;
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kConfigKeys.contains(key)) throw ConfigError("unknown config field '" + key + "'");
    }

    ExperimentConfig c;
    try {
        c.regime = parse_regime(field_or<std::string>(j, "regime", "x"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.n = field_or<int>(j, "n", c.n);
    c.field = field_or<double>(j, "field_strength", c.field);
    if (c.n < 4) throw ConfigError("n must be >= 4");
    if (!(c.field > 0.0 && c.field < 1.0)) throw ConfigError("field_strength must lie in (0, 1)");

    if (j.contains("seed_geometry")) {
        const json& g = j.at("seed_geometry");
        if (!g.is_object()) throw ConfigError("seed_geometry must be an object");
        for (const auto& s : g.value("stripes", json::array())) {
            c.seed_geometry.stripes.push_back({field_or<int>(s, "col", 0), field_or<int>(s, "width", 1)});
        }
        for (const auto& d : g.value("droplets", json::array())) {
            c.seed_geometry.droplets.push_back({field_or<int>(d, "row", 0), field_or<int>(d, "col", 0),
                                                field_or<int>(d, "height", 2), field_or<int>(d, "width", 2)});
        }
    }

    std::vector<std::string> ids;
    if (j.contains("families")) ids = field_or<std::vector<std::string>>(j, "families", {});
    if (j.contains("family")) ids.push_back(field_or<std::string>(j, "family", ""));
    try {
        for (const auto& id : ids) c.families.push_back(parse_family(id));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (c.families.empty()) c.families = default_families(c.regime);
    for (Family f : c.families) {
        if (regime_of(f) != c.regime) {
            throw ConfigError("family " + std::string(family_id(f)) + " does not belong to regime " +
                              std::string(to_string(c.regime)));
        }
    }

    if (j.contains("relaxation")) {
        const json& r = j.at("relaxation");
        const auto mode = field_or<std::string>(r, "mode", "to_robust");
        if (mode == "to_robust") {
            c.relaxation = ToRobust{};
        } else if (mode == "capped") {
            const auto kappa = field_or<std::int64_t>(r, "kappa", 0);
            if (kappa < 1) throw ConfigError("capped relaxation needs kappa >= 1");
            c.relaxation = Capped{static_cast<std::uint64_t>(kappa)};
        } else {
            throw ConfigError("relaxation mode must be 'to_robust' or 'capped'");
        }
    }

    c.lambdas = field_or<std::vector<double>>(j, "lambdas", {});
    for (double l : c.lambdas) {
        if (!(l > 0.0 && l < 1.0)) throw ConfigError("every lambda must lie in (0, 1)");
    }
    c.replications = field_or<std::int64_t>(j, "replications", c.replications);
    if (c.replications < 1) throw ConfigError("replications must be >= 1");
    c.master_seed = field_or<std::uint64_t>(j, "master_seed", c.master_seed);
    c.max_epochs = field_or<std::int64_t>(j, "max_epochs", c.max_epochs);
    if (c.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    c.output_dir = field_or<std::string>(j, "output_dir", c.output_dir);
    c.snapshot_epochs = field_or<std::vector<std::int64_t>>(j, "snapshot_epochs", {});
    c.threads = field_or<int>(j, "threads", c.threads);
    if (c.threads < 0) throw ConfigError("threads must be >= 0");
    if (j.contains("start_state")) {
        const auto s = field_or<std::vector<int>>(j, "start_state", {});
        if (s.size() != 2) throw ConfigError("start_state must be [i, j]");
        c.start_state = {s[0], s[1]};
    }
    c.trajectory_log = field_or<bool>(j, "trajectory_log", false);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["regime"] = std::string(to_string(c.regime));
    j["n"] = c.n;
    j["field_strength"] = c.field;
    json stripes = json::array();
    for (const auto& s : c.seed_geometry.stripes) stripes.push_back({{"col", s.col}, {"width", s.width}});
    json droplets = json::array();
    for (const auto& d : c.seed_geometry.droplets) {
        droplets.push_back({{"row", d.row}, {"col", d.col}, {"height", d.height}, {"width", d.width}});
    }
    j["seed_geometry"] = {{"stripes", stripes}, {"droplets", droplets}};
    json fams = json::array();
    for (Family f : c.families) fams.push_back(std::string(family_id(f)));
    j["families"] = fams;
    if (const auto* cap = std::get_if<Capped>(&c.relaxation)) {
        j["relaxation"] = {{"mode", "capped"}, {"kappa", cap->kappa}};
    } else {
        j["relaxation"] = {{"mode", "to_robust"}};
    }
    j["lambdas"] = c.lambdas;
    j["replications"] = c.replications;
    j["master_seed"] = c.master_seed;
    j["max_epochs"] = c.max_epochs;
    j["output_dir"] = c.output_dir;
    j["snapshot_epochs"] = c.snapshot_epochs;
    j["threads"] = c.threads;
    j["start_state"] = {c.start_state.i, c.start_state.j};
    j["trajectory_log"] = c.trajectory_log;
    return j.dump(2);
}

SpinConfiguration build_seed(const ExperimentConfig& c) {
    const Lattice lat(c.n, c.field);
    SpinConfiguration sigma = SpinConfiguration::all_minus(lat);
    const auto& g = c.seed_geometry;
    if (g.stripes.empty() && g.droplets.empty()) {
        if (c.regime != Regime::X) throw ConfigError("regimes y and z need an explicit seed_geometry");
        try {
            return stripe_pair(c.n, c.start_state, 0, c.field);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("start_state: ") + e.what());
        }
    }
    for (const auto& s : g.stripes) {
        if (s.width < 1 || s.width >= c.n) throw ConfigError("stripe width must lie in [1, n-1]");
        sigma.fill_plus(0, s.col, c.n, s.width);
    }
    for (const auto& d : g.droplets) {
        if (d.height < 2 || d.width < 2 || d.height > c.n - 2 || d.width > c.n - 2) {
            throw ConfigError("droplet sides must lie in [2, n-2]");
        }
        sigma.fill_plus(d.row, d.col, d.height, d.width);
    }
    if (!is_robust(sigma)) throw ConfigError("seed geometry is not a robust configuration");
    try {
        const Geometry geo = analyze(sigma);
        switch (c.regime) {
            case Regime::X: classify_x(geo); break;
            case Regime::Y: classify_y(geo); break;
            case Regime::Z: classify_z(geo); break;
        }
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("seed geometry: ") + e.what());
    }
    return sigma;
}

std::vector<HittingSample> FamilyRun::samples() const {
    std::vector<HittingSample> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.hitting_time);
    return out;
}

std::int64_t FamilyRun::unresolved() const {
    return std::count_if(records.begin(), records.end(), [](const TrajectoryRecord& r) { return !r.resolved(); });
}

std::uint64_t family_seed(std::uint64_t master_seed, Family family) {
    const std::string_view id = family_id(family);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : id) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master_seed ^ h);
}

FamilyRun simulate_family(const SpinConfiguration& seed, Family family, const RunOptions& options,
                          std::int64_t replications, std::uint64_t master_seed, int threads,
                          const std::vector<std::int64_t>& snapshot_epochs) {
    FamilyRun run;
    run.family = family;
    run.records.resize(static_cast<std::size_t>(replications));
    const DecisionRule rule(family);
    const std::uint64_t base = family_seed(master_seed, family);
    const std::set<std::int64_t> wanted(snapshot_epochs.begin(), snapshot_epochs.end());

    std::atomic<std::int64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            const std::int64_t r = next.fetch_add(1);
            if (r >= replications) return;
            try {
                Rng rng = make_stream(base, static_cast<std::uint64_t>(r));
                RunOptions opt = options;
                if (r == 0 && !wanted.empty()) {
                    opt.observer = [&](std::int64_t t, const SpinConfiguration& s) {
                        if (wanted.contains(t)) run.snapshots.insert_or_assign(t, s);
                    };
                }
                run.records[static_cast<std::size_t>(r)] = run_policy(seed, rule, opt, rng);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(replications);
                return;
            }
        }
    };

    int count = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    count = static_cast<int>(std::min<std::int64_t>(count, replications));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return run;
}

namespace {

using Projection = std::map<std::pair<int, int>, Rational>;

std::pair<int, int> unordered(AuxStateX s) { return {std::max(s.i, s.j), std::min(s.i, s.j)}; }

std::string format_projection(const Projection& p) {
    std::string out;
    for (const auto& [key, prob] : p) {
        if (!out.empty()) out += ' ';
        out += "(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")=" + prob.str();
    }
    return out;
}

}  // namespace

std::vector<KernelCheck> verify_kernel_rows(int n) {
    const FiniteMdp mdp = build_stripe_stripe_mdp(n);
    std::vector<KernelCheck> checks;
    for (const auto& state : mdp.states()) {
        const AuxStateX s = parse_x_label(state.label);
        if (s.i == 0 && s.j == 0) continue;
        const SpinConfiguration sigma = stripe_pair(n, s);
        const Geometry geo = analyze(sigma);
        for (const auto& action : state.actions) {
            if (action.name == "noop") continue;
            KernelCheck check;
            check.state = s;
            check.action = action.name;
            Projection expected;
            for (const auto& t : action.row) expected[unordered(parse_x_label(mdp.state(t.target).label))] += t.probability;
            check.expected = format_projection(expected);

            const auto sites = candidate_sites(geo, Regime::X, parse_action(action.name));
            std::vector<Site> probes;
            for (const Site& site : sites) {
                if (std::none_of(probes.begin(), probes.end(), [&](const Site& p) { return p.col == site.col; })) {
                    probes.push_back(site);
                }
            }
            check.match = !probes.empty();
            for (const Site& site : probes) {
                const auto dist = downhill_absorption(flip(sigma, site));
                Projection observed;
                for (const auto& [key, entry] : dist.entries) observed[unordered(classify_x(entry.config))] += entry.probability;
                if (check.observed.empty() || observed != expected) check.observed = format_projection(observed);
                check.match = check.match && observed == expected;
                ++check.sites_checked;
            }
            checks.push_back(std::move(check));
        }
    }
    return checks;
}

namespace {

fs::path prepare_output(const ExperimentConfig& c) {
    fs::path dir(c.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.output_dir + ": " + ec.message());
    return dir;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& contents, CommandResult& result) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << contents;
    result.outputs.push_back(name);
}

void require_x(const ExperimentConfig& c, const char* command) {
    if (c.regime != Regime::X) throw ConfigError(std::string(command) + " needs regime x");
}

std::vector<double> sweep_lambdas(const ExperimentConfig& c) {
    if (!c.lambdas.empty()) return c.lambdas;
    std::vector<double> out;
    for (int k = 1; k <= 19; ++k) out.push_back(k / 20.0);
    return out;
}

int start_index(const FiniteMdp& mdp, const ExperimentConfig& c) {
    if (auto id = mdp.find(x_label(c.start_state.i, c.start_state.j))) return *id;
    throw ConfigError("start_state " + to_string(c.start_state) + " is not a state of the N=" + std::to_string(c.n) +
                      " model");
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

CommandResult cmd_verify_kernel(const ExperimentConfig& c, std::ostream& log) {
    require_x(c, "verify-kernel");
    if (c.n < 12) throw ConfigError("verify-kernel needs n >= 12");
    const fs::path dir = prepare_output(c);
    CommandResult result;
    std::ostringstream csv;
    csv << "state_i,state_j,action,expected,observed,sites_checked,match\n";
    int mismatches = 0;
    for (const auto& k : verify_kernel_rows(c.n)) {
        csv << k.state.i << ',' << k.state.j << ',' << k.action << ',' << quoted(k.expected) << ','
            << quoted(k.observed) << ',' << k.sites_checked << ',' << (k.match ? "true" : "false") << '\n';
        log << (k.match ? "match    " : "MISMATCH ") << to_string(k.state) << ' ' << k.action << "  " << k.observed
            << '\n';
        mismatches += k.match ? 0 : 1;
    }
    write_file(dir, "kernel_report.csv", csv.str(), result);
    log << (mismatches ? std::to_string(mismatches) + " kernel rows differ\n" : "all kernel rows match\n");
    result.exit_code = mismatches ? kExitMismatch : kExitOk;
    return result;
}

CommandResult cmd_evaluate(const ExperimentConfig& c, std::ostream& log) {
    require_x(c, "evaluate");
    const FiniteMdp mdp = build_stripe_stripe_mdp(c.n);
    const int start = start_index(mdp, c);
    const fs::path dir = prepare_output(c);
    const auto lambdas = sweep_lambdas(c);
    CommandResult result;

    auto table_csv = [&](auto&& value_at, Provenance prov) {
        std::ostringstream csv;
        csv << "state_i,state_j,lambda,value,provenance\n";
        for (double l : lambdas) {
            const std::vector<double> v = value_at(l);
            for (int s = 0; s < mdp.size(); ++s) {
                const AuxStateX x = parse_x_label(mdp.state(s).label);
                csv << x.i << ',' << x.j << ',' << format_number(l) << ',' << format_number(v[static_cast<std::size_t>(s)])
                    << ',' << to_string(prov) << '\n';
            }
        }
        return csv.str();
    };

    std::vector<MdpPolicy> policies;
    for (Family f : c.families) {
        const MdpPolicy policy = x_family_policy(mdp, f);
        policies.push_back(policy);
        write_file(dir, "values_" + std::string(family_id(f)) + ".csv",
                   table_csv([&](double l) { return policy_evaluation(mdp, policy, l).values; },
                             Provenance::LinearSolve),
                   result);
        for (double l : lambdas) {
            log << family_id(f) << " lambda=" << format_number(l) << " v" << to_string(c.start_state) << "="
                << format_number(policy_evaluation(mdp, policy, l)[start]) << '\n';
        }
    }
    write_file(dir, "values_analytic.csv",
               table_csv(
                   [&](double l) {
                       std::vector<double> v;
                       for (const auto& st : mdp.states()) v.push_back(analytic_value_x(parse_x_label(st.label), l));
                       return v;
                   },
                   Provenance::Analytic),
               result);
    write_file(dir, "values_optimal.csv",
               table_csv([&](double l) { return value_iteration(mdp, l).values.values; }, Provenance::ValueIteration),
               result);

    json crossing;
    crossing["state"] = {c.start_state.i, c.start_state.j};
    crossing["lambda_c"] = 15.0 / 17.0;
    if (policies.size() >= 2) {
        crossing["families"] = {std::string(family_id(c.families[0])), std::string(family_id(c.families[1]))};
        try {
            const double l = find_lambda_crossing(mdp, policies[0], policies[1], start, {0.5, 0.99});
            crossing["value_crossing"] = l;
            log << "value crossing at lambda=" << format_number(l) << '\n';
        } catch (const BracketError& e) {
            crossing["value_crossing"] = nullptr;
            crossing["value_crossing_error"] = e.what();
            log << "no value crossing: " << e.what() << '\n';
        }
    }
    try {
        const double l = greedy_switch_lambda(mdp, start, "a_l1", "a_l2", {0.5, 0.99});
        crossing["greedy_switch"] = l;
        log << "greedy switch at lambda=" << format_number(l) << '\n';
    } catch (const std::exception& e) {
        crossing["greedy_switch"] = nullptr;
        crossing["greedy_switch_error"] = e.what();
    }
    write_file(dir, "crossing.json", crossing.dump(2) + "\n", result);
    return result;
}

CommandResult cmd_moments(const ExperimentConfig& c, std::ostream& log) {
    require_x(c, "moments");
    const FiniteMdp mdp = build_stripe_stripe_mdp(c.n);
    const int start = start_index(mdp, c);
    const int target = mdp.index(x_label(0, 0));
    const fs::path dir = prepare_output(c);
    CommandResult result;
    std::vector<int> probes{start};
    if (auto s20 = mdp.find(x_label(2, 0)); s20 && *s20 != start) probes.push_back(*s20);

    for (Family f : c.families) {
        const MdpPolicy policy = x_family_policy(mdp, f);
        const auto moments = hitting_time_moments(mdp, policy, target);
        std::ostringstream csv;
        csv << "state,e_tau,e_tau2f\n";
        for (int s = 0; s < mdp.size(); ++s) {
            csv << quoted(mdp.state(s).label) << ',' << format_number(moments[static_cast<std::size_t>(s)].e_tau) << ','
                << format_number(moments[static_cast<std::size_t>(s)].e_tau_factorial2) << '\n';
        }
        const std::string id(family_id(f));
        write_file(dir, "moments_" + id + ".csv", csv.str(), result);

        std::ostringstream lim;
        lim << "state,lambda,gap,e_tau,e_tau2f,correction\n";
        for (int s : probes) {
            const auto& m = moments[static_cast<std::size_t>(s)];
            for (double l : {0.9, 0.99, 0.999}) {
                const double gap = 1.0 / (1.0 - l) - policy_evaluation(mdp, policy, l)[s];
                lim << quoted(mdp.state(s).label) << ',' << format_number(l) << ',' << format_number(gap) << ','
                    << format_number(m.e_tau) << ',' << format_number(m.e_tau_factorial2) << ','
                    << format_number((1.0 - l) / 2.0 * m.e_tau_factorial2) << '\n';
            }
            log << id << " E[tau | " << mdp.state(s).label << "]=" << format_number(m.e_tau)
                << " E[tau(tau-1)]=" << format_number(m.e_tau_factorial2)
                << " minimal path=" << minimal_path_length(mdp, policy, s, target) << '\n';
        }
        write_file(dir, "moments_limit_" + id + ".csv", lim.str(), result);
    }
    return result;
}

CommandResult cmd_simulate(const ExperimentConfig& c, std::ostream& log) {
    const SpinConfiguration seed = build_seed(c);
    const fs::path dir = prepare_output(c);
    std::vector<double> lambdas = c.lambdas.empty() ? std::vector<double>{0.5, 0.8, 0.9} : c.lambdas;
    CommandResult result;
    RunOptions options;
    options.mode = c.relaxation;
    options.max_epochs = c.max_epochs;
    options.record_log = c.trajectory_log;

    std::ostringstream summary;
    summary << "family,replications,mean_tau,var_tau,ci95_low,ci95_high,resolved_fraction,"
               "classification_misses,fallbacks,plus_flip_warnings\n";
    std::ostringstream values;
    values << "family,lambda,mean_value,ci95_low,ci95_high,pgf\n";
    std::int64_t unresolved_total = 0;

    for (Family f : c.families) {
        const std::string id(family_id(f));
        const FamilyRun run = simulate_family(seed, f, options, c.replications, c.master_seed, c.threads,
                                              c.snapshot_epochs);
        std::ostringstream csv;
        csv << "rep,tau";
        for (double l : lambdas) csv << ",value_lambda_" << format_number(l);
        csv << '\n';
        std::int64_t misses = 0, fallbacks = 0, warnings = 0;
        for (std::size_t r = 0; r < run.records.size(); ++r) {
            const auto& rec = run.records[r];
            misses += rec.classification_misses;
            fallbacks += rec.fallbacks;
            warnings += rec.plus_flip_warnings;
            csv << r << ',' << (rec.resolved() ? std::to_string(*rec.hitting_time) : "NA");
            for (double l : lambdas) csv << ',' << (rec.resolved() ? format_number(rec.discounted_value(l)) : "NA");
            csv << '\n';
        }
        write_file(dir, "hitting_" + id + ".csv", csv.str(), result);

        const std::int64_t unresolved = run.unresolved();
        unresolved_total += unresolved;
        const auto samples = run.samples();
        if (unresolved == 0) {
            const HittingStats st = estimate_hitting(samples);
            summary << id << ',' << c.replications << ',' << format_number(st.mean) << ',' << format_number(st.variance)
                    << ',' << format_number(st.ci95_low) << ',' << format_number(st.ci95_high) << ",1," << misses << ','
                    << fallbacks << ',' << warnings << '\n';
            for (double l : lambdas) {
                const HittingStats v = estimate_value(samples, l);
                values << id << ',' << format_number(l) << ',' << format_number(v.mean) << ','
                       << format_number(v.ci95_low) << ',' << format_number(v.ci95_high) << ','
                       << format_number(pgf_estimate(samples, l)) << '\n';
            }
            log << id << ": mean tau " << format_number(st.mean) << " (95% CI " << format_number(st.ci95_low) << ", "
                << format_number(st.ci95_high) << ")\n";
        } else {
            const double resolved = 1.0 - static_cast<double>(unresolved) / static_cast<double>(c.replications);
            summary << id << ',' << c.replications << ",NA,NA,NA,NA," << format_number(resolved) << ',' << misses
                    << ',' << fallbacks << ',' << warnings << '\n';
            log << id << ": " << unresolved << " unresolved trajectories (max_epochs " << c.max_epochs << ")\n";
        }
        if (warnings) log << id << ": warning, " << warnings << " flips of plus sites\n";

        for (const auto& [t, sigma] : run.snapshots) {
            std::ostringstream pgm;
            write_pgm(pgm, sigma);
            write_file(dir, "snap_" + id + "_" + std::to_string(t) + ".pgm", pgm.str(), result);
        }
        if (c.trajectory_log) {
            std::ostringstream lines;
            for (std::size_t r = 0; r < run.records.size(); ++r) {
                for (const auto& e : run.records[r].log) {
                    lines << json{{"rep", r},
                                  {"epoch", e.epoch},
                                  {"action", to_string(e.action)},
                                  {"aux_state", e.aux_state},
                                  {"robust", e.robust}}
                                 .dump()
                          << '\n';
                }
            }
            write_file(dir, "trajectories_" + id + ".jsonl", lines.str(), result);
        }
    }
    write_file(dir, "summary.csv", summary.str(), result);
    write_file(dir, "values_summary.csv", values.str(), result);
    result.exit_code = unresolved_total ? kExitUnresolved : kExitOk;
    return result;
}

CommandResult cmd_render(const ExperimentConfig& c, std::ostream& log) {
    const SpinConfiguration seed = build_seed(c);
    const fs::path dir = prepare_output(c);
    CommandResult result;
    std::ostringstream pgm;
    write_pgm(pgm, seed);
    write_file(dir, "snap_seed_0.pgm", pgm.str(), result);
    const Geometry g = analyze(seed);
    log << to_ascii(seed);
    switch (c.regime) {
        case Regime::X: log << "x state " << to_string(classify_x(g)) << '\n'; break;
        case Regime::Y: log << "y state " << to_string(classify_y(g)) << '\n'; break;
        case Regime::Z: log << "z state " << to_string(classify_z(g)) << '\n'; break;
    }
    return result;
}

void write_manifest(const ExperimentConfig& config, std::string_view command, const CommandResult& result,
                    double wall_seconds) {
    const fs::path dir(config.output_dir);
    json outputs = json::object();
    for (const auto& name : result.outputs) {
        std::ifstream in(dir / name, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        outputs[name] = fnv1a_hex(ss.str());
    }
    const json manifest{
        {"toolkit_version", std::string(kToolkitVersion)},
        {"command", std::string(command)},
        {"config_hash", fnv1a_hex(config_to_json(config))},
        {"exit_code", result.exit_code},
        {"outputs", outputs},
        {"timings", {{"wall_seconds", wall_seconds}}},
    };
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
}

}  // namespace isingmdp
