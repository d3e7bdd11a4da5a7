#include "isingmdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

namespace isingmdp {

std::string describe(const RelaxationMode& mode) {
    if (const auto* c = std::get_if<Capped>(&mode)) return "capped(" + std::to_string(c->kappa) + ")";
    return "to_robust";
}

std::vector<Site> susceptible_sites(const SpinConfiguration& sigma) {
    std::vector<Site> out;
    const Lattice& lat = sigma.lattice();
    for (int i = 0; i < lat.site_count(); ++i) {
        if (is_susceptible(sigma, i)) out.push_back(lat.site(i));
    }
    return out;
}

bool is_robust(const SpinConfiguration& sigma) {
    const int count = sigma.lattice().site_count();
    for (int i = 0; i < count; ++i) {
        if (is_susceptible(sigma, i)) return false;
    }
    return true;
}

bool metropolis_step_in_place(SpinConfiguration& sigma, Rng& rng) {
    const auto idx = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(sigma.lattice().site_count())));
    if (energy_delta(sigma, sigma.lattice().site(idx)) <= 0.0) {
        sigma.flip_in_place(idx);
        return true;
    }
    return false;
}

SpinConfiguration metropolis_step(const SpinConfiguration& sigma, Rng& rng) {
    SpinConfiguration out = sigma;
    metropolis_step_in_place(out, rng);
    return out;
}

SusceptibleSet::SusceptibleSet(const SpinConfiguration& sigma)
    : pos_(static_cast<std::size_t>(sigma.lattice().site_count()), -1) {
    for (int i = 0; i < sigma.lattice().site_count(); ++i) {
        if (is_susceptible(sigma, i)) insert(i);
    }
}

void SusceptibleSet::insert(int idx) {
    pos_[static_cast<std::size_t>(idx)] = static_cast<int>(members_.size());
    members_.push_back(idx);
}

void SusceptibleSet::erase(int idx) {
    const int p = pos_[static_cast<std::size_t>(idx)];
    const int last = members_.back();
    members_[static_cast<std::size_t>(p)] = last;
    pos_[static_cast<std::size_t>(last)] = p;
    members_.pop_back();
    pos_[static_cast<std::size_t>(idx)] = -1;
}

void SusceptibleSet::refresh(const SpinConfiguration& sigma, int idx) {
    const bool now = is_susceptible(sigma, idx);
    if (now && !contains(idx)) insert(idx);
    else if (!now && contains(idx)) erase(idx);
}

void SusceptibleSet::flip(SpinConfiguration& sigma, int idx) {
    sigma.flip_in_place(idx);
    refresh(sigma, idx);
    for (int j : sigma.lattice().neighbors(idx)) refresh(sigma, j);
}

namespace {

// Trials up to and including the first success, success probability p.
std::uint64_t geometric_trials(Rng& rng, double p) {
    if (p >= 1.0) return 1;
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double t = std::floor(std::log(u) / std::log1p(-p));
    if (!(t < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(t) + 1;
}

void accept(SpinConfiguration& sigma, SusceptibleSet& live, int idx, RelaxStats* stats) {
    if (stats) {
        const double delta = energy_delta(sigma, sigma.lattice().site(idx));
        stats->max_accepted_delta = std::max(stats->max_accepted_delta, delta);
        ++stats->flips;
    }
    live.flip(sigma, idx);
}

}  // namespace

void relax_in_place(SpinConfiguration& sigma, const RelaxationMode& mode, Rng& rng, RelaxStats* stats) {
    SusceptibleSet live(sigma);
    if (std::holds_alternative<ToRobust>(mode)) {
        while (!live.empty()) {
            const int pick = live.at(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(live.size()))));
            accept(sigma, live, pick, stats);
        }
        if (stats) stats->reached_robust = true;
        return;
    }

    const std::uint64_t kappa = std::get<Capped>(mode).kappa;
    const double sites = static_cast<double>(sigma.lattice().site_count());
    std::uint64_t used = 0;
    while (!live.empty()) {
        const std::uint64_t trials = geometric_trials(rng, live.size() / sites);
        if (trials > kappa - used) {
            used = kappa;
            break;
        }
        used += trials;
        const int pick = live.at(static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(live.size()))));
        accept(sigma, live, pick, stats);
    }
    if (stats) {
        stats->proposals += kappa;
        stats->reached_robust = live.empty();
    }
}

SpinConfiguration relax(const SpinConfiguration& sigma, const RelaxationMode& mode, Rng& rng, RelaxStats* stats) {
    SpinConfiguration out = sigma;
    relax_in_place(out, mode, rng, stats);
    return out;
}

std::optional<SpinConfiguration> forced_endpoint(const SpinConfiguration& sigma) {
    const Lattice& lat = sigma.lattice();
    const auto count = static_cast<std::size_t>(lat.site_count());
    std::vector<char> in(count, 0);
    std::vector<int> degree(count, 0);
    std::vector<int> stack;
    for (std::size_t s = 0; s < count; ++s) {
        const int i = static_cast<int>(s);
        in[s] = sigma.is_plus(i) ? 1 : 0;
        degree[s] = sigma.plus_neighbors(i);
        if (in[s] && degree[s] < 2) stack.push_back(i);
    }
    // Peel to the 2-core: plus sites that keep two plus neighbours forever.
    while (!stack.empty()) {
        const int s = stack.back();
        stack.pop_back();
        if (!in[static_cast<std::size_t>(s)]) continue;
        in[static_cast<std::size_t>(s)] = 0;
        for (int nb : lat.neighbors(s)) {
            if (--degree[static_cast<std::size_t>(nb)] < 2 && in[static_cast<std::size_t>(nb)]) stack.push_back(nb);
        }
    }
    // Threshold-2 bootstrap from the core; degree now counts core neighbours.
    for (std::size_t s = 0; s < count; ++s) {
        if (!in[s] && degree[s] >= 2) stack.push_back(static_cast<int>(s));
    }
    while (!stack.empty()) {
        const int s = stack.back();
        stack.pop_back();
        if (in[static_cast<std::size_t>(s)]) continue;
        in[static_cast<std::size_t>(s)] = 1;
        for (int nb : lat.neighbors(s)) {
            if (++degree[static_cast<std::size_t>(nb)] >= 2 && !in[static_cast<std::size_t>(nb)]) stack.push_back(nb);
        }
    }
    SpinConfiguration out = sigma;
    for (std::size_t s = 0; s < count; ++s) {
        const int i = static_cast<int>(s);
        if (sigma.is_plus(i) && !in[s]) return std::nullopt;
        if (!sigma.is_plus(i) && in[s]) out.flip_in_place(i);
    }
    return out;
}

Rational AbsorptionDistribution::total() const {
    Rational sum = 0;
    for (const auto& [key, entry] : entries) sum += entry.probability;
    return sum;
}

namespace {

struct PackedHash {
    std::size_t operator()(const std::vector<std::uint64_t>& words) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (std::uint64_t w : words) h = splitmix64(h ^ w);
        return static_cast<std::size_t>(h);
    }
};

// Endpoint distribution keyed by packed spins; configs stored once globally.
using Endpoints = std::map<std::vector<std::uint64_t>, Rational>;

class AbsorptionSolver {
public:
    explicit AbsorptionSolver(std::size_t budget) : budget_(budget) {}

    const Endpoints& solve(SpinConfiguration& sigma) {
        auto key = sigma.packed();
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        Endpoints result;
        if (auto forced = forced_endpoint(sigma)) {
            auto end = forced->packed();
            result.emplace(end, Rational(1));
            robust_.try_emplace(std::move(end), std::move(*forced));
        } else {
            std::vector<int> moves;
            for (int i = 0; i < sigma.lattice().site_count(); ++i) {
                if (is_susceptible(sigma, i)) moves.push_back(i);
            }
            const Rational share(1, static_cast<long>(moves.size()));
            for (int idx : moves) {
                sigma.flip_in_place(idx);
                const Endpoints& sub = solve(sigma);
                for (const auto& [k, p] : sub) result[k] += share * p;
                sigma.flip_in_place(idx);
            }
        }
        if (memo_.size() >= budget_) {
            throw ResourceError("downhill enumeration exceeded " + std::to_string(budget_) +
                                " configurations");
        }
        return memo_.emplace(std::move(key), std::move(result)).first->second;
    }

    const SpinConfiguration& config(const std::vector<std::uint64_t>& key) const { return robust_.at(key); }

private:
    std::size_t budget_;
    std::unordered_map<std::vector<std::uint64_t>, Endpoints, PackedHash> memo_;
    std::unordered_map<std::vector<std::uint64_t>, SpinConfiguration, PackedHash> robust_;
};

}  // namespace

AbsorptionDistribution downhill_absorption(const SpinConfiguration& sigma, std::size_t budget) {
    AbsorptionSolver solver(budget);
    SpinConfiguration work = sigma;
    const Endpoints endpoints = solver.solve(work);
    AbsorptionDistribution out;
    for (const auto& [key, p] : endpoints) {
        out.entries.emplace(key, AbsorptionDistribution::Entry{solver.config(key), p});
    }
    return out;
}

std::string to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::Rectangle: return "rectangle";
        case ComponentKind::StripeRows: return "stripe_rows";
        case ComponentKind::StripeCols: return "stripe_cols";
    }
    return "unknown";
}

namespace {

// Occupied coordinates along one axis as a cyclic interval. Returns false
// when they do not form a single run.
bool cyclic_interval(const std::vector<char>& occupied, int& start, int& length) {
    const int n = static_cast<int>(occupied.size());
    length = static_cast<int>(std::count(occupied.begin(), occupied.end(), 1));
    if (length == n) {
        start = 0;
        return true;
    }
    int starts = 0;
    for (int x = 0; x < n; ++x) {
        if (occupied[static_cast<std::size_t>(x)] && !occupied[static_cast<std::size_t>((x + n - 1) % n)]) {
            ++starts;
            start = x;
        }
    }
    return starts == 1;
}

}  // namespace

RobustClassification classify_robust(const SpinConfiguration& sigma) {
    RobustClassification out;
    const Lattice& lat = sigma.lattice();
    const int n = lat.side();
    if (sigma.is_all_plus()) {
        out.all_plus = true;
        return out;
    }

    std::vector<char> seen(static_cast<std::size_t>(lat.site_count()), 0);
    std::deque<int> queue;
    for (int s = 0; s < lat.site_count(); ++s) {
        if (!sigma.is_plus(s) || seen[static_cast<std::size_t>(s)]) continue;
        std::vector<char> rows(static_cast<std::size_t>(n), 0);
        std::vector<char> cols(static_cast<std::size_t>(n), 0);
        int size = 0;
        seen[static_cast<std::size_t>(s)] = 1;
        queue.push_back(s);
        while (!queue.empty()) {
            const int cur = queue.front();
            queue.pop_front();
            ++size;
            rows[static_cast<std::size_t>(cur / n)] = 1;
            cols[static_cast<std::size_t>(cur % n)] = 1;
            for (int nb : lat.neighbors(cur)) {
                if (sigma.is_plus(nb) && !seen[static_cast<std::size_t>(nb)]) {
                    seen[static_cast<std::size_t>(nb)] = 1;
                    queue.push_back(nb);
                }
            }
        }

        RobustComponent comp;
        int r0 = 0, c0 = 0;
        const bool rows_ok = cyclic_interval(rows, r0, comp.height);
        const bool cols_ok = cyclic_interval(cols, c0, comp.width);
        comp.anchor = {r0, c0};
        const std::string where = "component at " + to_string(lat.site(s));
        if (!rows_ok || !cols_ok || size != comp.height * comp.width) {
            throw CharacterizationViolation(where + " is not a rectangle or stripe");
        }
        if (comp.height == n) {
            comp.kind = ComponentKind::StripeCols;
        } else if (comp.width == n) {
            comp.kind = ComponentKind::StripeRows;
        } else {
            comp.kind = ComponentKind::Rectangle;
            if (comp.width < 2 || comp.height < 2 || comp.width > n - 2 || comp.height > n - 2) {
                throw CharacterizationViolation(where + " has a side outside [2, N-2]");
            }
        }
        out.components.push_back(comp);
    }

    for (std::size_t a = 0; a < out.components.size(); ++a) {
        for (std::size_t b = a + 1; b < out.components.size(); ++b) {
            const auto& p = out.components[a];
            const auto& q = out.components[b];
            const int d = interval_distance(p.top(), p.height, q.top(), q.height, n) +
                          interval_distance(p.left(), p.width, q.left(), q.width, n);
            if (d <= 2) {
                throw CharacterizationViolation("components at distance " + std::to_string(d) +
                                                " (must exceed 2)");
            }
        }
    }
    return out;
}

}  // namespace isingmdp
