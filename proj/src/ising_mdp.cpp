#include "isingmdp/ising_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isingmdp/policies.hpp"

namespace isingmdp {

std::string to_string(const IsingAction& action) {
    if (action.is_noop()) return "noop";
    return std::to_string(action.site->row) + ":" + std::to_string(action.site->col);
}

SpinConfiguration apply_action(const SpinConfiguration& sigma, const IsingAction& action) {
    if (action.is_noop()) return sigma;
    return flip(sigma, sigma.lattice().wrap(action.site->row, action.site->col));
}

SpinConfiguration epoch(const SpinConfiguration& sigma, const IsingAction& action, const RelaxationMode& mode,
                        Rng& rng, RelaxStats* stats) {
    SpinConfiguration next = apply_action(sigma, action);
    relax_in_place(next, mode, rng, stats);
    return next;
}

double TrajectoryRecord::discounted_value(double lambda) const {
    if (!hitting_time) throw std::logic_error("discounted value of an unresolved trajectory");
    return std::pow(lambda, static_cast<double>(*hitting_time)) / (1.0 - lambda);
}

namespace {

std::string aux_string(const SpinConfiguration& sigma, Regime regime) {
    try {
        const Geometry g = analyze(sigma);
        switch (regime) {
            case Regime::X: return to_string(classify_x(g));
            case Regime::Y: return to_string(classify_y(g));
            case Regime::Z: return to_string(classify_z(g));
        }
    } catch (const std::runtime_error&) {
    }
    return "?";
}

}  // namespace

TrajectoryRecord run_policy(const SpinConfiguration& sigma0, const DecisionRule& rule, const RunOptions& options,
                            Rng& rng) {
    TrajectoryRecord rec;
    rec.initial_state = aux_string(sigma0, rule.regime());
    SpinConfiguration sigma = sigma0;
    if (options.observer) options.observer(0, sigma);
    if (sigma.is_all_plus()) {
        rec.hitting_time = 0;
        return rec;
    }

    for (std::int64_t t = 1; t <= options.max_epochs; ++t) {
        IsingAction action;
        if (!is_robust(sigma)) {
            ++rec.classification_misses;
        } else {
            try {
                const Decision d = rule.sample(sigma, rng);
                action = d.action;
                rec.fallbacks += d.fallback ? 1 : 0;
            } catch (const ClassificationError&) {
                ++rec.classification_misses;
            }
        }
        if (action.site && sigma.is_plus(*action.site)) ++rec.plus_flip_warnings;

        RelaxStats stats;
        sigma = epoch(sigma, action, options.mode, rng, &stats);
        rec.relax.flips += stats.flips;
        rec.relax.proposals += stats.proposals;
        rec.relax.max_accepted_delta = std::max(rec.relax.max_accepted_delta, stats.max_accepted_delta);
        rec.epochs = t;

        const bool robust = stats.reached_robust;
        if (!robust) ++rec.nonrobust_boundaries;
        if (options.record_log) rec.log.push_back({t, action, aux_string(sigma, rule.regime()), robust});
        if (options.observer) options.observer(t, sigma);
        if (sigma.is_all_plus()) {
            rec.hitting_time = t;
            break;
        }
    }
    rec.relax.reached_robust = rec.nonrobust_boundaries == 0;
    return rec;
}

}  // namespace isingmdp
