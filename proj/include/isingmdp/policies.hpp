#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isingmdp/aux_states.hpp"
#include "isingmdp/finite_mdp.hpp"
#include "isingmdp/ising_mdp.hpp"
#include "isingmdp/rng.hpp"

namespace isingmdp {

enum class Family { XA1, XA2, YA1, YA1p, YA2, YA3, YA4, ZA1, ZA2, ZA3 };

/// Stable ids: "x.a1", "x.a2", "y.a1", "y.a1p", "y.a2", "y.a3", "y.a4",
/// "z.a1", "z.a2", "z.a3".
std::string_view family_id(Family family);
Family parse_family(std::string_view id);
Regime regime_of(Family family);
const std::vector<Family>& all_families();

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Family action sets A_k(s). Throws DomainError for a family of another
/// regime or a state with a gap of length 1 or a negative coordinate.
std::vector<AbstractAction> action_set_x(Family family, AuxStateX s);
std::vector<AbstractAction> action_set_y(Family family, AuxStateY s);
std::vector<AbstractAction> action_set_z(Family family, AuxStateZ s);

struct Decision {
    IsingAction action;
    AbstractAction abstract = AbstractAction::NoOp;
    std::string aux_state;
    /// The family's set had no available action here and the regime's
    /// fallback set was used instead.
    bool fallback = false;
};

/// Randomised decision rule: uniform over the family's available actions,
/// then uniform over that action's sites.
class DecisionRule {
public:
    explicit DecisionRule(Family family) : family_(family) {}

    Family family() const noexcept { return family_; }
    Regime regime() const noexcept { return regime_of(family_); }

    /// Requires a robust configuration. Propagates ClassificationError when
    /// the configuration does not belong to the rule's regime.
    Decision sample(const SpinConfiguration& sigma, Rng& rng) const;

private:
    Family family_;
};

/// Stripe-stripe model policy: uniform over the family's actions in every
/// state of build_stripe_stripe_mdp.
MdpPolicy x_family_policy(const FiniteMdp& mdp, Family family);

/// Deterministic member of the family: element `pick % |A_k(s)|` of each set.
MdpPolicy x_family_member(const FiniteMdp& mdp, Family family, std::size_t pick);

}  // namespace isingmdp
