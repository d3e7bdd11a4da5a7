#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "isingmdp/aux_states.hpp"
#include "isingmdp/dynamics.hpp"

namespace isingmdp {

struct Transition {
    int target = 0;
    Rational probability;
};

struct MdpAction {
    std::string name;
    std::vector<Transition> row;
};

struct MdpState {
    std::string label;
    double reward = 0.0;
    std::vector<MdpAction> actions;

    /// -1 when the state has no action of that name.
    int action_index(std::string_view name) const noexcept;
};

/// Explicit finite model (S, A, P, r) with exact rational kernel rows.
class FiniteMdp {
public:
    int add_state(std::string label, double reward);
    void add_action(int state, std::string name, std::vector<Transition> row);

    int size() const noexcept { return static_cast<int>(states_.size()); }
    const MdpState& state(int s) const { return states_.at(static_cast<std::size_t>(s)); }
    const std::vector<MdpState>& states() const noexcept { return states_; }

    std::optional<int> find(std::string_view label) const;
    /// Throws std::out_of_range for an unknown label.
    int index(std::string_view label) const;

    /// Every row sums to exactly 1 with valid targets and every state has an
    /// action. Throws std::logic_error otherwise.
    void validate() const;

    /// Line-oriented text: header, one "state" line per state followed by
    /// its "action" lines with label=p/q entries, then "end".
    std::string serialize() const;
    static FiniteMdp deserialize(std::string_view text);

private:
    std::vector<MdpState> states_;
    std::unordered_map<std::string, int> index_;
};

/// Uniform randomisation over the listed action indices of each state.
struct MdpPolicy {
    std::vector<std::vector<int>> choices;
};

/// Outcome distribution of a single gap of length `gap` after a flip at
/// distance `distance` (1 or 2) from one of its bounding stripes. Throws
/// ActionUnavailable for distance 2 into a gap shorter than 3.
std::vector<std::pair<int, Rational>> gap_kernel(int gap, int distance);

std::string x_label(int i, int j);
AuxStateX parse_x_label(std::string_view label);

/// Stripe-stripe auxiliary model on an N-torus. States are (0,0), the
/// single-stripe states (g,0) and (0,g) for 2 <= g <= N-1, and the pairs
/// with i, j >= 2 and i + j <= N-2, listed by increasing i + j. Every state
/// offers noop; a_l*/a_s* act on the longest/shortest gap.
FiniteMdp build_stripe_stripe_mdp(int n);

}  // namespace isingmdp
