#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isingmdp/aux_states.hpp"
#include "isingmdp/finite_mdp.hpp"

namespace isingmdp {

enum class Provenance { Analytic, LinearSolve, ValueIteration };
std::string_view to_string(Provenance p);

struct ValueTable {
    std::vector<double> values;
    double lambda = 0.0;
    Provenance provenance = Provenance::LinearSolve;

    double operator[](int s) const { return values.at(static_cast<std::size_t>(s)); }
};

/// Markov chain of a randomised policy: averaged kernel rows and rewards.
struct InducedChain {
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> reward;
};

InducedChain induced_chain(const FiniteMdp& mdp, const MdpPolicy& policy);

/// Solves v = r + lambda P v. Gauss-Seidel sweeps in state order, with the
/// self-loop of each row eliminated, until lambda/(1-lambda) times the sweep
/// change is below tol. Dense LU for lambda > 0.99.
ValueTable policy_evaluation(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda, double tol = 1e-12);

/// Closed-form value of the distance-one family on the stripe-stripe model.
/// Throws DomainError-like std::domain_error for a gap of length 1.
double analytic_value_x(AuxStateX s, double lambda);

struct ValueIterationResult {
    ValueTable values;
    /// Per state, the actions within relative 1e-9 of the best Q value.
    std::vector<std::vector<int>> greedy;
    /// Sup-norm change of each sweep.
    std::vector<double> sweep_deltas;
};

ValueIterationResult value_iteration(const FiniteMdp& mdp, double lambda, double tol = 1e-12);

/// Q(s, a) = r(s) + lambda sum_t P(t | s, a) v(t) for every action of s.
std::vector<double> q_values(const FiniteMdp& mdp, const std::vector<double>& v, int s, double lambda);

/// max_s [max_a Q(s, a) - v_policy(s)], clamped at zero.
double bellman_residual(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda);

class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bisection of lambda -> v_A(s) - v_B(s) down to the given bracket width.
double find_lambda_crossing(const FiniteMdp& mdp, const MdpPolicy& a, const MdpPolicy& b, int s,
                            std::pair<double, double> bracket, double width = 1e-6);

/// Bisection of lambda -> Q*(s, action_a) - Q*(s, action_b), where Q* uses
/// the optimal values from value_iteration.
double greedy_switch_lambda(const FiniteMdp& mdp, int s, std::string_view action_a, std::string_view action_b,
                            std::pair<double, double> bracket, double width = 1e-6);

struct MomentPair {
    double e_tau = 0.0;
    double e_tau_factorial2 = 0.0;  // E[tau (tau - 1)]
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// First-step equations m = 1 + P m and f = P (f + 2 m) off the target.
/// Throws DivergenceError when some state cannot reach the target.
std::vector<MomentPair> hitting_time_moments(const FiniteMdp& mdp, const MdpPolicy& policy, int target);

/// Breadth-first search over positive-probability transitions.
int minimal_path_length(const FiniteMdp& mdp, const MdpPolicy& policy, int s, int target);

/// P(tau = t) for the first passage from s to target.
double first_passage_probability(const FiniteMdp& mdp, const MdpPolicy& policy, int s, int target, int t);

/// [P_A(tau = t_A)]^(1 / (t_B - t_A)) for the rule with the shorter minimal
/// path (A) against the longer one (B).
double small_lambda_threshold(const FiniteMdp& mdp, const MdpPolicy& a, const MdpPolicy& b, int s, int target);

/// sum_{t <= horizon} lambda^t (P^t r)(s).
double resolvent_partial_sum(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda, int s, int horizon);

struct HittingStats {
    std::size_t sample_count = 0;
    double mean = 0.0;
    double variance = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double resolved_fraction = 1.0;
};

class CensoringError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using HittingSample = std::optional<std::int64_t>;

/// Mean, unbiased variance and mean +/- 1.96 s / sqrt(n).
HittingStats summarize(std::span<const double> values);
HittingStats estimate_hitting(std::span<const HittingSample> samples);
/// Statistics of lambda^tau / (1 - lambda).
HittingStats estimate_value(std::span<const HittingSample> samples, double lambda);
/// (1 - lambda) times the estimate_value mean, i.e. the sample mean of lambda^tau.
double pgf_estimate(std::span<const HittingSample> samples, double lambda);

/// Two-sided p-value of the large-sample (Welch z) test for equal means.
double two_sample_p_value(const HittingStats& a, const HittingStats& b);

}  // namespace isingmdp
