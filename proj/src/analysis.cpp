#include "isingmdp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

namespace isingmdp {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Analytic: return "analytic";
        case Provenance::LinearSolve: return "linear-solve";
        case Provenance::ValueIteration: return "value-iteration";
    }
    return "?";
}

namespace {

void check_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("discount factor must lie in (0, 1)");
}

void check_policy(const FiniteMdp& mdp, const MdpPolicy& policy) {
    if (static_cast<int>(policy.choices.size()) != mdp.size()) {
        throw std::invalid_argument("policy does not cover every state");
    }
    for (int s = 0; s < mdp.size(); ++s) {
        const auto& c = policy.choices[static_cast<std::size_t>(s)];
        if (c.empty()) throw std::invalid_argument("policy undefined in state " + mdp.state(s).label);
        for (int a : c) {
            if (a < 0 || a >= static_cast<int>(mdp.state(s).actions.size())) {
                throw std::invalid_argument("policy uses an invalid action in state " + mdp.state(s).label);
            }
        }
    }
}

double row_update(const std::vector<std::pair<int, double>>& row, double reward, const std::vector<double>& v,
                  int s, double lambda) {
    double acc = reward;
    double self = 0.0;
    for (const auto& [t, p] : row) {
        if (t == s) self += p;
        else acc += lambda * p * v[static_cast<std::size_t>(t)];
    }
    return acc / (1.0 - lambda * self);
}

std::vector<std::pair<int, double>> to_double_row(const std::vector<Transition>& row) {
    std::vector<std::pair<int, double>> out;
    out.reserve(row.size());
    for (const auto& t : row) out.emplace_back(t.target, t.probability.convert_to<double>());
    return out;
}

std::vector<double> dense_solve(const InducedChain& chain, double lambda) {
    const auto n = static_cast<Eigen::Index>(chain.rows.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        b(s) = chain.reward[static_cast<std::size_t>(s)];
        for (const auto& [t, p] : chain.rows[static_cast<std::size_t>(s)]) a(s, t) -= lambda * p;
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    return {x.data(), x.data() + n};
}

}  // namespace

InducedChain induced_chain(const FiniteMdp& mdp, const MdpPolicy& policy) {
    check_policy(mdp, policy);
    InducedChain chain;
    chain.rows.resize(static_cast<std::size_t>(mdp.size()));
    chain.reward.resize(static_cast<std::size_t>(mdp.size()));
    for (int s = 0; s < mdp.size(); ++s) {
        const auto& state = mdp.state(s);
        const auto& choice = policy.choices[static_cast<std::size_t>(s)];
        const double w = 1.0 / static_cast<double>(choice.size());
        std::vector<double> dense(static_cast<std::size_t>(mdp.size()), 0.0);
        std::vector<int> touched;
        for (int a : choice) {
            for (const auto& t : state.actions[static_cast<std::size_t>(a)].row) {
                if (dense[static_cast<std::size_t>(t.target)] == 0.0) touched.push_back(t.target);
                dense[static_cast<std::size_t>(t.target)] += w * t.probability.convert_to<double>();
            }
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (int t : touched) chain.rows[static_cast<std::size_t>(s)].emplace_back(t, dense[static_cast<std::size_t>(t)]);
        chain.reward[static_cast<std::size_t>(s)] = state.reward;
    }
    return chain;
}

ValueTable policy_evaluation(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda, double tol) {
    check_lambda(lambda);
    const InducedChain chain = induced_chain(mdp, policy);
    ValueTable table{std::vector<double>(static_cast<std::size_t>(mdp.size()), 0.0), lambda,
                     Provenance::LinearSolve};
    if (lambda > 0.99) {
        table.values = dense_solve(chain, lambda);
        return table;
    }
    auto& v = table.values;
    const double factor = lambda / (1.0 - lambda);
    for (int sweep = 0; sweep < 1'000'000; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < mdp.size(); ++s) {
            const double next = row_update(chain.rows[static_cast<std::size_t>(s)],
                                           chain.reward[static_cast<std::size_t>(s)], v, s, lambda);
            delta = std::max(delta, std::abs(next - v[static_cast<std::size_t>(s)]));
            v[static_cast<std::size_t>(s)] = next;
        }
        if (delta * factor <= tol) break;
    }
    return table;
}

double analytic_value_x(AuxStateX s, double lambda) {
    check_lambda(lambda);
    if (s.i < s.j) std::swap(s.i, s.j);
    if (s.i == 1 || s.j == 1 || s.j < 0) throw std::domain_error("gap of length 1 is not a state");
    const double l = lambda;
    if (s.i == 0) return 1.0 / (1.0 - l);
    if (s.i >= 4) return 2.0 * l / (3.0 - l) * analytic_value_x({s.i - 1, s.j}, l);
    if (s.i == 3) {
        const double denom = 8.0 * (18.0 - 7.0 * l);
        return 31.0 * l / denom * analytic_value_x({2, s.j}, l) + 57.0 * l / denom * analytic_value_x({0, s.j}, l);
    }
    return 3.0 * l / (4.0 - l) * analytic_value_x({0, s.j}, l);
}

std::vector<double> q_values(const FiniteMdp& mdp, const std::vector<double>& v, int s, double lambda) {
    const auto& state = mdp.state(s);
    std::vector<double> q;
    q.reserve(state.actions.size());
    for (const auto& a : state.actions) {
        double acc = 0.0;
        for (const auto& t : a.row) acc += t.probability.convert_to<double>() * v[static_cast<std::size_t>(t.target)];
        q.push_back(state.reward + lambda * acc);
    }
    return q;
}

ValueIterationResult value_iteration(const FiniteMdp& mdp, double lambda, double tol) {
    check_lambda(lambda);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    ValueIterationResult result;
    result.values = {std::vector<double>(static_cast<std::size_t>(mdp.size()), 0.0), lambda,
                     Provenance::ValueIteration};
    std::vector<std::vector<std::vector<std::pair<int, double>>>> rows(static_cast<std::size_t>(mdp.size()));
    for (int s = 0; s < mdp.size(); ++s) {
        for (const auto& a : mdp.state(s).actions) rows[static_cast<std::size_t>(s)].push_back(to_double_row(a.row));
    }
    auto& v = result.values.values;
    const double factor = lambda / (1.0 - lambda);
    for (int sweep = 0; sweep < 1'000'000; ++sweep) {
        double delta = 0.0;
        for (int s = 0; s < mdp.size(); ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& row : rows[static_cast<std::size_t>(s)]) {
                best = std::max(best, row_update(row, mdp.state(s).reward, v, s, lambda));
            }
            delta = std::max(delta, std::abs(best - v[static_cast<std::size_t>(s)]));
            v[static_cast<std::size_t>(s)] = best;
        }
        result.sweep_deltas.push_back(delta);
        if (delta * factor <= tol) break;
    }
    for (int s = 0; s < mdp.size(); ++s) {
        const auto q = q_values(mdp, v, s, lambda);
        const double best = *std::max_element(q.begin(), q.end());
        const double slack = 1e-9 * std::max(std::abs(best), std::numeric_limits<double>::min());
        std::vector<int> argmax;
        for (std::size_t a = 0; a < q.size(); ++a) {
            if (q[a] >= best - slack) argmax.push_back(static_cast<int>(a));
        }
        result.greedy.push_back(std::move(argmax));
    }
    return result;
}

double bellman_residual(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda) {
    const ValueTable table = policy_evaluation(mdp, policy, lambda);
    double residual = 0.0;
    for (int s = 0; s < mdp.size(); ++s) {
        const auto q = q_values(mdp, table.values, s, lambda);
        residual = std::max(residual, *std::max_element(q.begin(), q.end()) - table[s]);
    }
    return residual;
}

namespace {

template <class F>
double bisect(F&& f, std::pair<double, double> bracket, double width, const std::string& what) {
    auto [lo, hi] = bracket;
    if (!(lo < hi)) throw BracketError("empty bracket for " + what);
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0 && fhi == 0.0) throw BracketError(what + " is identically zero on the bracket");
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) {
        throw BracketError(what + " does not change sign on the bracket");
    }
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double find_lambda_crossing(const FiniteMdp& mdp, const MdpPolicy& a, const MdpPolicy& b, int s,
                            std::pair<double, double> bracket, double width) {
    auto diff = [&](double lambda) {
        return policy_evaluation(mdp, a, lambda)[s] - policy_evaluation(mdp, b, lambda)[s];
    };
    return bisect(diff, bracket, width, "value difference in state " + mdp.state(s).label);
}

double greedy_switch_lambda(const FiniteMdp& mdp, int s, std::string_view action_a, std::string_view action_b,
                            std::pair<double, double> bracket, double width) {
    const int ia = mdp.state(s).action_index(action_a);
    const int ib = mdp.state(s).action_index(action_b);
    if (ia < 0 || ib < 0) throw std::invalid_argument("action missing in state " + mdp.state(s).label);
    auto diff = [&](double lambda) {
        const auto vi = value_iteration(mdp, lambda);
        const auto q = q_values(mdp, vi.values.values, s, lambda);
        return q[static_cast<std::size_t>(ia)] - q[static_cast<std::size_t>(ib)];
    };
    return bisect(diff, bracket, width, "greedy Q difference in state " + mdp.state(s).label);
}

namespace {

// States from which the target is reachable through positive transitions.
std::vector<char> can_reach(const InducedChain& chain, int target) {
    const std::size_t n = chain.rows.size();
    std::vector<std::vector<int>> reverse(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (const auto& [t, p] : chain.rows[s]) {
            if (p > 0.0) reverse[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));
        }
    }
    std::vector<char> mark(n, 0);
    std::deque<int> queue{target};
    mark[static_cast<std::size_t>(target)] = 1;
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (int s : reverse[static_cast<std::size_t>(t)]) {
            if (!mark[static_cast<std::size_t>(s)]) {
                mark[static_cast<std::size_t>(s)] = 1;
                queue.push_back(s);
            }
        }
    }
    return mark;
}

}  // namespace

std::vector<MomentPair> hitting_time_moments(const FiniteMdp& mdp, const MdpPolicy& policy, int target) {
    const InducedChain chain = induced_chain(mdp, policy);
    const auto reach = can_reach(chain, target);
    for (int s = 0; s < mdp.size(); ++s) {
        if (!reach[static_cast<std::size_t>(s)]) {
            throw DivergenceError("state " + mdp.state(s).label + " cannot reach " + mdp.state(target).label);
        }
    }
    // Unknowns are all states but the target.
    std::vector<int> pos(static_cast<std::size_t>(mdp.size()), -1);
    Eigen::Index k = 0;
    for (int s = 0; s < mdp.size(); ++s) {
        if (s != target) pos[static_cast<std::size_t>(s)] = static_cast<int>(k++);
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    for (int s = 0; s < mdp.size(); ++s) {
        if (s == target) continue;
        for (const auto& [t, p] : chain.rows[static_cast<std::size_t>(s)]) {
            if (t != target) a(pos[static_cast<std::size_t>(s)], pos[static_cast<std::size_t>(t)]) -= p;
        }
    }
    const auto lu = a.partialPivLu();
    const Eigen::VectorXd m1 = lu.solve(Eigen::VectorXd::Ones(k));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (int s = 0; s < mdp.size(); ++s) {
        if (s == target) continue;
        for (const auto& [t, p] : chain.rows[static_cast<std::size_t>(s)]) {
            if (t != target) rhs(pos[static_cast<std::size_t>(s)]) += 2.0 * p * m1(pos[static_cast<std::size_t>(t)]);
        }
    }
    const Eigen::VectorXd f = lu.solve(rhs);
    std::vector<MomentPair> out(static_cast<std::size_t>(mdp.size()));
    for (int s = 0; s < mdp.size(); ++s) {
        if (s == target) continue;
        out[static_cast<std::size_t>(s)] = {m1(pos[static_cast<std::size_t>(s)]), f(pos[static_cast<std::size_t>(s)])};
    }
    return out;
}

int minimal_path_length(const FiniteMdp& mdp, const MdpPolicy& policy, int s, int target) {
    const InducedChain chain = induced_chain(mdp, policy);
    std::vector<int> dist(static_cast<std::size_t>(mdp.size()), -1);
    std::deque<int> queue{s};
    dist[static_cast<std::size_t>(s)] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        if (u == target) return dist[static_cast<std::size_t>(u)];
        for (const auto& [t, p] : chain.rows[static_cast<std::size_t>(u)]) {
            if (p > 0.0 && dist[static_cast<std::size_t>(t)] < 0) {
                dist[static_cast<std::size_t>(t)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(t);
            }
        }
    }
    throw DivergenceError("target " + mdp.state(target).label + " unreachable from " + mdp.state(s).label);
}

double first_passage_probability(const FiniteMdp& mdp, const MdpPolicy& policy, int s, int target, int t) {
    if (t < 0) return 0.0;
    if (s == target) return t == 0 ? 1.0 : 0.0;
    const InducedChain chain = induced_chain(mdp, policy);
    std::vector<double> mass(static_cast<std::size_t>(mdp.size()), 0.0);
    mass[static_cast<std::size_t>(s)] = 1.0;
    for (int step = 1; step <= t; ++step) {
        std::vector<double> next(mass.size(), 0.0);
        for (std::size_t u = 0; u < mass.size(); ++u) {
            if (mass[u] == 0.0) continue;
            for (const auto& [v, p] : chain.rows[u]) next[static_cast<std::size_t>(v)] += mass[u] * p;
        }
        const double arrived = next[static_cast<std::size_t>(target)];
        if (step == t) return arrived;
        next[static_cast<std::size_t>(target)] = 0.0;
        mass.swap(next);
    }
    return 0.0;
}

double small_lambda_threshold(const FiniteMdp& mdp, const MdpPolicy& a, const MdpPolicy& b, int s, int target) {
    int ta = minimal_path_length(mdp, a, s, target);
    int tb = minimal_path_length(mdp, b, s, target);
    const MdpPolicy* shorter = &a;
    if (ta == tb) throw std::invalid_argument("rules share the same minimal path length");
    if (ta > tb) {
        std::swap(ta, tb);
        shorter = &b;
    }
    const double p = first_passage_probability(mdp, *shorter, s, target, ta);
    return std::pow(p, 1.0 / static_cast<double>(tb - ta));
}

double resolvent_partial_sum(const FiniteMdp& mdp, const MdpPolicy& policy, double lambda, int s, int horizon) {
    const InducedChain chain = induced_chain(mdp, policy);
    std::vector<double> w = chain.reward;  // P^t r
    double sum = 0.0;
    double weight = 1.0;
    for (int t = 0; t <= horizon; ++t) {
        sum += weight * w[static_cast<std::size_t>(s)];
        std::vector<double> next(w.size(), 0.0);
        for (std::size_t u = 0; u < w.size(); ++u) {
            for (const auto& [v, p] : chain.rows[u]) next[u] += p * w[static_cast<std::size_t>(v)];
        }
        w.swap(next);
        weight *= lambda;
    }
    return sum;
}

HittingStats summarize(std::span<const double> values) {
    HittingStats st;
    st.sample_count = values.size();
    if (values.empty()) throw std::invalid_argument("no samples");
    const double n = static_cast<double>(values.size());
    st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : values) ss += (x - st.mean) * (x - st.mean);
    st.variance = values.size() > 1 ? ss / (n - 1.0) : 0.0;
    const double half = 1.96 * std::sqrt(st.variance / n);
    st.ci95_low = st.mean - half;
    st.ci95_high = st.mean + half;
    return st;
}

namespace {

std::vector<double> resolved_or_throw(std::span<const HittingSample> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    std::size_t missing = 0;
    for (const auto& s : samples) {
        if (s) out.push_back(static_cast<double>(*s));
        else ++missing;
    }
    if (missing) throw CensoringError(std::to_string(missing) + " unresolved hitting times");
    return out;
}

}  // namespace

HittingStats estimate_hitting(std::span<const HittingSample> samples) {
    return summarize(resolved_or_throw(samples));
}

HittingStats estimate_value(std::span<const HittingSample> samples, double lambda) {
    check_lambda(lambda);
    std::vector<double> values = resolved_or_throw(samples);
    for (double& x : values) x = std::pow(lambda, x) / (1.0 - lambda);
    return summarize(values);
}

double pgf_estimate(std::span<const HittingSample> samples, double lambda) {
    return (1.0 - lambda) * estimate_value(samples, lambda).mean;
}

double two_sample_p_value(const HittingStats& a, const HittingStats& b) {
    const double se = std::sqrt(a.variance / static_cast<double>(a.sample_count) +
                                b.variance / static_cast<double>(b.sample_count));
    if (se == 0.0) return a.mean == b.mean ? 1.0 : 0.0;
    const double z = std::abs(a.mean - b.mean) / se;
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace isingmdp
