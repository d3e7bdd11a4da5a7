#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "isingmdp/analysis.hpp"
#include "isingmdp/policies.hpp"

using namespace isingmdp;

namespace {

const FiniteMdp& model32() {
    static const FiniteMdp mdp = build_stripe_stripe_mdp(32);
    return mdp;
}

int at(int i, int j) { return model32().index(x_label(i, j)); }

// s --fast--> t with probability p (else stay), s --slow--> m --> t.
FiniteMdp race(const Rational& p) {
    FiniteMdp mdp;
    const int s = mdp.add_state("s", 0.0);
    const int m = mdp.add_state("m", 0.0);
    const int t = mdp.add_state("t", 1.0);
    mdp.add_action(s, "fast", {{t, p}, {s, 1 - p}});
    mdp.add_action(s, "slow", {{m, Rational(1)}});
    mdp.add_action(m, "go", {{t, Rational(1)}});
    mdp.add_action(t, "stay", {{t, Rational(1)}});
    return mdp;
}

std::set<int> family_actions(Family f, int s) {
    const auto& st = model32().state(s);
    std::set<int> out;
    for (AbstractAction a : action_set_x(f, parse_x_label(st.label))) out.insert(st.action_index(to_string(a)));
    return out;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("closed-form values") {
    CHECK(analytic_value_x({0, 0}, 0.9) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(analytic_value_x({2, 0}, 0.5) == doctest::Approx(6.0 / 7.0).epsilon(1e-14));
    CHECK(analytic_value_x({2, 2}, 0.5) == doctest::Approx(0.3673469387755102).epsilon(1e-14));
    CHECK(analytic_value_x({3, 0}, 0.5) == doctest::Approx(0.6059113300492611).epsilon(1e-12));
    for (int i : {0, 2, 3, 4, 7}) {
        for (int j : {0, 2, 3, 5}) CHECK(analytic_value_x({i, j}, 0.7) == analytic_value_x({j, i}, 0.7));
    }
    CHECK_THROWS_AS(analytic_value_x({1, 4}, 0.5), std::domain_error);
}

TEST_CASE("closed form agrees with policy evaluation") {
    const auto policy = x_family_member(model32(), Family::XA1, 0);
    for (double l : {0.3, 0.5, 0.8, 15.0 / 17.0, 0.95}) {
        const auto v = policy_evaluation(model32(), policy, l);
        CHECK(v.provenance == Provenance::LinearSolve);
        for (int i = 0; i <= 8; ++i) {
            for (int j = 0; j <= 8; ++j) {
                const auto s = model32().find(x_label(i, j));
                if (!s) continue;
                CHECK(std::abs(v[*s] - analytic_value_x({i, j}, l)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("dense and iterative solves agree") {
    const auto policy = x_family_policy(model32(), Family::XA2);
    const auto a = policy_evaluation(model32(), policy, 0.99);
    const auto b = policy_evaluation(model32(), policy, 0.995);
    CHECK(a[at(13, 13)] < b[at(13, 13)]);
    const auto vi = value_iteration(model32(), 0.99, 1e-13);
    CHECK(vi.values[at(13, 13)] >= a[at(13, 13)] - 1e-9);
}

TEST_CASE("every member of a family has the same values") {
    const auto& mdp = model32();
    for (Family f : {Family::XA1, Family::XA2}) {
        for (double l : {0.5, 0.9}) {
            const auto ref = policy_evaluation(mdp, x_family_policy(mdp, f), l);
            for (std::size_t pick : {0u, 1u}) {
                const auto v = policy_evaluation(mdp, x_family_member(mdp, f, pick), l);
                for (int s = 0; s < mdp.size(); ++s) CHECK(std::abs(v[s] - ref[s]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("values shrink geometrically along a long gap") {
    const double l = 0.8;
    const double rho = 2 * l / (3 - l);
    const auto v = policy_evaluation(model32(), x_family_policy(model32(), Family::XA1), l);
    for (int j : {0, 2, 3, 7}) {
        for (int i = 4; i + j <= 30 && i <= 29; ++i) {
            const auto s = model32().find(x_label(i, j));
            const auto prev = model32().find(x_label(i - 1, j));
            if (!s || !prev) continue;
            CHECK(v[*s] == doctest::Approx(rho * v[*prev]).epsilon(1e-10));
            CHECK(v[*s] < v[*prev]);
        }
    }
}

TEST_CASE("greedy sets switch families at the critical discount") {
    const auto& mdp = model32();
    auto check = [&](double l, bool a1, bool a2) {
        const auto vi = value_iteration(mdp, l);
        CHECK(vi.values.provenance == Provenance::ValueIteration);
        for (int s = 0; s < mdp.size(); ++s) {
            const auto x = parse_x_label(mdp.state(s).label);
            if (x.i < 5 || x.j < 5) continue;
            const std::set<int> greedy(vi.greedy[static_cast<std::size_t>(s)].begin(),
                                       vi.greedy[static_cast<std::size_t>(s)].end());
            const auto f1 = family_actions(Family::XA1, s);
            const auto f2 = family_actions(Family::XA2, s);
            std::set<int> expected;
            if (a1) expected.insert(f1.begin(), f1.end());
            if (a2) expected.insert(f2.begin(), f2.end());
            INFO(mdp.state(s).label, " lambda ", l);
            CHECK(greedy == expected);
        }
    };
    check(0.95, true, false);
    check(0.80, false, true);
    check(15.0 / 17.0, true, true);
}

TEST_CASE("bellman residuals") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const auto a2 = x_family_policy(mdp, Family::XA2);
    CHECK(bellman_residual(mdp, a1, 0.95) <= 1e-10);
    CHECK(bellman_residual(mdp, a1, 0.80) > 1e-6);
    CHECK(bellman_residual(mdp, a2, 0.80) <= 1e-10);
    CHECK(bellman_residual(mdp, a2, 0.95) > 1e-6);

    FiniteMdp single;
    const int t = single.add_state("t", 1.0);
    single.add_action(t, "stay", {{t, Rational(1)}});
    CHECK(bellman_residual(single, MdpPolicy{{{0}}}, 0.7) == 0.0);
}

TEST_CASE("lambda crossings") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const auto a2 = x_family_policy(mdp, Family::XA2);
    for (auto [i, j] : {std::pair{13, 13}, std::pair{7, 5}, std::pair{9, 9}}) {
        CHECK(std::abs(find_lambda_crossing(mdp, a1, a2, at(i, j), {0.8, 0.95}) - 15.0 / 17.0) <= 1e-4);
    }
    CHECK(std::abs(greedy_switch_lambda(mdp, at(13, 13), "a_l1", "a_l2", {0.8, 0.95}) - 15.0 / 17.0) <= 1e-4);
    CHECK_THROWS_AS(find_lambda_crossing(mdp, a1, a1, at(13, 13), {0.8, 0.95}), BracketError);
    CHECK_THROWS_AS(find_lambda_crossing(mdp, a1, a2, at(2, 2), {0.8, 0.95}), BracketError);
    CHECK_THROWS_AS(find_lambda_crossing(mdp, a1, a2, at(13, 13), {0.9, 0.95}), BracketError);
}

TEST_CASE("hitting time moments") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const int target = at(0, 0);
    const auto m = hitting_time_moments(mdp, a1, target);
    CHECK(m[static_cast<std::size_t>(at(2, 0))].e_tau == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(m[static_cast<std::size_t>(at(2, 0))].e_tau_factorial2 == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(m[static_cast<std::size_t>(target)].e_tau == 0.0);
    CHECK(m[static_cast<std::size_t>(at(13, 13))].e_tau > minimal_path_length(mdp, a1, at(13, 13), target));

    MdpPolicy idle;
    for (const auto& st : mdp.states()) idle.choices.push_back({st.action_index("noop")});
    CHECK_THROWS_AS(hitting_time_moments(mdp, idle, target), DivergenceError);
}

TEST_CASE("discount limit recovers the moments") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const auto m = hitting_time_moments(mdp, a1, at(0, 0));
    const double l = 0.999;
    const double v = policy_evaluation(mdp, a1, l)[at(2, 0)];
    const double gap = 1.0 / (1.0 - l) - v;
    CHECK(std::abs(gap - 4.0 / 3.0) <= 1e-3);
    CHECK(gap == doctest::Approx(4.0 / (4.0 - l)).epsilon(1e-9));
    const double second = 2.0 / (1.0 - l) * (v + 4.0 / 3.0 - 1.0 / (1.0 - l));
    CHECK(second == doctest::Approx(8.0 / 9.0).epsilon(1e-2));

    const std::size_t s = static_cast<std::size_t>(at(13, 13));
    const double big = 1.0 / (1.0 - l) - policy_evaluation(mdp, a1, l)[at(13, 13)];
    CHECK(std::abs(big - m[s].e_tau) <= 2.0 * (1.0 - l) / 2.0 * m[s].e_tau_factorial2);
}

TEST_CASE("minimal paths and first passage") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const int target = at(0, 0);
    CHECK(minimal_path_length(mdp, a1, at(2, 2), target) == 2);
    CHECK(minimal_path_length(mdp, a1, target, target) == 0);
    CHECK(first_passage_probability(mdp, a1, at(2, 0), target, 1) == doctest::Approx(0.75));
    CHECK(first_passage_probability(mdp, a1, at(2, 0), target, 2) == doctest::Approx(0.75 * 0.25));
}

TEST_CASE("small discount threshold") {
    const auto mdp = race(Rational(1, 4));
    const MdpPolicy fast{{{0}, {0}, {0}}};
    const MdpPolicy slow{{{1}, {0}, {0}}};
    const int s = mdp.index("s");
    const int t = mdp.index("t");
    CHECK(small_lambda_threshold(mdp, fast, slow, s, t) == doctest::Approx(0.25));
    CHECK(small_lambda_threshold(mdp, slow, fast, s, t) == doctest::Approx(0.25));
    // The threshold is sufficient: the values cross at p / (1 - p) = 1/3.
    CHECK(policy_evaluation(mdp, fast, 0.25)[s] > policy_evaluation(mdp, slow, 0.25)[s]);
    CHECK(policy_evaluation(mdp, fast, 0.34)[s] < policy_evaluation(mdp, slow, 0.34)[s]);
}

TEST_CASE("resolvent partial sums converge to the value") {
    const auto& mdp = model32();
    const auto a1 = x_family_policy(mdp, Family::XA1);
    const double v = policy_evaluation(mdp, a1, 0.6)[at(5, 3)];
    CHECK(resolvent_partial_sum(mdp, a1, 0.6, at(5, 3), 200) == doctest::Approx(v).epsilon(1e-10));
    CHECK(resolvent_partial_sum(mdp, a1, 0.6, at(5, 3), 3) < v);
}

TEST_CASE("hitting estimators") {
    const std::vector<HittingSample> threes(10, HittingSample{3});
    const auto st = estimate_value(threes, 0.5);
    CHECK(st.mean == doctest::Approx(0.25));
    CHECK(st.ci95_high - st.ci95_low == 0.0);
    const auto h = estimate_hitting(threes);
    CHECK(h.mean == 3.0);
    CHECK(h.variance == 0.0);
    CHECK(h.sample_count == 10);

    const std::vector<HittingSample> mixed{1, 4, 9, 2, 7, 3, 3, 8};
    for (double l : {0.3, 0.7, 0.95}) CHECK(pgf_estimate(mixed, l) == (1.0 - l) * estimate_value(mixed, l).mean);

    const std::vector<double> xs{1, 2, 3, 4};
    const auto sm = summarize(xs);
    CHECK(sm.mean == 2.5);
    CHECK(sm.variance == doctest::Approx(5.0 / 3.0));
    CHECK(sm.ci95_low == doctest::Approx(2.5 - 1.96 * std::sqrt(5.0 / 3.0 / 4.0)));

    const std::vector<HittingSample> censored{3, std::nullopt};
    CHECK_THROWS_AS(estimate_hitting(censored), CensoringError);
    CHECK_THROWS_AS(estimate_value(censored, 0.5), CensoringError);

    CHECK(two_sample_p_value(h, h) == doctest::Approx(1.0));
    HittingStats a{2000, 34.0, 20.0, 0, 0, 1};
    HittingStats b{2000, 36.0, 45.0, 0, 0, 1};
    CHECK(two_sample_p_value(a, b) < 1e-6);
}

}
