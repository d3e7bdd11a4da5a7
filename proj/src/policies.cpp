#include "isingmdp/policies.hpp"

#include <algorithm>
#include <array>

namespace isingmdp {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 10> kFamilies{{
    {Family::XA1, "x.a1"},
    {Family::XA2, "x.a2"},
    {Family::YA1, "y.a1"},
    {Family::YA1p, "y.a1p"},
    {Family::YA2, "y.a2"},
    {Family::YA3, "y.a3"},
    {Family::YA4, "y.a4"},
    {Family::ZA1, "z.a1"},
    {Family::ZA2, "z.a2"},
    {Family::ZA3, "z.a3"},
}};

void check_gap(int g) {
    if (g < 0 || g == 1) throw DomainError("gap length " + std::to_string(g) + " is not a robust gap");
}

void require_regime(Family family, Regime regime) {
    if (regime_of(family) != regime) {
        throw DomainError("family " + std::string(family_id(family)) + " is not a regime " +
                          std::string(to_string(regime)) + " family");
    }
}

// Flip distance a family uses inside one gap of the given length.
int distance_x_a1(int gap) { return gap == 3 ? 2 : 1; }
int distance_x_a2(int gap) { return gap == 3 || gap >= 5 ? 2 : 1; }
int distance_y_a1p(int gap) { return gap == 2 ? 1 : 2; }

AbstractAction long_action(int d) { return d == 1 ? AbstractAction::LongOne : AbstractAction::LongTwo; }
AbstractAction short_action(int d) { return d == 1 ? AbstractAction::ShortOne : AbstractAction::ShortTwo; }

// {a_l(d(longest)), a_s(d(shortest))}, the second only with two gaps.
std::vector<AbstractAction> per_gap(int i, int j, int (*distance)(int)) {
    if (i == 0 && j == 0) return {AbstractAction::NoOp};
    const int longest = std::max(i, j);
    const int shortest = std::min(i, j);
    std::vector<AbstractAction> out{long_action(distance(longest))};
    if (shortest > 0) out.push_back(short_action(distance(shortest)));
    return out;
}

}  // namespace

std::string_view family_id(Family family) {
    for (const auto& [f, id] : kFamilies) {
        if (f == family) return id;
    }
    return "?";
}

Family parse_family(std::string_view id) {
    for (const auto& [f, name] : kFamilies) {
        if (name == id) return f;
    }
    throw std::invalid_argument("unknown policy family '" + std::string(id) + "'");
}

Regime regime_of(Family family) {
    switch (family) {
        case Family::XA1:
        case Family::XA2: return Regime::X;
        case Family::YA1:
        case Family::YA1p:
        case Family::YA2:
        case Family::YA3:
        case Family::YA4: return Regime::Y;
        default: return Regime::Z;
    }
}

const std::vector<Family>& all_families() {
    static const std::vector<Family> families = [] {
        std::vector<Family> out;
        for (const auto& [f, id] : kFamilies) out.push_back(f);
        return out;
    }();
    return families;
}

std::vector<AbstractAction> action_set_x(Family family, AuxStateX s) {
    require_regime(family, Regime::X);
    check_gap(s.i);
    check_gap(s.j);
    return per_gap(s.i, s.j, family == Family::XA1 ? distance_x_a1 : distance_x_a2);
}

std::vector<AbstractAction> action_set_y(Family family, AuxStateY s) {
    require_regime(family, Regime::Y);
    check_gap(s.i);
    check_gap(s.j);
    check_gap(s.k);
    if (s.i == 0 && s.j == 0) return {AbstractAction::NoOp};
    using A = AbstractAction;
    const bool droplet = s.k != 0;
    switch (family) {
        case Family::YA1: return {A::ShortOne, A::LongOne};
        case Family::YA1p: {
            auto out = per_gap(s.i, s.j, distance_y_a1p);
            std::reverse(out.begin(), out.end());
            return out;
        }
        case Family::YA2:
            if (droplet) return {A::DropOne};
            return {A::LongOne, A::ShortOne};
        case Family::YA3:
            if (droplet) return {A::DropOne, A::LongOne, A::ShortOne};
            return {A::LongOne, A::ShortOne};
        case Family::YA4:
            if (droplet) return {A::Diagonal, A::LongOne, A::ShortOne};
            return {A::LongOne, A::ShortOne};
        default: break;
    }
    throw DomainError("unreachable family");
}

std::vector<AbstractAction> action_set_z(Family family, AuxStateZ s) {
    require_regime(family, Regime::Z);
    for (int g : {s.i, s.j, s.k, s.l, s.m, s.n}) {
        if (g < 0) throw DomainError("negative coordinate in z state");
    }
    using A = AbstractAction;
    switch (family) {
        case Family::ZA1: return {(s.m > 0 || s.n > 0) ? A::Vertical : A::Horizontal};
        case Family::ZA2: return {(s.k > 0 || s.l > 0) ? A::Vertical : A::Horizontal};
        case Family::ZA3: return {A::Diagonal};
        default: break;
    }
    throw DomainError("unreachable family");
}

Decision DecisionRule::sample(const SpinConfiguration& sigma, Rng& rng) const {
    Decision d;
    const Geometry g = analyze(sigma);
    if (g.all_plus) {
        d.aux_state = "all_plus";
        return d;
    }
    std::vector<AbstractAction> wanted;
    std::vector<AbstractAction> fallback;
    switch (regime()) {
        case Regime::X: {
            const AuxStateX s = classify_x(g);
            d.aux_state = to_string(s);
            wanted = action_set_x(family_, s);
            fallback = {AbstractAction::LongOne, AbstractAction::ShortOne};
            break;
        }
        case Regime::Y: {
            const AuxStateY s = classify_y(g);
            d.aux_state = to_string(s);
            wanted = action_set_y(family_, s);
            fallback = {AbstractAction::LongOne, AbstractAction::ShortOne};
            break;
        }
        case Regime::Z: {
            const AuxStateZ s = classify_z(g);
            d.aux_state = to_string(s);
            wanted = action_set_z(family_, s);
            fallback = {AbstractAction::Horizontal, AbstractAction::Vertical};
            break;
        }
    }

    std::vector<std::pair<AbstractAction, std::vector<Site>>> options;
    auto collect = [&](const std::vector<AbstractAction>& actions) {
        options.clear();
        for (AbstractAction a : actions) {
            auto sites = candidate_sites(g, regime(), a);
            if (!sites.empty()) options.emplace_back(a, std::move(sites));
        }
    };
    collect(wanted);
    if (options.empty()) {
        collect(fallback);
        d.fallback = true;
    }
    if (options.empty()) return d;

    const auto& [abstract, sites] = options[uniform_index(rng, options.size())];
    d.abstract = abstract;
    d.action = IsingAction::flip_at(sites[uniform_index(rng, sites.size())]);
    return d;
}

namespace {

MdpPolicy x_policy(const FiniteMdp& mdp, Family family, std::optional<std::size_t> pick) {
    MdpPolicy policy;
    for (const auto& state : mdp.states()) {
        const auto actions = action_set_x(family, parse_x_label(state.label));
        std::vector<int> idx;
        for (AbstractAction a : actions) {
            const int k = state.action_index(to_string(a));
            if (k < 0) {
                throw DomainError("action " + std::string(to_string(a)) + " missing in state " + state.label);
            }
            idx.push_back(k);
        }
        if (pick) idx = {idx[*pick % idx.size()]};
        policy.choices.push_back(std::move(idx));
    }
    return policy;
}

}  // namespace

MdpPolicy x_family_policy(const FiniteMdp& mdp, Family family) { return x_policy(mdp, family, std::nullopt); }

MdpPolicy x_family_member(const FiniteMdp& mdp, Family family, std::size_t pick) {
    return x_policy(mdp, family, pick);
}

}  // namespace isingmdp
