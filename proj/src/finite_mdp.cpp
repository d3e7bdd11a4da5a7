#include "isingmdp/finite_mdp.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace isingmdp {

int MdpState::action_index(std::string_view name) const noexcept {
    for (std::size_t a = 0; a < actions.size(); ++a) {
        if (actions[a].name == name) return static_cast<int>(a);
    }
    return -1;
}

int FiniteMdp::add_state(std::string label, double reward) {
    if (index_.contains(label)) throw std::invalid_argument("duplicate state label " + label);
    const int id = size();
    index_.emplace(label, id);
    states_.push_back(MdpState{std::move(label), reward, {}});
    return id;
}

void FiniteMdp::add_action(int state, std::string name, std::vector<Transition> row) {
    auto& s = states_.at(static_cast<std::size_t>(state));
    if (s.action_index(name) >= 0) throw std::invalid_argument("duplicate action " + name + " in " + s.label);
    s.actions.push_back(MdpAction{std::move(name), std::move(row)});
}

std::optional<int> FiniteMdp::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int FiniteMdp::index(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw std::out_of_range("unknown state " + std::string(label));
}

void FiniteMdp::validate() const {
    for (const auto& s : states_) {
        if (s.actions.empty()) throw std::logic_error("state " + s.label + " has no action");
        for (const auto& a : s.actions) {
            Rational sum = 0;
            for (const auto& t : a.row) {
                if (t.target < 0 || t.target >= size()) {
                    throw std::logic_error("row " + s.label + "/" + a.name + " has an invalid target");
                }
                if (t.probability < 0) throw std::logic_error("negative probability in " + s.label + "/" + a.name);
                sum += t.probability;
            }
            if (sum != 1) {
                throw std::logic_error("row " + s.label + "/" + a.name + " sums to " + sum.str());
            }
        }
    }
}

std::string FiniteMdp::serialize() const {
    std::ostringstream os;
    os << "finite_mdp 1\nstates " << size() << '\n';
    char buf[64];
    for (const auto& s : states_) {
        std::snprintf(buf, sizeof buf, "%.17g", s.reward);
        os << "state " << s.label << " reward " << buf << '\n';
        for (const auto& a : s.actions) {
            os << "action " << a.name;
            for (const auto& t : a.row) os << ' ' << state(t.target).label << '=' << t.probability.str();
            os << '\n';
        }
    }
    os << "end\n";
    return os.str();
}

FiniteMdp FiniteMdp::deserialize(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string word;
    int version = 0;
    int count = 0;
    if (!(is >> word >> version) || word != "finite_mdp" || version != 1) {
        throw std::runtime_error("missing finite_mdp header");
    }
    if (!(is >> word >> count) || word != "states" || count < 0) throw std::runtime_error("missing state count");

    // Two passes: labels first, so rows may reference later states.
    struct PendingAction {
        int state;
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    FiniteMdp mdp;
    std::vector<PendingAction> pending;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "end") break;
        if (kind == "state") {
            std::string label, tag;
            double reward = 0.0;
            if (!(ls >> label >> tag >> reward) || tag != "reward") throw std::runtime_error("bad state line: " + line);
            mdp.add_state(label, reward);
        } else if (kind == "action") {
            if (mdp.size() == 0) throw std::runtime_error("action before any state");
            PendingAction pa{mdp.size() - 1, {}, {}};
            ls >> pa.name;
            std::string entry;
            while (ls >> entry) {
                const auto eq = entry.rfind('=');
                if (eq == std::string::npos) throw std::runtime_error("bad kernel entry: " + entry);
                pa.entries.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
            }
            pending.push_back(std::move(pa));
        } else {
            throw std::runtime_error("unexpected line: " + line);
        }
    }
    if (mdp.size() != count) throw std::runtime_error("state count mismatch");
    for (auto& pa : pending) {
        std::vector<Transition> row;
        for (const auto& [label, frac] : pa.entries) row.push_back({mdp.index(label), Rational(frac)});
        mdp.add_action(pa.state, std::move(pa.name), std::move(row));
    }
    mdp.validate();
    return mdp;
}

std::vector<std::pair<int, Rational>> gap_kernel(int gap, int distance) {
    if (gap < 2) throw ActionUnavailable("no flip into a gap of length " + std::to_string(gap));
    if (distance == 1) {
        if (gap == 2) return {{2, Rational(1, 4)}, {0, Rational(3, 4)}};
        return {{gap, Rational(1, 3)}, {gap - 1, Rational(2, 3)}};
    }
    if (distance == 2) {
        if (gap == 2) throw ActionUnavailable("distance-2 flip needs a gap of at least 3");
        if (gap == 3) return {{3, Rational(7, 18)}, {2, Rational(31, 144)}, {0, Rational(19, 48)}};
        return {{gap, Rational(5, 9)}, {gap - 1, Rational(7, 27)}, {gap - 2, Rational(5, 27)}};
    }
    throw std::invalid_argument("flip distance must be 1 or 2");
}

std::string x_label(int i, int j) { return std::to_string(i) + "," + std::to_string(j); }

AuxStateX parse_x_label(std::string_view label) {
    const auto comma = label.find(',');
    AuxStateX s;
    if (comma == std::string_view::npos ||
        std::from_chars(label.data(), label.data() + comma, s.i).ec != std::errc{} ||
        std::from_chars(label.data() + comma + 1, label.data() + label.size(), s.j).ec != std::errc{}) {
        throw std::invalid_argument("not a stripe-stripe label: " + std::string(label));
    }
    return s;
}

FiniteMdp build_stripe_stripe_mdp(int n) {
    if (n < 8) throw std::invalid_argument("stripe-stripe model needs N >= 8");
    std::vector<AuxStateX> states{{0, 0}};
    for (int g = 2; g <= n - 1; ++g) {
        states.push_back({g, 0});
        states.push_back({0, g});
    }
    for (int i = 2; i <= n - 4; ++i) {
        for (int j = 2; i + j <= n - 2; ++j) states.push_back({i, j});
    }
    std::stable_sort(states.begin(), states.end(), [](const AuxStateX& a, const AuxStateX& b) {
        return a.i + a.j != b.i + b.j ? a.i + a.j < b.i + b.j : a.i > b.i;
    });

    FiniteMdp mdp;
    for (const auto& s : states) mdp.add_state(x_label(s.i, s.j), s.i == 0 && s.j == 0 ? 1.0 : 0.0);

    for (const auto& s : states) {
        const int id = mdp.index(x_label(s.i, s.j));
        mdp.add_action(id, "noop", {{id, Rational(1)}});
        if (s.i == 0 && s.j == 0) continue;
        const bool first_long = s.i >= s.j;
        for (const bool longest : {true, false}) {
            const bool first = (longest == first_long);
            const int gap = first ? s.i : s.j;
            if (gap == 0) continue;
            for (int d = 1; d <= 2; ++d) {
                if (d == 2 && gap < 3) continue;
                std::vector<Transition> row;
                for (const auto& [outcome, p] : gap_kernel(gap, d)) {
                    const AuxStateX next = first ? AuxStateX{outcome, s.j} : AuxStateX{s.i, outcome};
                    row.push_back({mdp.index(x_label(next.i, next.j)), p});
                }
                const std::string name = std::string(longest ? "a_l" : "a_s") + std::to_string(d);
                mdp.add_action(id, name, std::move(row));
            }
        }
    }
    mdp.validate();
    return mdp;
}

}  // namespace isingmdp
