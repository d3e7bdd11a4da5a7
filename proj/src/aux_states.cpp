#include "isingmdp/aux_states.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

namespace isingmdp {

namespace {

constexpr std::array<std::pair<AbstractAction, std::string_view>, 10> kActionNames{{
    {AbstractAction::LongOne, "a_l1"},
    {AbstractAction::LongTwo, "a_l2"},
    {AbstractAction::ShortOne, "a_s1"},
    {AbstractAction::ShortTwo, "a_s2"},
    {AbstractAction::DropOne, "a_d1"},
    {AbstractAction::DropTwo, "a_d2"},
    {AbstractAction::Diagonal, "a_0"},
    {AbstractAction::Horizontal, "a_h"},
    {AbstractAction::Vertical, "a_v"},
    {AbstractAction::NoOp, "noop"},
}};

int wrap(int x, int n) { return ((x % n) + n) % n; }

}  // namespace

std::string_view to_string(Regime regime) {
    switch (regime) {
        case Regime::X: return "x";
        case Regime::Y: return "y";
        case Regime::Z: return "z";
    }
    return "?";
}

Regime parse_regime(std::string_view text) {
    if (text == "x") return Regime::X;
    if (text == "y") return Regime::Y;
    if (text == "z") return Regime::Z;
    throw std::invalid_argument("unknown regime '" + std::string(text) + "' (expected x, y or z)");
}

std::string_view to_string(AbstractAction action) {
    for (const auto& [a, name] : kActionNames) {
        if (a == action) return name;
    }
    return "?";
}

AbstractAction parse_action(std::string_view text) {
    for (const auto& [a, name] : kActionNames) {
        if (name == text) return a;
    }
    throw std::invalid_argument("unknown abstract action '" + std::string(text) + "'");
}

bool valid_in(AbstractAction action, Regime regime) noexcept {
    switch (action) {
        case AbstractAction::LongOne:
        case AbstractAction::LongTwo:
        case AbstractAction::ShortOne:
        case AbstractAction::ShortTwo:
            return regime != Regime::Z;
        case AbstractAction::DropOne:
        case AbstractAction::DropTwo:
            return regime == Regime::Y;
        case AbstractAction::Diagonal:
            return regime != Regime::X;
        case AbstractAction::Horizontal:
        case AbstractAction::Vertical:
            return regime == Regime::Z;
        case AbstractAction::NoOp:
            return true;
    }
    return false;
}

std::string to_string(const AuxStateX& s) {
    return "(" + std::to_string(s.i) + "," + std::to_string(s.j) + ")";
}

std::string to_string(const AuxStateY& s) {
    return "(" + std::to_string(s.i) + "," + std::to_string(s.j) + "," + std::to_string(s.k) + ")";
}

std::string to_string(const AuxStateZ& s) {
    return "(" + std::to_string(s.i) + "," + std::to_string(s.j) + "," + std::to_string(s.k) + "," +
           std::to_string(s.l) + "," + std::to_string(s.m) + "," + std::to_string(s.n) + ")";
}

int Geometry::longest_col_gap() const noexcept {
    int best = -1;
    for (std::size_t g = 0; g < col_gaps.size(); ++g) {
        if (best < 0 || col_gaps[g].length > col_gaps[static_cast<std::size_t>(best)].length) {
            best = static_cast<int>(g);
        }
    }
    return best;
}

int Geometry::shortest_col_gap() const noexcept {
    if (col_gaps.size() != 2) return -1;
    return 1 - longest_col_gap();
}

namespace {

// Which component covers line x along the chosen axis.
std::vector<int> coverage(const std::vector<RobustComponent>& comps, int n, bool columns) {
    std::vector<int> owner(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const int start = columns ? comps[c].left() : comps[c].top();
        const int len = columns ? comps[c].width : comps[c].height;
        for (int d = 0; d < len; ++d) {
            auto& slot = owner[static_cast<std::size_t>(wrap(start + d, n))];
            if (slot < 0) slot = static_cast<int>(c);
        }
    }
    return owner;
}

std::vector<Gap> gaps_of(const std::vector<int>& owner) {
    const int n = static_cast<int>(owner.size());
    std::vector<Gap> gaps;
    if (std::all_of(owner.begin(), owner.end(), [](int o) { return o < 0; })) return gaps;
    for (int x = 0; x < n; ++x) {
        const bool free = owner[static_cast<std::size_t>(x)] < 0;
        const bool prev_free = owner[static_cast<std::size_t>(wrap(x - 1, n))] < 0;
        if (!free || prev_free) continue;
        Gap g;
        g.start = x;
        while (owner[static_cast<std::size_t>(wrap(x + g.length, n))] < 0) ++g.length;
        g.before = owner[static_cast<std::size_t>(wrap(x - 1, n))];
        g.after = owner[static_cast<std::size_t>(wrap(x + g.length, n))];
        gaps.push_back(g);
    }
    auto smallest = [n](const Gap& g) { return g.start + g.length > n ? 0 : g.start; };
    std::sort(gaps.begin(), gaps.end(),
              [&](const Gap& a, const Gap& b) { return smallest(a) < smallest(b); });
    return gaps;
}

int count_kind(const Geometry& g, ComponentKind kind) {
    return static_cast<int>(std::count_if(g.components.begin(), g.components.end(),
                                          [kind](const RobustComponent& c) { return c.kind == kind; }));
}

const RobustComponent* droplet(const Geometry& g) {
    for (const auto& c : g.components) {
        if (c.kind == ComponentKind::Rectangle) return &c;
    }
    return nullptr;
}

void require_shape(bool ok, std::string_view regime, const Geometry& g) {
    if (ok) return;
    std::string kinds;
    for (const auto& c : g.components) kinds += (kinds.empty() ? "" : ", ") + to_string(c.kind);
    throw ClassificationError("configuration [" + kinds + "] does not belong to regime " + std::string(regime));
}

int gap_length(const Geometry& g, std::size_t idx) {
    return idx < g.col_gaps.size() ? g.col_gaps[idx].length : 0;
}

int row_gap_length(const Geometry& g, std::size_t idx) {
    return idx < g.row_gaps.size() ? g.row_gaps[idx].length : 0;
}

}  // namespace

Geometry analyze(const SpinConfiguration& sigma) {
    Geometry g;
    g.n = sigma.side();
    const RobustClassification rc = classify_robust(sigma);
    g.all_plus = rc.all_plus;
    g.components = rc.components;
    if (!g.all_plus) {
        g.col_gaps = gaps_of(coverage(g.components, g.n, true));
        g.row_gaps = gaps_of(coverage(g.components, g.n, false));
    }
    return g;
}

AuxStateX classify_x(const Geometry& g) {
    if (g.all_plus) return {};
    const int stripes = count_kind(g, ComponentKind::StripeCols);
    require_shape(stripes >= 1 && stripes <= 2 && stripes == static_cast<int>(g.components.size()), "x", g);
    return {gap_length(g, 0), gap_length(g, 1)};
}

AuxStateY classify_y(const Geometry& g) {
    if (g.all_plus) return {};
    const int stripes = count_kind(g, ComponentKind::StripeCols);
    const int rects = count_kind(g, ComponentKind::Rectangle);
    const int total = static_cast<int>(g.components.size());
    require_shape(stripes >= 1 && rects <= 1 && stripes + rects == total && total <= 2, "y", g);
    const RobustComponent* d = droplet(g);
    return {gap_length(g, 0), gap_length(g, 1), d ? g.n - d->height : 0};
}

AuxStateZ classify_z(const Geometry& g) {
    if (g.all_plus) return {};
    const int total = static_cast<int>(g.components.size());
    require_shape(total >= 1 && total <= 2, "z", g);
    AuxStateZ s{gap_length(g, 0), gap_length(g, 1), row_gap_length(g, 0), row_gap_length(g, 1), 0, 0};
    if (total == 2) {
        const auto& a = g.components[0];
        const auto& b = g.components[1];
        if (a.top() == b.top() && a.height == b.height) {
            s.m = s.n = 0;
        } else if (a.full_height(g.n) || b.full_height(g.n)) {
            s.m = s.n = g.n - std::min(a.height, b.height);
        } else {
            auto dist = [&](int x, int y) {
                const int d = std::abs(x - y) % g.n;
                return std::min(d, g.n - d);
            };
            s.m = dist(a.top(), b.top());
            s.n = dist(wrap(a.top() + a.height - 1, g.n), wrap(b.top() + b.height - 1, g.n));
        }
    }
    return s;
}

AuxStateX classify_x(const SpinConfiguration& sigma) { return classify_x(analyze(sigma)); }
AuxStateY classify_y(const SpinConfiguration& sigma) { return classify_y(analyze(sigma)); }
AuxStateZ classify_z(const SpinConfiguration& sigma) { return classify_z(analyze(sigma)); }

namespace {

void add_column(std::vector<Site>& out, int n, int col, const RobustComponent& rows_from) {
    for (int d = 0; d < rows_from.height; ++d) out.push_back({wrap(rows_from.top() + d, n), wrap(col, n)});
}

void add_row(std::vector<Site>& out, int n, int row, const RobustComponent& cols_from) {
    for (int d = 0; d < cols_from.width; ++d) out.push_back({wrap(row, n), wrap(cols_from.left() + d, n)});
}

void add_corners(std::vector<Site>& out, int n, const RobustComponent& c) {
    const int top = c.top() - 1;
    const int bottom = c.top() + c.height;
    const int left = c.left() - 1;
    const int right = c.left() + c.width;
    for (int r : {top, bottom}) {
        for (int col : {left, right}) out.push_back({wrap(r, n), wrap(col, n)});
    }
}

// Sites at distance d inside a column gap, on the side of each bounding
// component and restricted to that component's rows.
std::vector<Site> gap_sites(const Geometry& g, int gap_index, int d) {
    std::vector<Site> out;
    if (gap_index < 0) return out;
    const Gap& gap = g.col_gaps[static_cast<std::size_t>(gap_index)];
    if (gap.length < d + 1 || gap.before < 0 || gap.after < 0) return out;
    add_column(out, g.n, gap.start + d - 1, g.components[static_cast<std::size_t>(gap.before)]);
    add_column(out, g.n, gap.start + gap.length - d, g.components[static_cast<std::size_t>(gap.after)]);
    return out;
}

std::vector<Site> drop_sites(const Geometry& g, int d) {
    std::vector<Site> out;
    const RobustComponent* c = droplet(g);
    if (!c || g.n - c->height < d + 1) return out;
    add_row(out, g.n, c->top() - d, *c);
    add_row(out, g.n, c->top() + c->height - 1 + d, *c);
    return out;
}

void require_regime(const Geometry& g, Regime regime) {
    switch (regime) {
        case Regime::X: classify_x(g); break;
        case Regime::Y: classify_y(g); break;
        case Regime::Z: classify_z(g); break;
    }
}

}  // namespace

std::vector<Site> candidate_sites(const Geometry& g, Regime regime, AbstractAction action) {
    require_regime(g, regime);
    std::vector<Site> out;
    if (g.all_plus || !valid_in(action, regime)) return out;
    switch (action) {
        case AbstractAction::LongOne: out = gap_sites(g, g.longest_col_gap(), 1); break;
        case AbstractAction::LongTwo: out = gap_sites(g, g.longest_col_gap(), 2); break;
        case AbstractAction::ShortOne: out = gap_sites(g, g.shortest_col_gap(), 1); break;
        case AbstractAction::ShortTwo: out = gap_sites(g, g.shortest_col_gap(), 2); break;
        case AbstractAction::DropOne: out = drop_sites(g, 1); break;
        case AbstractAction::DropTwo: out = drop_sites(g, 2); break;
        case AbstractAction::Diagonal:
            for (const auto& c : g.components) {
                if (c.kind == ComponentKind::Rectangle) add_corners(out, g.n, c);
            }
            break;
        case AbstractAction::Horizontal:
            for (const auto& c : g.components) {
                if (c.full_width(g.n)) continue;
                add_column(out, g.n, c.left() - 1, c);
                add_column(out, g.n, c.left() + c.width, c);
            }
            break;
        case AbstractAction::Vertical:
            for (const auto& c : g.components) {
                if (c.full_height(g.n)) continue;
                add_row(out, g.n, c.top() - 1, c);
                add_row(out, g.n, c.top() + c.height, c);
            }
            break;
        case AbstractAction::NoOp: break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<AbstractAction> available_actions(const Geometry& g, Regime regime) {
    require_regime(g, regime);
    if (g.all_plus) return {AbstractAction::NoOp};
    std::vector<AbstractAction> out;
    for (const auto& [a, name] : kActionNames) {
        if (a != AbstractAction::NoOp && valid_in(a, regime) && !candidate_sites(g, regime, a).empty()) {
            out.push_back(a);
        }
    }
    return out;
}

namespace {

std::vector<Site> sites_or_throw(const SpinConfiguration& sigma, Regime regime, AbstractAction action) {
    auto sites = candidate_sites(analyze(sigma), regime, action);
    if (sites.empty()) {
        throw ActionUnavailable("action " + std::string(to_string(action)) + " is unavailable in regime " +
                                std::string(to_string(regime)) + " here");
    }
    return sites;
}

}  // namespace

std::vector<Site> action_sites_x(const SpinConfiguration& sigma, AbstractAction action) {
    return sites_or_throw(sigma, Regime::X, action);
}

std::vector<Site> action_sites_y(const SpinConfiguration& sigma, AbstractAction action) {
    return sites_or_throw(sigma, Regime::Y, action);
}

std::vector<Site> action_sites_z(const SpinConfiguration& sigma, AbstractAction action) {
    return sites_or_throw(sigma, Regime::Z, action);
}

SpinConfiguration stripe_pair(int n, AuxStateX s, int offset, double field) {
    const Lattice lat(n, field);
    if (s.i == 0 && s.j == 0) return SpinConfiguration::all_plus(lat);
    if (s.i == 0) std::swap(s.i, s.j);
    if (s.i == 1 || s.j == 1 || s.i < 0 || s.j < 0) throw std::invalid_argument("gap lengths must be 0 or >= 2");
    SpinConfiguration sigma = SpinConfiguration::all_minus(lat);
    if (s.j == 0) {
        if (s.i > n - 1) throw std::invalid_argument("single-stripe gap must be <= N-1");
        sigma.fill_plus(0, offset + s.i, n, n - s.i);
        return sigma;
    }
    const int widths = n - s.i - s.j;
    if (widths < 2) throw std::invalid_argument("stripe pair needs i + j <= N-2");
    const int w1 = widths / 2;
    const int w2 = widths - w1;
    sigma.fill_plus(0, offset + s.i, n, w1);
    sigma.fill_plus(0, offset + s.i + w1 + s.j, n, w2);
    return sigma;
}

}  // namespace isingmdp
