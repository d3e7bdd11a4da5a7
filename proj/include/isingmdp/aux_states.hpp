#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isingmdp/dynamics.hpp"
#include "isingmdp/lattice.hpp"

namespace isingmdp {

enum class Regime { X, Y, Z };

std::string_view to_string(Regime regime);
Regime parse_regime(std::string_view text);

enum class AbstractAction {
    LongOne,
    LongTwo,
    ShortOne,
    ShortTwo,
    DropOne,
    DropTwo,
    Diagonal,
    Horizontal,
    Vertical,
    NoOp,
};

/// "a_l1", "a_l2", "a_s1", "a_s2", "a_d1", "a_d2", "a_0", "a_h", "a_v", "noop".
std::string_view to_string(AbstractAction action);
AbstractAction parse_action(std::string_view text);
bool valid_in(AbstractAction action, Regime regime) noexcept;

struct AuxStateX {
    int i = 0;
    int j = 0;
    friend bool operator==(const AuxStateX&, const AuxStateX&) = default;
};

struct AuxStateY {
    int i = 0;
    int j = 0;
    int k = 0;
    friend bool operator==(const AuxStateY&, const AuxStateY&) = default;
};

struct AuxStateZ {
    int i = 0;
    int j = 0;
    int k = 0;
    int l = 0;
    int m = 0;
    int n = 0;
    friend bool operator==(const AuxStateZ&, const AuxStateZ&) = default;
};

std::string to_string(const AuxStateX& s);
std::string to_string(const AuxStateY& s);
std::string to_string(const AuxStateZ& s);

class ClassificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ActionUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximal run of lattice lines (columns or rows) not covered by any
/// component. before/after index the components covering the line just
/// before start and just after the run (-1 if none is identified).
struct Gap {
    int start = 0;
    int length = 0;
    int before = -1;
    int after = -1;
};

/// Robust decomposition plus the column and row gaps of the union of all
/// components. Gaps are ordered by the smallest line they contain.
struct Geometry {
    int n = 0;
    bool all_plus = false;
    std::vector<RobustComponent> components;
    std::vector<Gap> col_gaps;
    std::vector<Gap> row_gaps;

    /// Index into col_gaps of the longest gap (first on ties), -1 if none.
    int longest_col_gap() const noexcept;
    /// The other gap when there are exactly two, else -1.
    int shortest_col_gap() const noexcept;
};

Geometry analyze(const SpinConfiguration& sigma);

AuxStateX classify_x(const Geometry& g);
AuxStateY classify_y(const Geometry& g);
AuxStateZ classify_z(const Geometry& g);
AuxStateX classify_x(const SpinConfiguration& sigma);
AuxStateY classify_y(const SpinConfiguration& sigma);
AuxStateZ classify_z(const SpinConfiguration& sigma);

/// Candidate sites of an abstract action; empty when the action is not
/// available in this configuration.
std::vector<Site> candidate_sites(const Geometry& g, Regime regime, AbstractAction action);

/// Actions of the regime with a nonempty site set (noop only at all-plus).
std::vector<AbstractAction> available_actions(const Geometry& g, Regime regime);

/// Throwing variants: ClassificationError on shape mismatch, ActionUnavailable
/// on an empty site set.
std::vector<Site> action_sites_x(const SpinConfiguration& sigma, AbstractAction action);
std::vector<Site> action_sites_y(const SpinConfiguration& sigma, AbstractAction action);
std::vector<Site> action_sites_z(const SpinConfiguration& sigma, AbstractAction action);

/// Lattice realisation of a stripe-stripe state: column stripes separated by
/// gaps i then j (i first from column `offset`). Widths split the remaining
/// columns as evenly as possible; j = 0 gives a single stripe.
SpinConfiguration stripe_pair(int n, AuxStateX s, int offset = 0, double field = 0.5);

}  // namespace isingmdp
