#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace isingmdp {

/// A lattice site in (row, col) coordinates, always reduced modulo N.
struct Site {
    int row = 0;
    int col = 0;

    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

std::string to_string(Site s);

/// N x N torus with periodic boundary conditions and external field h.
class Lattice {
public:
    /// Throws std::invalid_argument unless N >= 4 and 0 < h < 1.
    explicit Lattice(int side_length, double field = 0.5);

    int side() const noexcept { return n_; }
    double field() const noexcept { return h_; }
    int site_count() const noexcept { return n_ * n_; }

    int index(Site s) const noexcept { return s.row * n_ + s.col; }
    Site site(int idx) const noexcept { return {idx / n_, idx % n_}; }

    /// Reduces arbitrary integer coordinates onto the torus.
    Site wrap(int row, int col) const noexcept { return {mod(row), mod(col)}; }
    int mod(int x) const noexcept { return ((x % n_) + n_) % n_; }

    /// Up, down, left, right.
    std::array<int, 4> neighbors(int idx) const noexcept {
        const int r = idx / n_;
        const int c = idx % n_;
        const int up = (r == 0 ? n_ - 1 : r - 1);
        const int down = (r == n_ - 1 ? 0 : r + 1);
        const int left = (c == 0 ? n_ - 1 : c - 1);
        const int right = (c == n_ - 1 ? 0 : c + 1);
        return {up * n_ + c, down * n_ + c, r * n_ + left, r * n_ + right};
    }

    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    int n_;
    double h_;
};

/// L1 distance on the torus.
int torus_distance(Site a, Site b, int n) noexcept;

/// Minimum torus distance over all pairs; throws std::invalid_argument on an
/// empty set.
int set_distance(std::span<const Site> a, std::span<const Site> b, int n);

/// Torus distance between two cyclic intervals [a0, a0+alen) and
/// [b0, b0+blen) along one axis of length n. Zero if they overlap.
int interval_distance(int a0, int alen, int b0, int blen, int n) noexcept;

/// Dense +/-1 spin field over a Lattice with a cached plus count.
class SpinConfiguration {
public:
    static SpinConfiguration all_minus(const Lattice& lattice);
    static SpinConfiguration all_plus(const Lattice& lattice);

    const Lattice& lattice() const noexcept { return lattice_; }
    int side() const noexcept { return lattice_.side(); }

    int spin(int idx) const noexcept { return spins_[static_cast<std::size_t>(idx)]; }
    int spin(Site s) const noexcept { return spin(lattice_.index(s)); }
    bool is_plus(int idx) const noexcept { return spin(idx) > 0; }
    bool is_plus(Site s) const noexcept { return spin(s) > 0; }

    int plus_count() const noexcept { return plus_count_; }
    bool is_all_plus() const noexcept { return plus_count_ == lattice_.site_count(); }
    bool is_all_minus() const noexcept { return plus_count_ == 0; }

    int plus_neighbors(int idx) const noexcept;

    void flip_in_place(int idx) noexcept;
    void set(Site s, int value);

    /// Sets every site of the (wrapped) rectangle to +1.
    void fill_plus(int row0, int col0, int height, int width);

    std::span<const std::int8_t> spins() const noexcept { return spins_; }

    /// Bit-packed spins, one bit per site (1 = plus).
    std::vector<std::uint64_t> packed() const;

    friend bool operator==(const SpinConfiguration& a, const SpinConfiguration& b) {
        return a.lattice_ == b.lattice_ && a.spins_ == b.spins_;
    }

private:
    SpinConfiguration(const Lattice& lattice, std::int8_t value);

    Lattice lattice_;
    std::vector<std::int8_t> spins_;
    int plus_count_ = 0;
};

/// H(sigma) with the interaction summed over ordered neighbour pairs.
double hamiltonian(const SpinConfiguration& sigma);

/// H(sigma^i) - H(sigma) = 4 sigma(i) sum_j sigma(j) + 2 h sigma(i).
double energy_delta(const SpinConfiguration& sigma, Site i);

SpinConfiguration flip(const SpinConfiguration& sigma, Site i);

/// Plain-text PGM (P2): 0 = minus, 255 = plus, row-major.
void write_pgm(std::ostream& os, const SpinConfiguration& sigma);
SpinConfiguration read_pgm(std::istream& is, double field = 0.5);

/// '+' / '-' rows; handy in tests and the CLI preview.
std::string to_ascii(const SpinConfiguration& sigma);
SpinConfiguration from_ascii(std::span<const std::string> rows, double field = 0.5);

}  // namespace isingmdp
