#include "isingmdp/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace isingmdp {

std::string to_string(Site s) {
    return "(" + std::to_string(s.row) + "," + std::to_string(s.col) + ")";
}

Lattice::Lattice(int side_length, double field) : n_(side_length), h_(field) {
    if (side_length < 4) {
        throw std::invalid_argument("lattice side length must be >= 4, got " +
                                    std::to_string(side_length));
    }
    if (!(field > 0.0 && field < 1.0)) {
        throw std::invalid_argument("external field must lie strictly in (0, 1)");
    }
}

int torus_distance(Site a, Site b, int n) noexcept {
    const int dr = std::abs(b.row - a.row);
    const int dc = std::abs(b.col - a.col);
    return std::min(dr, n - dr) + std::min(dc, n - dc);
}

int set_distance(std::span<const Site> a, std::span<const Site> b, int n) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("set_distance requires two nonempty site sets");
    }
    int best = std::numeric_limits<int>::max();
    for (const Site& x : a) {
        for (const Site& y : b) {
            best = std::min(best, torus_distance(x, y, n));
            if (best == 0) return 0;
        }
    }
    return best;
}

int interval_distance(int a0, int alen, int b0, int blen, int n) noexcept {
    if (alen >= n || blen >= n) return 0;
    // offset of b's start past a's end, and of a's start past b's end
    const int after_a = ((b0 - (a0 + alen - 1)) % n + n) % n;
    const int after_b = ((a0 - (b0 + blen - 1)) % n + n) % n;
    // overlap when b's start lies inside a or vice versa
    const int b_in_a = ((b0 - a0) % n + n) % n;
    const int a_in_b = ((a0 - b0) % n + n) % n;
    if (b_in_a < alen || a_in_b < blen) return 0;
    return std::min(after_a, after_b);
}

SpinConfiguration::SpinConfiguration(const Lattice& lattice, std::int8_t value)
    : lattice_(lattice),
      spins_(static_cast<std::size_t>(lattice.site_count()), value),
      plus_count_(value > 0 ? lattice.site_count() : 0) {}

SpinConfiguration SpinConfiguration::all_minus(const Lattice& lattice) {
    return SpinConfiguration(lattice, -1);
}

SpinConfiguration SpinConfiguration::all_plus(const Lattice& lattice) {
    return SpinConfiguration(lattice, +1);
}

int SpinConfiguration::plus_neighbors(int idx) const noexcept {
    int count = 0;
    for (int j : lattice_.neighbors(idx)) count += is_plus(j) ? 1 : 0;
    return count;
}

void SpinConfiguration::flip_in_place(int idx) noexcept {
    auto& s = spins_[static_cast<std::size_t>(idx)];
    plus_count_ += (s > 0) ? -1 : 1;
    s = static_cast<std::int8_t>(-s);
}

void SpinConfiguration::set(Site s, int value) {
    if (value != 1 && value != -1) throw std::invalid_argument("spin must be +1 or -1");
    const int idx = lattice_.index(lattice_.wrap(s.row, s.col));
    if (spin(idx) != value) flip_in_place(idx);
}

void SpinConfiguration::fill_plus(int row0, int col0, int height, int width) {
    for (int dr = 0; dr < height; ++dr) {
        for (int dc = 0; dc < width; ++dc) set({row0 + dr, col0 + dc}, +1);
    }
}

std::vector<std::uint64_t> SpinConfiguration::packed() const {
    std::vector<std::uint64_t> words((spins_.size() + 63) / 64, 0);
    for (std::size_t k = 0; k < spins_.size(); ++k) {
        if (spins_[k] > 0) words[k / 64] |= (std::uint64_t{1} << (k % 64));
    }
    return words;
}

double hamiltonian(const SpinConfiguration& sigma) {
    const Lattice& lat = sigma.lattice();
    long interaction = 0;
    long magnetisation = 0;
    for (int i = 0; i < lat.site_count(); ++i) {
        const int si = sigma.spin(i);
        magnetisation += si;
        for (int j : lat.neighbors(i)) interaction += si * sigma.spin(j);
    }
    return -static_cast<double>(interaction) - lat.field() * static_cast<double>(magnetisation);
}

double energy_delta(const SpinConfiguration& sigma, Site i) {
    const Lattice& lat = sigma.lattice();
    const int idx = lat.index(i);
    const int si = sigma.spin(idx);
    int local = 0;
    for (int j : lat.neighbors(idx)) local += sigma.spin(j);
    return 4.0 * si * local + 2.0 * lat.field() * si;
}

SpinConfiguration flip(const SpinConfiguration& sigma, Site i) {
    SpinConfiguration out = sigma;
    out.flip_in_place(sigma.lattice().index(i));
    return out;
}

void write_pgm(std::ostream& os, const SpinConfiguration& sigma) {
    const int n = sigma.side();
    os << "P2\n" << n << ' ' << n << "\n255\n";
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (c) os << ' ';
            os << (sigma.is_plus(Site{r, c}) ? 255 : 0);
        }
        os << '\n';
    }
}

namespace {

// Next whitespace-separated PGM token, skipping '#' comments.
std::string next_token(std::istream& is) {
    std::string tok;
    while (is >> tok) {
        if (tok.front() != '#') return tok;
        is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    }
    throw std::runtime_error("truncated PGM stream");
}

}  // namespace

SpinConfiguration read_pgm(std::istream& is, double field) {
    if (next_token(is) != "P2") throw std::runtime_error("not a plain PGM (P2) file");
    const int w = std::stoi(next_token(is));
    const int h = std::stoi(next_token(is));
    const int maxval = std::stoi(next_token(is));
    if (w != h) throw std::runtime_error("PGM snapshot must be square");
    SpinConfiguration sigma = SpinConfiguration::all_minus(Lattice(w, field));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int v = std::stoi(next_token(is));
            if (v != 0 && v != maxval) throw std::runtime_error("PGM pixel must be 0 or maxval");
            if (v == maxval) sigma.set({r, c}, +1);
        }
    }
    return sigma;
}

std::string to_ascii(const SpinConfiguration& sigma) {
    std::ostringstream os;
    const int n = sigma.side();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) os << (sigma.is_plus(Site{r, c}) ? '+' : '-');
        os << '\n';
    }
    return os.str();
}

SpinConfiguration from_ascii(std::span<const std::string> rows, double field) {
    const int n = static_cast<int>(rows.size());
    SpinConfiguration sigma = SpinConfiguration::all_minus(Lattice(n, field));
    for (int r = 0; r < n; ++r) {
        if (static_cast<int>(rows[r].size()) != n) throw std::invalid_argument("ragged ascii grid");
        for (int c = 0; c < n; ++c) {
            if (rows[r][c] == '+') sigma.set({r, c}, +1);
        }
    }
    return sigma;
}

}  // namespace isingmdp
