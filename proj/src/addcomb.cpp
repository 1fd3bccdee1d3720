#include "dexp/addcomb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dexp {

namespace {

std::size_t words_for(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

void clear_tail(std::vector<std::uint64_t>& words, std::uint64_t bits) {
    const unsigned rem = bits % 64;
    if (rem != 0 && !words.empty()) words.back() &= (std::uint64_t{1} << rem) - 1;
}

// dst |= src << shift, dst wide enough to hold the shifted bits.
void or_shift_left(std::vector<std::uint64_t>& dst, std::span<const std::uint64_t> src, std::uint32_t shift) {
    const std::size_t ws = shift / 64;
    const unsigned bs = shift % 64;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::uint64_t word = src[i];
        if (word == 0) continue;
        dst[i + ws] |= word << bs;
        if (bs != 0 && i + ws + 1 < dst.size()) dst[i + ws + 1] |= word >> (64 - bs);
    }
}

// Bits [p, 2p) of a 2p-bit buffer folded onto [0, p).
std::vector<std::uint64_t> fold_mod_p(const std::vector<std::uint64_t>& wide, std::uint32_t p) {
    const std::size_t n = words_for(p);
    std::vector<std::uint64_t> out(wide.begin(), wide.begin() + static_cast<std::ptrdiff_t>(n));
    clear_tail(out, p);
    const std::size_t ws = p / 64;
    const unsigned bs = p % 64;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i + ws;
        std::uint64_t word = lo < wide.size() ? wide[lo] >> bs : 0;
        if (bs != 0 && lo + 1 < wide.size()) word |= wide[lo + 1] << (64 - bs);
        out[i] |= word;
    }
    clear_tail(out, p);
    return out;
}

}  // namespace

FpSet::FpSet(std::uint32_t p, std::vector<std::uint32_t> elements)
    : p_(p), elements_(std::move(elements)), bits_(words_for(p), 0) {
    if (p == 0) throw std::invalid_argument("FpSet: modulus must be positive");
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    for (std::uint32_t x : elements_) {
        if (x >= p) throw std::out_of_range("FpSet: element " + std::to_string(x) + " not reduced mod " + std::to_string(p));
        bits_[x >> 6] |= std::uint64_t{1} << (x & 63);
    }
}

FpSet FpSet::from_bitmap(std::uint32_t p, std::vector<std::uint64_t> words) {
    words.resize(words_for(p), 0);
    clear_tail(words, p);
    FpSet s;
    s.p_ = p;
    for (std::size_t w = 0; w < words.size(); ++w) {
        std::uint64_t word = words[w];
        while (word != 0) {
            const int bit = __builtin_ctzll(word);
            s.elements_.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(bit)));
            word &= word - 1;
        }
    }
    s.bits_ = std::move(words);
    return s;
}

FpSet FpSet::empty(std::uint32_t p) { return FpSet(p, {}); }

FpSet FpSet::full(std::uint32_t p) {
    std::vector<std::uint32_t> all(p);
    std::iota(all.begin(), all.end(), 0u);
    return FpSet(p, std::move(all));
}

FpSet FpSet::full_minus_zero(std::uint32_t p) {
    std::vector<std::uint32_t> all(p - 1);
    std::iota(all.begin(), all.end(), 1u);
    return FpSet(p, std::move(all));
}

bool FpSet::subset_of(const FpSet& other) const {
    if (other.p_ != p_) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if ((bits_[i] & ~other.bits_[i]) != 0) return false;
    }
    return true;
}

FpSet FpSet::negated() const {
    std::vector<std::uint32_t> out;
    out.reserve(elements_.size());
    for (std::uint32_t x : elements_) out.push_back(x == 0 ? 0 : p_ - x);
    return FpSet(p_, std::move(out));
}

FpSet FpSet::translated(std::uint32_t c) const {
    std::vector<std::uint32_t> out;
    out.reserve(elements_.size());
    for (std::uint32_t x : elements_) out.push_back(static_cast<std::uint32_t>((std::uint64_t{x} + c) % p_));
    return FpSet(p_, std::move(out));
}

FpSet FpSet::dilated(std::uint32_t c) const {
    std::vector<std::uint32_t> out;
    out.reserve(elements_.size());
    for (std::uint32_t x : elements_) out.push_back(static_cast<std::uint32_t>(std::uint64_t{x} * c % p_));
    return FpSet(p_, std::move(out));
}

CountVector FpSet::indicator() const {
    CountVector v(p_);
    for (std::uint32_t x : elements_) v[x] = 1;
    return v;
}

std::string FpSet::describe() const {
    std::ostringstream os;
    os << "{";
    const std::size_t shown = std::min<std::size_t>(elements_.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) os << (i ? "," : "") << elements_[i];
    if (shown < elements_.size()) os << ",...";
    os << "} (|A|=" << elements_.size() << ", p=" << p_ << ")";
    return os.str();
}

FpSet sumset(const FpSet& a, const FpSet& b) {
    if (a.p() != b.p()) throw std::invalid_argument("sumset: moduli differ");
    const std::uint32_t p = a.p();
    std::vector<std::uint64_t> wide(words_for(2 * std::uint64_t{p}) + 1, 0);
    const FpSet& shifts = a.size() <= b.size() ? a : b;
    const FpSet& base = a.size() <= b.size() ? b : a;
    for (std::uint32_t s : shifts.elements()) or_shift_left(wide, base.bitmap(), s);
    return FpSet::from_bitmap(p, fold_mod_p(wide, p));
}

FpSet difference_set(const FpSet& n) {
    if (n.empty()) throw std::invalid_argument("difference_set: empty set");
    return sumset(n, n.negated());
}

FpSet iterated_sumset(const FpSet& s, unsigned k) {
    if (k == 0) throw std::invalid_argument("iterated_sumset: k must be positive");
    if (s.empty()) throw std::invalid_argument("iterated_sumset: empty set");
    FpSet acc = s;
    for (unsigned i = 1; i < k; ++i) {
        if (acc.is_full()) break;
        acc = sumset(acc, s);
    }
    return acc;
}

CountVector rho(const FpSet& n, unsigned k, const PrimeModulus& pm) {
    if (k == 0) throw std::invalid_argument("rho: k must be positive");
    if (n.empty()) throw std::invalid_argument("rho: empty set");
    if (n.p() != pm.p()) throw std::invalid_argument("rho: modulus mismatch");
    const CountVector plus = n.indicator();
    const CountVector minus = n.negated().indicator();
    CountVector acc = plus;
    for (unsigned i = 1; i < k; ++i) acc = cyclic_convolve(plus, acc, pm);
    for (unsigned i = 0; i < k; ++i) acc = cyclic_convolve(minus, acc, pm);
    return acc;
}

CountVector representation_counts(std::span<const FpSet> sets, const PrimeModulus& pm) {
    if (sets.empty()) throw std::invalid_argument("representation_counts: no sets");
    CountVector acc = sets[0].indicator();
    if (acc.p != pm.p()) throw std::invalid_argument("representation_counts: modulus mismatch");
    for (std::size_t i = 1; i < sets.size(); ++i) acc = cyclic_convolve(sets[i].indicator(), acc, pm);
    return acc;
}

Count additive_energy(const FpSet& a, const FpSet& b, const PrimeModulus& pm) {
    if (a.empty() || b.empty()) throw std::invalid_argument("additive_energy: empty set");
    const CountVector r = cyclic_convolve(a.indicator(), b.indicator(), pm);
    Count energy = 0;
    for (Count c : r.counts) energy += c * c;  // c <= |A||B| < 2^62
    return energy;
}

namespace {

double magnitude_at(const FpSet& a, std::uint32_t xi, const PrimeModulus& pm) {
    const std::uint32_t p = pm.p();
    double re = 0.0, im = 0.0;
    for (std::uint32_t x : a.elements()) {
        const Complex& w = pm.root(static_cast<std::uint32_t>(std::uint64_t{x} * xi % p));
        re += w.real();
        im -= w.imag();
    }
    return std::sqrt(re * re + im * im) / p;
}

}  // namespace

BiasResult fourier_bias(const FpSet& a, const PrimeModulus& pm, bool keep_values) {
    if (a.p() != pm.p()) throw std::invalid_argument("fourier_bias: modulus mismatch");
    const std::uint32_t p = pm.p();
    std::vector<double> mags(p, 0.0);
    mags[0] = static_cast<double>(a.size()) / p;
    // |hat 1_A(-xi)| = |hat 1_A(xi)| exactly, since root(p - j) = conj(root(j)).
    const std::int64_t half = (p - 1) / 2;
#pragma omp parallel for schedule(static)
    for (std::int64_t xi = 1; xi <= half; ++xi) {
        const double m = magnitude_at(a, static_cast<std::uint32_t>(xi), pm);
        mags[static_cast<std::size_t>(xi)] = m;
        mags[p - static_cast<std::size_t>(xi)] = m;
    }
    BiasResult result;
    for (std::uint32_t xi = 1; xi < p; ++xi) {
        if (mags[xi] > result.bias) {
            result.bias = mags[xi];
            result.argmax_xi = xi;
        }
    }
    if (keep_values) result.all_values = std::move(mags);
    return result;
}

Density density(const FpSet& a) {
    Density d{a.size(), a.p()};
    const std::uint64_t g = std::gcd(d.num, d.den);
    if (g > 1) {
        d.num /= g;
        d.den /= g;
    }
    return d;
}

std::uint32_t argmax(const CountVector& v) {
    std::uint32_t best = 0;
    for (std::uint32_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

namespace reference {

std::vector<double> fourier_magnitudes(const FpSet& a, const PrimeModulus& pm) {
    std::vector<double> mags(pm.p());
    for (std::uint32_t xi = 0; xi < pm.p(); ++xi) mags[xi] = magnitude_at(a, xi, pm);
    return mags;
}

}  // namespace reference

}  // namespace dexp
