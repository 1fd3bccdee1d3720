#pragma once

// Set algebra on Z/p: difference sets, iterated sumsets, the signed
// representation function rho, additive energy, density and Fourier bias.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dexp/fpcore.hpp"

namespace dexp {

/// Subset of Z/p held both as a sorted element list and a p-bit bitmap.
class FpSet {
public:
    FpSet() = default;
    /// Elements must lie in 0..p-1; duplicates are merged.
    FpSet(std::uint32_t p, std::vector<std::uint32_t> elements);

    static FpSet from_bitmap(std::uint32_t p, std::vector<std::uint64_t> words);
    static FpSet empty(std::uint32_t p);
    static FpSet full(std::uint32_t p);
    static FpSet full_minus_zero(std::uint32_t p);

    std::uint32_t p() const { return p_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    bool contains(std::uint32_t x) const { return x < p_ && ((bits_[x >> 6] >> (x & 63)) & 1u); }
    std::span<const std::uint32_t> elements() const { return elements_; }
    std::span<const std::uint64_t> bitmap() const { return bits_; }

    bool is_full() const { return elements_.size() == p_; }
    bool subset_of(const FpSet& other) const;

    FpSet negated() const;
    FpSet translated(std::uint32_t c) const;
    /// {c x : x in A}
    FpSet dilated(std::uint32_t c) const;

    CountVector indicator() const;
    std::string describe() const;

    friend bool operator==(const FpSet& a, const FpSet& b) { return a.p_ == b.p_ && a.elements_ == b.elements_; }

private:
    std::uint32_t p_ = 0;
    std::vector<std::uint32_t> elements_;
    std::vector<std::uint64_t> bits_;
};

struct Density {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Density&, const Density&) = default;
};

struct BiasResult {
    double bias = 0.0;
    std::uint32_t argmax_xi = 1;
    /// |hat 1_A(xi)| for every xi; index 0 is the density.
    std::vector<double> all_values;
};

FpSet difference_set(const FpSet& n);
FpSet sumset(const FpSet& a, const FpSet& b);
FpSet iterated_sumset(const FpSet& s, unsigned k);

/// rho(l) = #{(n_1..n_2k) in N^2k : n_1+..+n_k - n_{k+1}-..-n_2k = l}.
CountVector rho(const FpSet& n, unsigned k, const PrimeModulus& pm);

/// #{(a_1..a_n) : a_1 + .. + a_n = x} for every x, by iterated convolution.
CountVector representation_counts(std::span<const FpSet> sets, const PrimeModulus& pm);

Count additive_energy(const FpSet& a, const FpSet& b, const PrimeModulus& pm);

BiasResult fourier_bias(const FpSet& a, const PrimeModulus& pm, bool keep_values = false);

Density density(const FpSet& a);

/// Position of the first maximum.
std::uint32_t argmax(const CountVector& v);

namespace reference {

/// Magnitudes |hat 1_A(xi)| by direct summation over every xi, serially.
std::vector<double> fourier_magnitudes(const FpSet& a, const PrimeModulus& pm);

}  // namespace reference

}  // namespace dexp
