#include "dexp/fpcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dexp {

std::string to_string(Count value) {
    if (value == 0) return "0";
    std::string digits;
    while (value != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(digits.begin(), digits.end());
    return digits;
}

double to_double(Count value) { return static_cast<double>(value); }

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    unsigned __int128 result = 1 % p;
    unsigned __int128 b = base % p;
    while (exp != 0) {
        if (exp & 1u) result = result * b % p;
        b = b * b % p;
        exp >>= 1;
    }
    return static_cast<std::uint64_t>(result);
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t q : {2u, 3u, 5u, 7u, 11u, 13u}) {
        if (n % q == 0) return n == q;
    }
    if (n >= (std::uint64_t{1} << 32)) throw std::invalid_argument("is_prime: argument exceeds 32 bits");
    // Bases {2, 7, 61} are exact below 4759123141.
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1u) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2u, 7u, 61u}) {
        if (a % n == 0) continue;
        std::uint64_t x = mod_pow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = x * x % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeModulus::PrimeModulus(std::uint32_t p) : p_(p) {
    if (p < 3 || p >= (std::uint32_t{1} << 31) || !is_prime(p)) {
        throw std::invalid_argument("PrimeModulus: " + std::to_string(p) + " is not an odd prime below 2^31");
    }
    roots_.resize(p);
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    roots_[0] = Complex(1.0, 0.0);
    for (std::uint32_t j = 1; j <= p / 2; ++j) {
        const long double angle = two_pi * static_cast<long double>(j) / static_cast<long double>(p);
        const Complex z(static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle)));
        roots_[j] = z;
        roots_[p - j] = std::conj(z);
    }
    inv_.resize(p);
    inv_[1] = 1;
    for (std::uint32_t x = 2; x < p; ++x) {
        // inv(x) = -(p / x) * inv(p mod x)
        inv_[x] = static_cast<std::uint32_t>((p - std::uint64_t{p / x} * inv_[p % x] % p) % p);
    }
}

std::uint32_t PrimeModulus::inv(std::uint64_t x) const {
    x %= p_;
    if (x == 0) throw std::domain_error("inverse of 0 mod " + std::to_string(p_));
    return inv_[x];
}

std::uint32_t PrimeModulus::reduce(std::int64_t x) const {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<std::uint32_t>(r);
}

std::uint32_t PrimeModulus::pow(std::uint32_t x, std::int64_t e) const {
    if (e < 0) {
        x = inv(x);
        e = -e;
    }
    return static_cast<std::uint32_t>(mod_pow(x, static_cast<std::uint64_t>(e), p_));
}

Count CountVector::total() const {
    Count sum = 0;
    for (Count c : counts) {
        if (__builtin_add_overflow(sum, c, &sum)) throw std::overflow_error("CountVector::total overflows 128 bits");
    }
    return sum;
}

std::vector<std::uint32_t> CountVector::support() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != 0) out.push_back(i);
    }
    return out;
}

CountVector delta(std::uint32_t p, std::uint32_t at) {
    CountVector v(p);
    v[at % p] = 1;
    return v;
}

std::uint32_t mod_inv(std::uint64_t x, const PrimeModulus& pm) { return pm.inv(x); }

Complex ep_eval(std::uint32_t z, const PrimeModulus& pm) { return pm.root(z % pm.p()); }

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

namespace {

void check_operand(const CountVector& f, const PrimeModulus& pm, const char* what) {
    if (f.p != pm.p() || f.size() != pm.p()) {
        throw std::invalid_argument(std::string(what) + ": vector length does not match modulus");
    }
}

/// Mass of u*v, or throws when it does not fit the carrier.
Count convolution_mass(const CountVector& u, const CountVector& v) {
    Count mass = 0;
    if (__builtin_mul_overflow(u.total(), v.total(), &mass)) {
        throw std::overflow_error("cyclic_convolve: output mass exceeds 128 bits");
    }
    return mass;
}

Complex dft_at(const CountVector& f, std::span<const std::uint32_t> supp, std::uint32_t xi, const PrimeModulus& pm) {
    const std::uint32_t p = pm.p();
    double re = 0.0, im = 0.0;
    for (std::uint32_t x : supp) {
        const double c = to_double(f[x]);
        const Complex& w = pm.root(static_cast<std::uint32_t>(std::uint64_t{x} * xi % p));
        re += c * w.real();
        im -= c * w.imag();
    }
    return {re / p, im / p};
}

template <typename T>
void convolve_blocked(std::span<const T> u, std::span<const std::uint32_t> supp, std::span<const T> v,
                      std::span<T> w) {
    const std::size_t p = v.size();
    std::vector<T> doubled(2 * p);
    std::copy(v.begin(), v.end(), doubled.begin());
    std::copy(v.begin(), v.end(), doubled.begin() + static_cast<std::ptrdiff_t>(p));
    constexpr std::size_t kBlock = 512;
    const std::int64_t nblocks = static_cast<std::int64_t>((p + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        const std::size_t hi = std::min(p, lo + kBlock);
        for (std::uint32_t j : supp) {
            const T uj = u[j];
            const T* src = doubled.data() + p - j;
            for (std::size_t l = lo; l < hi; ++l) w[l] += uj * src[l];
        }
    }
}

}  // namespace

std::vector<Complex> dft_table(const CountVector& f, const PrimeModulus& pm) {
    check_operand(f, pm, "dft_table");
    const std::vector<std::uint32_t> supp = f.support();
    const std::int64_t p = pm.p();
    std::vector<Complex> out(static_cast<std::size_t>(p));
#pragma omp parallel for schedule(static)
    for (std::int64_t xi = 0; xi < p; ++xi) {
        out[static_cast<std::size_t>(xi)] = dft_at(f, supp, static_cast<std::uint32_t>(xi), pm);
    }
    return out;
}

CountVector cyclic_convolve(const CountVector& u, const CountVector& v, const PrimeModulus& pm) {
    check_operand(u, pm, "cyclic_convolve");
    check_operand(v, pm, "cyclic_convolve");
    const Count mass = convolution_mass(u, v);

    // Iterate over the sparser operand.
    std::vector<std::uint32_t> su = u.support();
    std::vector<std::uint32_t> sv = v.support();
    const bool swap = sv.size() < su.size();
    const CountVector& a = swap ? v : u;
    const CountVector& b = swap ? u : v;
    const std::vector<std::uint32_t>& supp = swap ? sv : su;

    CountVector w(pm.p());
    if (mass <= std::numeric_limits<std::uint64_t>::max()) {
        std::vector<std::uint64_t> a64(a.counts.begin(), a.counts.end());
        std::vector<std::uint64_t> b64(b.counts.begin(), b.counts.end());
        std::vector<std::uint64_t> w64(pm.p(), 0);
        convolve_blocked<std::uint64_t>(a64, supp, b64, w64);
        std::copy(w64.begin(), w64.end(), w.counts.begin());
    } else {
        convolve_blocked<Count>(a.counts, supp, b.counts, w.counts);
    }
    return w;
}

namespace reference {

std::vector<Complex> dft_table(const CountVector& f, const PrimeModulus& pm) {
    check_operand(f, pm, "reference::dft_table");
    const std::vector<std::uint32_t> supp = f.support();
    std::vector<Complex> out(pm.p());
    for (std::uint32_t xi = 0; xi < pm.p(); ++xi) out[xi] = dft_at(f, supp, xi, pm);
    return out;
}

CountVector cyclic_convolve(const CountVector& u, const CountVector& v, const PrimeModulus& pm) {
    check_operand(u, pm, "reference::cyclic_convolve");
    check_operand(v, pm, "reference::cyclic_convolve");
    convolution_mass(u, v);
    const std::uint32_t p = pm.p();
    CountVector w(p);
    for (std::uint32_t j = 0; j < p; ++j) {
        if (u[j] == 0) continue;
        for (std::uint32_t i = 0; i < p; ++i) w[pm.add(j, i)] += u[j] * v[i];
    }
    return w;
}

}  // namespace reference

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace dexp
