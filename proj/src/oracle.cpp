#include "dexp/oracle.hpp"

#include <cmath>
#include <numbers>

namespace dexp::oracle {

namespace {

std::uint32_t inverse_by_search(std::uint32_t x, std::uint32_t p) {
    for (std::uint32_t y = 1; y < p; ++y) {
        if (std::uint64_t{x} * y % p == 1) return y;
    }
    throw std::domain_error("oracle: no inverse");
}

std::uint32_t power(std::uint32_t x, std::int64_t e, std::uint32_t p) {
    if (e < 0) {
        x = inverse_by_search(x, p);
        e = -e;
    }
    std::uint64_t acc = 1 % p;
    for (std::int64_t i = 0; i < e; ++i) acc = acc * x % p;
    return static_cast<std::uint32_t>(acc);
}

// Counter over |N|^len tuples; returns false once exhausted.
bool advance(std::vector<std::size_t>& idx, std::size_t base) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (++idx[i] < base) return true;
        idx[i] = 0;
    }
    return false;
}

Comparison compare(std::string name, double fast, double brute, double rel) {
    const double tol = rel * std::max(1.0, std::abs(brute));
    return {std::move(name), fast, brute, tol, std::abs(fast - brute) <= tol};
}

}  // namespace

Complex ep(std::uint64_t z, std::uint32_t p) {
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(z % p) / p);
}

std::uint64_t energy(const FpSet& a, const FpSet& b) {
    const std::uint32_t p = a.p();
    std::uint64_t count = 0;
    for (std::uint32_t a1 : a.elements())
        for (std::uint32_t a2 : a.elements())
            for (std::uint32_t b1 : b.elements())
                for (std::uint32_t b2 : b.elements())
                    if ((a1 + b1) % p == (a2 + b2) % p) ++count;
    return count;
}

std::vector<std::uint64_t> rho(const FpSet& n, unsigned k) {
    const std::uint32_t p = n.p();
    std::vector<std::uint64_t> out(p, 0);
    std::vector<std::size_t> idx(2 * k, 0);
    const auto el = n.elements();
    do {
        std::int64_t sum = 0;
        for (unsigned i = 0; i < 2 * k; ++i) sum += (i < k ? 1 : -1) * static_cast<std::int64_t>(el[idx[i]]);
        sum %= static_cast<std::int64_t>(p);
        if (sum < 0) sum += p;
        ++out[static_cast<std::size_t>(sum)];
    } while (advance(idx, el.size()));
    return out;
}

FpSet sumset(const FpSet& a, const FpSet& b) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t x : a.elements())
        for (std::uint32_t y : b.elements()) out.push_back((x + y) % a.p());
    return FpSet(a.p(), std::move(out));
}

double fourier_bias(const FpSet& a) {
    const std::uint32_t p = a.p();
    double best = 0.0;
    for (std::uint32_t xi = 1; xi < p; ++xi) {
        Complex z(0.0, 0.0);
        for (std::uint32_t x : a.elements()) z += std::conj(ep(std::uint64_t{x} * xi, p));
        best = std::max(best, std::abs(z) / p);
    }
    return best;
}

double moment(const FpSet& m, const FpSet& n, const MomentParams& params) {
    const std::uint32_t p = m.p();
    double total = 0.0;
    for (std::uint32_t x : m.elements()) {
        Complex z(0.0, 0.0);
        const std::uint64_t coeff = std::uint64_t{params.a} * power(x, params.r_exp, p) % p;
        for (std::uint32_t y : n.elements()) z += ep(coeff * power(y, params.s_exp, p), p);
        total += std::pow(std::abs(z), 2.0 * params.k);
    }
    return total;
}

double g_sum(const FpSet& m, const FpSet& frak_n) {
    const std::uint32_t p = m.p();
    double total = 0.0;
    for (std::uint32_t n : frak_n.elements()) {
        Complex z(0.0, 0.0);
        for (std::uint32_t x : m.elements()) z += ep(std::uint64_t{inverse_by_search(x, p)} * n, p);
        total += std::abs(z);
    }
    return total;
}

std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> nu(const FpSet& a_set, const FpSet& m_prime,
                                                                    const FpSet& frak_n) {
    const std::uint32_t p = a_set.p();
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> out;
    for (std::uint32_t a : a_set.elements())
        for (std::uint32_t m : m_prime.elements())
            for (std::uint32_t n : frak_n.elements()) {
                // s = m / a, t = n / a, found by search over the group
                for (std::uint32_t s = 1; s < p; ++s) {
                    if (std::uint64_t{a} * s % p != m) continue;
                    for (std::uint32_t t = 1; t < p; ++t) {
                        if (std::uint64_t{a} * t % p == n) ++out[{s, t}];
                    }
                }
            }
    return out;
}

std::vector<Comparison> compare_all(const FpSet& m, const FpSet& n, unsigned k, const PrimeModulus& pm) {
    std::vector<Comparison> out;
    out.push_back(compare("energy(N,N)", to_double(additive_energy(n, n, pm)), static_cast<double>(energy(n, n)), 0.0));

    const CountVector fast_rho = dexp::rho(n, k, pm);
    const std::vector<std::uint64_t> slow_rho = oracle::rho(n, k);
    double mismatches = 0;
    for (std::uint32_t l = 0; l < pm.p(); ++l) {
        if (fast_rho[l] != slow_rho[l]) ++mismatches;
    }
    out.push_back(compare("rho(N,k) mismatched entries", mismatches, 0.0, 0.0));

    const FpSet sigma = difference_set(n);
    out.push_back(compare("|N-N|", static_cast<double>(sigma.size()), static_cast<double>(oracle::sumset(n, n.negated()).size()), 0.0));
    out.push_back(compare("fourier_bias(N)", dexp::fourier_bias(n, pm).bias, fourier_bias(n), 1e-12));

    const MomentParams params = MomentParams::inverse_outer(1, k);
    const double brute = moment(m, n, params);
    out.push_back(compare("moment_direct", moment_direct(m, n, params, pm).value, brute, 1e-9));
    out.push_back(compare("moment_via_rho", moment_via_rho(m, n, 1, k, pm).value, brute, 1e-6));

    const FpSet k_sigma = iterated_sumset(sigma, k);
    out.push_back(compare("g_sum(M,kSigma)", dexp::g_sum(m, k_sigma, pm), g_sum(m, k_sigma), 1e-9));

    Weights none;
    const FpSet b(pm.p(), {1, 2});
    out.push_back(compare("kloosterman(B={1,2},r=1)", kloosterman_moment(b, 1, none, pm).value,
                          reference::kloosterman_moment(b, 1, none, pm), 1e-9));
    return out;
}

}  // namespace dexp::oracle
