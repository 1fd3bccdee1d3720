#include "dexp/setspec.hpp"

#include <charconv>
#include <numeric>
#include <sstream>

#include "dexp/prng.hpp"

namespace dexp {

namespace {

struct Token {
    std::string_view text;
    std::size_t pos;
};

std::vector<Token> split(std::string_view text, char sep, std::size_t base = 0) {
    std::vector<Token> out;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t end = text.find(sep, begin);
        if (end == std::string_view::npos) {
            out.push_back({text.substr(begin), base + begin});
            return out;
        }
        out.push_back({text.substr(begin, end - begin), base + begin});
        begin = end + 1;
    }
}

template <typename T>
T parse_int(const Token& tok, const char* what) {
    T value{};
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (tok.text.empty() || ec != std::errc{} || ptr != last) {
        throw SetSpecError(std::string("malformed integer for ") + what + ": '" + std::string(tok.text) + "'", tok.pos);
    }
    return value;
}

void expect_args(const std::vector<Token>& toks, std::size_t n, std::string_view kind) {
    if (toks.size() - 1 != n) {
        const std::size_t pos = toks.size() > n + 1 ? toks[n + 1].pos : toks.back().pos + toks.back().text.size();
        throw SetSpecError(std::string(kind) + " takes " + std::to_string(n) + " argument(s), got " +
                               std::to_string(toks.size() - 1),
                           pos);
    }
}

std::vector<std::uint64_t> factor(std::uint64_t n) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            primes.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) primes.push_back(n);
    return primes;
}

}  // namespace

SetSpec parse_set_spec(std::string_view text) {
    const std::vector<Token> toks = split(text, ':');
    const std::string_view kind = toks[0].text;
    SetSpec spec;
    if (kind == "interval") {
        expect_args(toks, 2, kind);
        spec.kind = SetKind::interval;
        spec.start = parse_int<std::int64_t>(toks[1], "interval start");
        spec.length = parse_int<std::uint64_t>(toks[2], "interval length");
    } else if (kind == "random") {
        expect_args(toks, 2, kind);
        spec.kind = SetKind::random;
        spec.size = parse_int<std::uint64_t>(toks[1], "random size");
        spec.seed = parse_int<std::uint64_t>(toks[2], "random seed");
    } else if (kind == "subgroup") {
        expect_args(toks, 1, kind);
        spec.kind = SetKind::subgroup;
        spec.order = parse_int<std::uint64_t>(toks[1], "subgroup order");
        if (spec.order == 0) throw SetSpecError("subgroup order must be positive", toks[1].pos);
    } else if (kind == "explicit") {
        expect_args(toks, 1, kind);
        spec.kind = SetKind::explicit_list;
        for (const Token& t : split(toks[1].text, ',', toks[1].pos)) {
            spec.elements.push_back(parse_int<std::uint64_t>(t, "explicit element"));
        }
    } else if (kind == "full_minus_zero") {
        expect_args(toks, 0, kind);
        spec.kind = SetKind::full_minus_zero;
    } else {
        throw SetSpecError("unknown set kind '" + std::string(kind) + "'", 0);
    }
    return spec;
}

std::string to_string(const SetSpec& spec) {
    std::ostringstream os;
    switch (spec.kind) {
        case SetKind::interval: os << "interval:" << spec.start << ':' << spec.length; break;
        case SetKind::random: os << "random:" << spec.size << ':' << spec.seed; break;
        case SetKind::subgroup: os << "subgroup:" << spec.order; break;
        case SetKind::explicit_list:
            os << "explicit:";
            for (std::size_t i = 0; i < spec.elements.size(); ++i) os << (i ? "," : "") << spec.elements[i];
            break;
        case SetKind::full_minus_zero: os << "full_minus_zero"; break;
    }
    return os.str();
}

std::uint32_t primitive_root(const PrimeModulus& pm) {
    const std::uint32_t p = pm.p();
    const std::vector<std::uint64_t> qs = factor(p - 1);
    for (std::uint32_t g = 2; g < p; ++g) {
        bool generator = true;
        for (std::uint64_t q : qs) {
            if (mod_pow(g, (p - 1) / q, p) == 1) {
                generator = false;
                break;
            }
        }
        if (generator) return g;
    }
    return 1;  // unreachable for odd primes
}

std::uint64_t integer_root(std::uint64_t x, unsigned r) {
    if (r == 0) throw std::invalid_argument("integer_root: r must be positive");
    auto fits = [&](std::uint64_t b) {
        unsigned __int128 acc = 1;
        for (unsigned i = 0; i < r; ++i) {
            acc *= b;
            if (acc > x) return false;
        }
        return true;
    };
    std::uint64_t lo = 0, hi = 1;
    while (fits(hi)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

FpSet generate_set(const SetSpec& spec, const PrimeModulus& pm, GenerateOptions opts) {
    const std::uint32_t p = pm.p();
    std::vector<std::uint32_t> elems;
    switch (spec.kind) {
        case SetKind::interval: {
            if (spec.length > p) throw std::out_of_range("interval length exceeds p");
            const std::uint32_t start = pm.reduce(spec.start);
            for (std::uint64_t i = 0; i < spec.length; ++i) elems.push_back(static_cast<std::uint32_t>((start + i) % p));
            break;
        }
        case SetKind::random: {
            if (spec.size > p - 1) throw std::out_of_range("random size exceeds p - 1");
            std::vector<std::uint32_t> pool(p - 1);
            std::iota(pool.begin(), pool.end(), 1u);
            Xoshiro256 rng(spec.seed);
            for (std::uint64_t i = 0; i < spec.size; ++i) {
                const std::uint64_t j = i + rng.bounded(pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            elems.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(spec.size));
            break;
        }
        case SetKind::subgroup: {
            if ((p - 1) % spec.order != 0) {
                throw std::invalid_argument("subgroup order " + std::to_string(spec.order) + " does not divide p - 1");
            }
            const std::uint32_t h = static_cast<std::uint32_t>(mod_pow(primitive_root(pm), (p - 1) / spec.order, p));
            std::uint32_t x = 1;
            for (std::uint64_t i = 0; i < spec.order; ++i) {
                elems.push_back(x);
                x = pm.mul(x, h);
            }
            break;
        }
        case SetKind::explicit_list:
            for (std::uint64_t x : spec.elements) {
                if (x >= p) throw std::out_of_range("explicit element " + std::to_string(x) + " not below p");
                elems.push_back(static_cast<std::uint32_t>(x));
            }
            break;
        case SetKind::full_minus_zero: return FpSet::full_minus_zero(p);
    }
    FpSet out(p, std::move(elems));
    if (opts.require_nonzero && out.contains(0)) {
        throw std::invalid_argument("set '" + to_string(spec) + "' contains 0 mod " + std::to_string(p));
    }
    return out;
}

namespace {

std::string eval_arg(const Token& tok, std::uint32_t p) {
    const std::string_view t = tok.text;
    if (!t.empty() && t[0] == 'p') {
        std::int64_t value = p;
        if (t.size() > 1) {
            const Token rest{t.substr(2), tok.pos + 2};
            const std::int64_t d = parse_int<std::int64_t>(rest, "template argument");
            if (t[1] == '/') {
                if (d == 0) throw SetSpecError("division by zero in template", tok.pos);
                value = p / d;
            } else if (t[1] == '-') {
                value = p - d;
            } else {
                throw SetSpecError("unsupported template expression '" + std::string(t) + "'", tok.pos);
            }
        }
        return std::to_string(value);
    }
    return std::string(t);
}

}  // namespace

SetSpec resolve_template(std::string_view text, std::uint32_t p, std::uint64_t auto_size, std::uint64_t auto_seed) {
    std::vector<Token> toks = split(text, ':');
    if (toks[0].text == "explicit" || toks[0].text == "full_minus_zero") return parse_set_spec(text);
    std::string out(toks[0].text);
    std::vector<std::string> args;
    for (std::size_t i = 1; i < toks.size(); ++i) args.push_back(toks[i].text == "auto" ? "auto" : eval_arg(toks[i], p));
    if (toks[0].text == "random") {
        if (args.size() > 2) throw SetSpecError("random template takes at most 2 arguments", toks[3].pos);
        args.resize(2, "auto");
        if (args[0] == "auto") args[0] = std::to_string(auto_size);
        if (args[1] == "auto") args[1] = std::to_string(auto_seed);
    }
    for (const std::string& a : args) out += ":" + a;
    return parse_set_spec(out);
}

}  // namespace dexp
