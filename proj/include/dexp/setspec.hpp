#pragma once

// Set-spec grammar:   kind ':' arg (':' arg)*
//
//   interval:<start>:<length>     {start, .., start+length-1} mod p
//   random:<size>:<seed>          size distinct residues from 1..p-1
//   subgroup:<order>              the multiplicative subgroup of that order
//   explicit:<x>,<y>,...          literal residues
//   full_minus_zero               1..p-1

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dexp/addcomb.hpp"
#include "dexp/fpcore.hpp"

namespace dexp {

enum class SetKind { interval, random, subgroup, explicit_list, full_minus_zero };

struct SetSpec {
    SetKind kind = SetKind::explicit_list;
    std::int64_t start = 0;
    std::uint64_t length = 0;
    std::uint64_t size = 0;
    std::uint64_t seed = 0;
    std::uint64_t order = 0;
    std::vector<std::uint64_t> elements;

    friend bool operator==(const SetSpec&, const SetSpec&) = default;
};

class SetSpecError : public std::invalid_argument {
public:
    SetSpecError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

SetSpec parse_set_spec(std::string_view text);
std::string to_string(const SetSpec& spec);

struct GenerateOptions {
    /// Reject sets containing 0 (outer sets of inverse-phase sums).
    bool require_nonzero = false;
};

FpSet generate_set(const SetSpec& spec, const PrimeModulus& pm, GenerateOptions opts = {});

/// Smallest generator of F_p^*.
std::uint32_t primitive_root(const PrimeModulus& pm);

/// Largest b with b^r <= x.
std::uint64_t integer_root(std::uint64_t x, unsigned r);

/// Template form of a set spec used by sweep configs.  Numeric arguments may
/// also be `p`, `p/<d>`, `p-<d>`; for `random`, missing or `auto` size and
/// seed are filled from the supplied defaults.
SetSpec resolve_template(std::string_view text, std::uint32_t p, std::uint64_t auto_size, std::uint64_t auto_seed);

}  // namespace dexp
