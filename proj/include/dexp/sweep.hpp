#pragma once

// Parameter sweeps over (p, k, r, replicate) with deterministic CSV/JSON output.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dexp/verify.hpp"

namespace dexp {

inline const std::vector<std::string>& all_checkers() {
    static const std::vector<std::string> names{
        "bias_sandwich", "bias_upper",  "uniformity", "rho_bound",   "rho_sigma_bound",
        "rho_support",   "decomposition", "r1_r2",    "kloosterman", "theorem"};
    return names;
}

struct SweepConfig {
    std::vector<std::uint32_t> primes{7, 11, 13, 31, 101, 199, 499};
    std::vector<unsigned> k_values{1, 2, 3};
    std::vector<unsigned> r_values{2, 3};
    std::string m_template = "interval:1:p/5";
    std::string n_template = "random:auto";
    unsigned n_count = 20;
    std::uint64_t seed = 20251110;
    std::vector<std::string> checkers = all_checkers();
    std::string out = "sweep.csv";
    /// Derived from `out` when empty: <stem>.json and <stem>_theorem.csv.
    std::string summary;
    std::string theorem_out;
    int threads = 0;

    void validate() const;
    std::string summary_path() const;
    std::string theorem_path() const;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the JSON config; unknown fields and invalid values raise ConfigError.
SweepConfig parse_sweep_config(const std::string& json_text);

struct SweepRow {
    VerifyReport report;
    std::uint32_t p = 0;
    unsigned k = 0;  // 0: not applicable
    unsigned r = 0;
    unsigned instance = 0;
    std::string set_m;
    std::string set_n;
    std::uint64_t seed = 0;
};

struct TheoremRow {
    TheoremReport report;
    std::uint32_t p = 0;
    unsigned instance = 0;
    std::string set_m;
    std::string set_n;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<TheoremRow> theorem_rows;
    bool interrupted = false;

    std::size_t exact_failures() const;
    /// 0 when every exact check passed, 1 otherwise.
    int exit_code() const;
};

/// Size of the i-th auto-sized random set among `count`: spread over [2, ceil(2 sqrt p)].
std::uint64_t auto_set_size(std::uint32_t p, unsigned i, unsigned count);

SweepResult run_sweep(const SweepConfig& config);

void write_rows_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::string& header_comment = "");
void write_theorem_csv(std::ostream& os, const std::vector<TheoremRow>& rows);
std::string summary_json(const SweepConfig& config, const SweepResult& result);

/// Runs, writes the three output files, returns the exit code.
int run_sweep_to_files(const SweepConfig& config);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);
std::string csv_escape(const std::string& field);

}  // namespace dexp
