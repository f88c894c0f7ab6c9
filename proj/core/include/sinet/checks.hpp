#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sinet/harness.hpp"

namespace sinet {

// Flags for a named check. Missing keys fall back to per-check defaults.
struct CheckOptions {
    std::map<std::string, std::string> values;
    std::optional<std::uint64_t> seed;  // randomized inputs only when set
    Mode mode = Mode::Float;
    std::string sis_json;  // SisFunction text for the sis checks; empty = built-in sample

    bool has(const std::string& key) const { return values.count(key) != 0; }
    int get_int(const std::string& key, int fallback) const;
    Rational get_rational(const std::string& key, const Rational& fallback) const;
};

// lemma-5.1 ... theorem-3.3, in a fixed order.
const std::vector<std::string>& check_names();

// One row per measured construct; pass covers both the error bound and the
// size budget. Throws ValidationError for an unknown name.
std::vector<CsvRow> run_check(const std::string& name, const CheckOptions& options);

// The sample SisFunction used when no --sis file is given: B-spline order k,
// coefficients k/2^20 spread over (-1, 1) from a fixed recipe or the seed.
SisFunction sample_sis(int k, int d, int j, std::optional<std::uint64_t> seed);

}  // namespace sinet
