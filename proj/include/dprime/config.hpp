#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "dprime/classify.hpp"
#include "dprime/propagate.hpp"

namespace dprime {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;

const char* library_version();

struct Tolerances {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double hs_tol = 1e-8;
};

// Explicit gaps, or `harmonic` consecutive gaps of length 1/k starting at `start`.
struct CriteriaConfig {
    GapStructure gaps;
    std::size_t harmonic = 0;
    double start = 0.0;
    bool lower_semibounded = false;
    std::vector<double> epsilon_grid{0.5, 1.0, 2.0};
};

struct AsymptoticsConfig {
    double alpha = 1.0;
    std::vector<double> r_grid;  // m-function check abscissae
    std::vector<double> t_grid;  // spectral-function check abscissae
    Complex mu{-1.0, 0.0};
};

struct ProblemConfig {
    ProblemSpec problem;
    Tolerances tolerances;
    std::optional<EndpointDescriptor> left_endpoint;
    std::optional<EndpointDescriptor> right_endpoint;
    std::optional<CriteriaConfig> criteria;
    std::optional<AsymptoticsConfig> asymptotics;
};

// Strict: unknown keys, wrong types and missing required fields raise
// SchemaError carrying the JSON pointer of the offending value.
ProblemConfig parse_config(const Json& j);
// Throws InputError when the file cannot be read or is not JSON.
ProblemConfig load_config(const std::string& path);

// Canonical form: every field present, keys sorted. parse_config(to_json(c))
// reproduces c.
Json to_json(const ProblemConfig& c);

// FNV-1a 64-bit over the compact canonical dump, as 16 lowercase hex digits.
std::string problem_hash(const Json& canonical);
std::uint64_t fnv1a64(const std::string& bytes);

GapStructure realize_gaps(const CriteriaConfig& c);

// Result envelope shared by every JSON output of the command-line tool.
Json result_envelope(const std::string& command, const std::string& method, const std::string& hash,
                     const Tolerances& tol, Json result);
// Throws SchemaError if j is not a well-formed result envelope.
void validate_result(const Json& j);

}  // namespace dprime
