#pragma once

#include "reflect/coefficients.hpp"
#include "reflect/geometry.hpp"
#include "reflect/penalized.hpp"
#include "reflect/rates.hpp"
#include "reflect/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reflect {

enum class ExperimentKind { Validate, DistRate, StrongRate, WeakCompare };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    ConvexDomain domain = ConvexDomain::half_line(0.0);
    CatalogEntry coefficients;
    Vector x0;
    Scalar horizon_T = 1.0;
    int log2_fine_steps = 16;
    std::uint64_t master_seed = 20'240'601;
    std::size_t num_paths = 400;
    std::vector<Scalar> n_list;
    PenaltyScheme scheme = PenaltyScheme::Splitting;
    int substeps = 1;
    std::vector<Scalar> p_list{2.0};
    ReferenceSpec reference;
    WeakFunctional weak_functional = WeakFunctional::Mean;
    std::optional<ExperimentKind> kind;
    std::string output_dir;

    /// Normalized echo of the document with every default filled in. Hashing
    /// it covers every input that affects the numbers.
    nlohmann::json canonical;
};

/// Parses and validates a config document. Unknown keys are rejected.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& file);

ConvexDomain parse_domain(const nlohmann::json& spec);

/// Sweep description of a config, with Euler levels above the stability limit
/// removed and reported through skipped.
SweepSpec make_sweep_spec(const ExperimentConfig& config, unsigned threads,
                          std::vector<Scalar>* skipped = nullptr);

/// Slope band a rate experiment is judged against.
std::optional<SlopeBand> default_band(ExperimentKind kind, const ConvexDomain& domain);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(const std::string& bytes);

/// Fixed-format CSV with columns n,num_paths,p,error,stderr; 17 significant
/// digits.
std::string format_error_csv(const std::vector<ErrorTable>& tables);

struct RunResult {
    int exit_code = 0;
    std::string summary;
    std::vector<std::filesystem::path> files;
};

/// Runs one experiment and writes its artifacts into out_dir. Throws
/// ConfigError for configuration problems and NumericalError (SweepError) for
/// integrator failures; a completed validation with failing diagnostics
/// returns exit code 3.
RunResult run_experiment(ExperimentKind kind, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir, unsigned threads,
                         std::ostream& log);

inline constexpr const char* kToolVersion = "1.0.0";

}  // namespace reflect
