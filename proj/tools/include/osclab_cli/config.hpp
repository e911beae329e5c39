#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "osclab/experiments.hpp"

namespace osclab::cli {

enum class Study { Resolvent, Eigs, WrongLimit, Boundary, Evolve, Equilibria, Attractor, All };

const char* to_string(Study s) noexcept;
/// Throws ConfigInvalid("study", ...) for unknown names.
Study parse_study(const std::string& name);

struct ResolventSettings {
  double lambda = -1.0;
  std::string rhs = "one";  ///< "one", "x2" or "random" (seeded)

  bool operator==(const ResolventSettings&) const = default;
};

struct WrongLimitSettings {
  std::vector<double> epsilons{0.05, 0.02, 0.01, 0.005};
  double a = 0.0;
  int mesh = 32;

  bool operator==(const WrongLimitSettings&) const = default;
};

struct AttractorSettings {
  double t_transient = 30.0;
  double t_sample = 5.0;
  int sample_every = 25;

  bool operator==(const AttractorSettings&) const = default;
};

struct RunConfig {
  ProblemSpec spec;
  Study study = Study::All;
  std::string output_dir = "osclab-out";
  std::uint64_t seed = 1;
  int threads = 1;
  int eig_count = 4;
  ResolventSettings resolvent;
  WrongLimitSettings wronglimit;
  AttractorSettings attractor;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the JSON schema documented in the README. Missing keys keep their
/// defaults; unknown keys and wrong types raise ConfigInvalid("schema", ...).
/// Does not run hypothesis validation.
RunConfig parse_config(const std::string& json_text);
std::string serialize_config(const RunConfig& cfg);

/// validate(spec), the run settings, and the Robin condition
/// lambda_0(0) > 0 (ConfigInvalid("autovalor", ...)).
void validate_config(const RunConfig& cfg);

/// Reads, parses and validates.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace osclab::cli
