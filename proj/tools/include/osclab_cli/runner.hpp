#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "osclab_cli/config.hpp"

namespace osclab::cli {

/// Right-hand side of the resolvent study: 1, x2, or uniform [-1, 1] nodal
/// values drawn from mt19937_64(seed).
NodalField resolvent_rhs(const RunConfig& cfg, const StructuredMesh& mesh);

/// Runs the selected studies ("all" runs every one; "eigs" includes the
/// Robin eigenvalue table) in a fixed order.
std::vector<StudyReport> run_studies(const RunConfig& cfg);

/// <dir>/<study>.csv for each report, every attachment, and summary.json.
void write_outputs(const RunConfig& cfg, const std::vector<StudyReport>& reports,
                   const std::filesystem::path& dir);

/// run_studies + write_outputs with one summary line per study on `log`.
/// Returns 0 iff every gating property passed.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace osclab::cli
