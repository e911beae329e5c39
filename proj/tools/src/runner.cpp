#include "osclab_cli/runner.hpp"

#include <fstream>
#include <ostream>
#include <random>

#include "json.hpp"

namespace osclab::cli {

NodalField resolvent_rhs(const RunConfig& cfg, const StructuredMesh& mesh) {
  if (cfg.resolvent.rhs == "x2") return interpolate(mesh, [](Point p) { return p.x2; });
  if (cfg.resolvent.rhs == "random") {
    std::mt19937_64 gen(cfg.seed);
    NodalField f{Vector(mesh.num_nodes())};
    // Explicit bit conversion: distributions are not portable across
    // standard libraries, the engine is.
    for (double& v : f.values) v = 2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0;
    return f;
  }
  return interpolate(mesh, [](Point) { return 1.0; });
}

std::vector<StudyReport> run_studies(const RunConfig& cfg) {
  const ProblemSpec& spec = cfg.spec;
  const StructuredMesh mesh(spec.nx, spec.ny);
  StudyOptions opts;
  opts.threads = cfg.threads;
  auto selected = [&](Study s) { return cfg.study == Study::All || cfg.study == s; };

  std::vector<StudyReport> out;
  if (selected(Study::Resolvent)) {
    out.push_back(resolvent_convergence_study(spec, spec.epsilons, cfg.resolvent.lambda,
                                              resolvent_rhs(cfg, mesh), opts));
  }
  if (selected(Study::Eigs)) {
    out.push_back(eigenvalue_convergence_study(spec, spec.epsilons, cfg.eig_count, opts));
    out.push_back(robin_eigenvalue_study(spec, spec.epsilons, opts));
  }
  if (selected(Study::WrongLimit)) {
    const StructuredMesh wl(cfg.wronglimit.mesh, cfg.wronglimit.mesh);
    out.push_back(wrong_limit_study(wl, cfg.wronglimit.epsilons, cfg.wronglimit.a, opts));
  }
  if (selected(Study::Boundary)) out.push_back(boundary_average_study(spec.epsilons));
  if (selected(Study::Evolve)) {
    out.push_back(evolve_study(spec, spec.epsilons, attractor_initial_conditions(mesh), opts));
  }
  if (selected(Study::Equilibria)) out.push_back(equilibria_study(spec, spec.epsilons, opts));
  if (selected(Study::Attractor)) {
    AttractorOptions ao;
    ao.t_transient = cfg.attractor.t_transient;
    ao.t_sample = cfg.attractor.t_sample;
    ao.sample_every = cfg.attractor.sample_every;
    ao.threads = cfg.threads;
    out.push_back(attractor_semidistance_study(spec, spec.epsilons,
                                               attractor_initial_conditions(mesh), ao));
  }
  return out;
}

void write_outputs(const RunConfig& cfg, const std::vector<StudyReport>& reports,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json studies = nlohmann::json::array();
  bool all = true;
  for (const auto& r : reports) {
    std::ofstream csv(dir / (r.name + ".csv"), std::ios::binary);
    write_csv(csv, r);
    for (const auto& [name, content] : r.attachments) {
      std::ofstream(dir / name, std::ios::binary) << content;
    }
    nlohmann::json props = nlohmann::json::array();
    for (const auto& p : r.properties) {
      props.push_back(
          {{"name", p.name}, {"passed", p.passed}, {"gating", p.gating}, {"detail", p.detail}});
    }
    studies.push_back({{"name", r.name},
                       {"passed", r.passed()},
                       {"mesh", {r.nx, r.ny}},
                       {"quadrature", r.quadrature},
                       {"properties", props}});
    all = all && r.passed();
  }
  nlohmann::json summary;
  summary["config"] = nlohmann::json::parse(serialize_config(cfg));
  summary["studies"] = studies;
  summary["passed"] = all;
  std::ofstream(dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
}

int run(const RunConfig& cfg, std::ostream& log) {
  const auto reports = run_studies(cfg);
  write_outputs(cfg, reports, cfg.output_dir);
  bool all = true;
  for (const auto& r : reports) {
    log << summary_line(r) << '\n';
    for (const auto& p : r.properties) {
      if (!p.passed) {
        log << "  " << (p.gating ? "failed: " : "note: ") << p.name << " (" << p.detail << ")\n";
      }
    }
    all = all && r.passed();
  }
  return all ? 0 : 1;
}

}  // namespace osclab::cli
