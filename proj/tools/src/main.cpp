#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "osclab_cli/runner.hpp"

namespace {

using namespace osclab;

// Exit codes: 0 all properties pass, 1 some property failed, 2 invalid
// configuration, 3 any other error.
int export_matrix(const cli::RunConfig& cfg, double eps, const std::string& op,
                  const std::string& path) {
  const StructuredMesh mesh(cfg.spec.nx, cfg.spec.ny);
  SparseOperator m;
  if (op == "canonical" || op == "anomalous") {
    const QuadratureRule rule =
        eps > 0.0 ? oscillation_resolving_rule(DiffeoFamily::perturbed(eps, Profile::Linear), mesh)
                  : QuadratureRule{};
    m = op == "canonical" ? assemble_stiffness_canonical(eps, mesh, rule, cfg.spec.a)
                          : assemble_limit_anomalous(mesh, rule, cfg.spec.a);
  } else {
    const DiffeoFamily fam = DiffeoFamily::make(eps, cfg.spec.profile);
    const FieldQuadrature q(fam, mesh, oscillation_resolving_rule(fam, mesh));
    if (op == "stiffness") {
      m = assemble_stiffness_adapted(q, cfg.spec.a);
    } else if (op == "mass") {
      m = assemble_mass(q);
    } else {
      m = assemble_boundary_mass(q);
    }
  }
  if (path.empty() || path == "-") {
    m.write_coordinate(std::cout);
  } else {
    std::ofstream out(path);
    m.write_coordinate(out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osclab: semilinear problems on oscillating domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string study;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* run = app.add_subcommand("run", "run studies from a JSON config");
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--study", study, "override the study")
      ->check(CLI::IsMember({"resolvent", "eigs", "wronglimit", "boundary", "evolve",
                             "equilibria", "attractor", "all"}));
  run->add_option("--out", out_dir, "override the output directory");
  auto* seed_opt = run->add_option("--seed", seed, "override the seed");
  run->add_option("--threads", threads, "worker threads for per-eps legs")
      ->check(CLI::PositiveNumber);

  double eps = 0.0;
  std::string op = "stiffness";
  std::string matrix_out;
  std::string matrix_config;
  auto* exp = app.add_subcommand("export-matrix", "write an assembled operator as row col value");
  exp->add_option("--config", matrix_config, "config file (defaults otherwise)")
      ->check(CLI::ExistingFile);
  exp->add_option("--eps", eps, "epsilon")->check(CLI::NonNegativeNumber);
  exp->add_option("--operator", op, "operator")
      ->check(CLI::IsMember({"stiffness", "mass", "boundary", "canonical", "anomalous"}));
  exp->add_option("--out", matrix_out, "output file, - for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp) {
      const cli::RunConfig cfg = matrix_config.empty() ? cli::RunConfig{} : cli::load_config(matrix_config);
      return export_matrix(cfg, eps, op, matrix_out);
    }
    cli::RunConfig cfg = cli::load_config(config_path);
    if (!study.empty()) cfg.study = cli::parse_study(study);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    return cli::run(cfg, std::cout);
  } catch (const ConfigInvalid& e) {
    std::cerr << "invalid configuration (" << e.hypothesis() << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
