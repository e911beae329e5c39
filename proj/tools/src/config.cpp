#include "osclab_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace osclab::cli {

using nlohmann::json;

namespace {

constexpr std::pair<Study, const char*> kStudyNames[] = {
    {Study::Resolvent, "resolvent"}, {Study::Eigs, "eigs"},
    {Study::WrongLimit, "wronglimit"}, {Study::Boundary, "boundary"},
    {Study::Evolve, "evolve"},       {Study::Equilibria, "equilibria"},
    {Study::Attractor, "attractor"}, {Study::All, "all"},
};

void reject_unknown(const json& j, const std::string& where, std::set<std::string> known) {
  if (!j.is_object()) throw ConfigInvalid("schema", where + " must be an object");
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigInvalid("schema", "unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

InteriorNonlinearity parse_f(const json& j) {
  reject_unknown(j, "spec.f", {"kind", "radius"});
  InteriorNonlinearity f;
  const std::string kind = j.value("kind", std::string("cubic"));
  if (kind == "cubic") {
    f.kind = InteriorNonlinearity::Kind::CubicSaturated;
  } else if (kind == "zero") {
    f.kind = InteriorNonlinearity::Kind::Zero;
  } else {
    throw ConfigInvalid("schema", "spec.f.kind must be 'cubic' or 'zero'");
  }
  read(j, "radius", f.radius);
  return f;
}

BoundaryNonlinearity parse_g(const json& j) {
  reject_unknown(j, "spec.g", {"kind", "scale"});
  BoundaryNonlinearity g;
  const std::string kind = j.value("kind", std::string("tanh"));
  if (kind == "tanh") {
    g.kind = BoundaryNonlinearity::Kind::ScaledTanh;
  } else if (kind == "zero") {
    g.kind = BoundaryNonlinearity::Kind::Zero;
  } else {
    throw ConfigInvalid("schema", "spec.g.kind must be 'tanh' or 'zero'");
  }
  read(j, "scale", g.scale);
  return g;
}

ProblemSpec parse_spec(const json& j) {
  reject_unknown(j, "spec", {"a", "f", "g", "d0", "c0", "epsilons", "profile", "mesh", "dt",
                             "t_final", "tolerances"});
  ProblemSpec s;
  read(j, "a", s.a);
  if (j.contains("f")) s.f = parse_f(j.at("f"));
  if (j.contains("g")) s.g = parse_g(j.at("g"));
  read(j, "d0", s.d0);
  read(j, "c0", s.c0);
  read(j, "epsilons", s.epsilons);
  if (j.contains("profile")) {
    const std::string p = j.at("profile").get<std::string>();
    if (p == "paper") {
      s.profile = Profile::Paper;
    } else if (p == "linear") {
      s.profile = Profile::Linear;
    } else {
      throw ConfigInvalid("schema", "spec.profile must be 'paper' or 'linear'");
    }
  }
  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    reject_unknown(m, "spec.mesh", {"nx", "ny"});
    read(m, "nx", s.nx);
    read(m, "ny", s.ny);
  }
  read(j, "dt", s.dt);
  read(j, "t_final", s.t_final);
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "spec.tolerances", {"cg", "eigen", "newton", "newton_max_iterations"});
    read(t, "cg", s.tol.cg);
    read(t, "eigen", s.tol.eigen);
    read(t, "newton", s.tol.newton);
    read(t, "newton_max_iterations", s.tol.newton_max_iterations);
  }
  return s;
}

json spec_json(const ProblemSpec& s) {
  json j;
  j["a"] = s.a;
  j["f"] = {{"kind", s.f.kind == InteriorNonlinearity::Kind::Zero ? "zero" : "cubic"},
            {"radius", s.f.radius}};
  j["g"] = {{"kind", s.g.kind == BoundaryNonlinearity::Kind::Zero ? "zero" : "tanh"},
            {"scale", s.g.scale}};
  j["d0"] = s.d0;
  j["c0"] = s.c0;
  j["epsilons"] = s.epsilons;
  j["profile"] = s.profile == Profile::Paper ? "paper" : "linear";
  j["mesh"] = {{"nx", s.nx}, {"ny", s.ny}};
  j["dt"] = s.dt;
  j["t_final"] = s.t_final;
  j["tolerances"] = {{"cg", s.tol.cg},
                     {"eigen", s.tol.eigen},
                     {"newton", s.tol.newton},
                     {"newton_max_iterations", s.tol.newton_max_iterations}};
  return j;
}

}  // namespace

const char* to_string(Study s) noexcept {
  for (const auto& [study, name] : kStudyNames) {
    if (study == s) return name;
  }
  return "?";
}

Study parse_study(const std::string& name) {
  for (const auto& [study, n] : kStudyNames) {
    if (name == n) return study;
  }
  throw ConfigInvalid("study", "unknown study '" + name + "'");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid("schema", e.what());
  }
  RunConfig cfg;
  try {
    reject_unknown(j, "config", {"spec", "study", "output_dir", "seed", "threads", "eigs",
                                 "resolvent", "wronglimit", "attractor"});
    if (j.contains("spec")) cfg.spec = parse_spec(j.at("spec"));
    if (j.contains("study")) cfg.study = parse_study(j.at("study").get<std::string>());
    read(j, "output_dir", cfg.output_dir);
    read(j, "seed", cfg.seed);
    read(j, "threads", cfg.threads);
    if (j.contains("eigs")) {
      reject_unknown(j.at("eigs"), "eigs", {"k"});
      read(j.at("eigs"), "k", cfg.eig_count);
    }
    if (j.contains("resolvent")) {
      const json& r = j.at("resolvent");
      reject_unknown(r, "resolvent", {"lambda", "rhs"});
      read(r, "lambda", cfg.resolvent.lambda);
      read(r, "rhs", cfg.resolvent.rhs);
    }
    if (j.contains("wronglimit")) {
      const json& w = j.at("wronglimit");
      reject_unknown(w, "wronglimit", {"epsilons", "a", "mesh"});
      read(w, "epsilons", cfg.wronglimit.epsilons);
      read(w, "a", cfg.wronglimit.a);
      read(w, "mesh", cfg.wronglimit.mesh);
    }
    if (j.contains("attractor")) {
      const json& a = j.at("attractor");
      reject_unknown(a, "attractor", {"t_transient", "t_sample", "sample_every"});
      read(a, "t_transient", cfg.attractor.t_transient);
      read(a, "t_sample", cfg.attractor.t_sample);
      read(a, "sample_every", cfg.attractor.sample_every);
    }
  } catch (const json::exception& e) {
    throw ConfigInvalid("schema", e.what());
  }
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["spec"] = spec_json(cfg.spec);
  j["study"] = to_string(cfg.study);
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["eigs"] = {{"k", cfg.eig_count}};
  j["resolvent"] = {{"lambda", cfg.resolvent.lambda}, {"rhs", cfg.resolvent.rhs}};
  j["wronglimit"] = {{"epsilons", cfg.wronglimit.epsilons},
                     {"a", cfg.wronglimit.a},
                     {"mesh", cfg.wronglimit.mesh}};
  j["attractor"] = {{"t_transient", cfg.attractor.t_transient},
                    {"t_sample", cfg.attractor.t_sample},
                    {"sample_every", cfg.attractor.sample_every}};
  return j.dump(2) + "\n";
}

void validate_config(const RunConfig& cfg) {
  validate(cfg.spec);
  if (cfg.threads < 1) throw ConfigInvalid("threads", "threads must be >= 1");
  if (cfg.eig_count < 1 || cfg.eig_count > 6) throw ConfigInvalid("eigs", "k must be in [1, 6]");
  const auto& r = cfg.resolvent.rhs;
  if (r != "one" && r != "x2" && r != "random") {
    throw ConfigInvalid("resolvent", "rhs must be 'one', 'x2' or 'random'");
  }
  if (!(cfg.resolvent.lambda < cfg.spec.a)) {
    // A_eps - lambda M_eps stays positive definite only for lambda < a.
    throw ConfigInvalid("resolvent", "lambda must lie left of the spectrum (lambda < a)");
  }
  for (double e : cfg.wronglimit.epsilons) {
    if (!(e > 0.0)) throw ConfigInvalid("wronglimit", "epsilons must be positive");
  }
  if (cfg.wronglimit.mesh < 2) throw ConfigInvalid("wronglimit", "mesh must be >= 2");
  if (!(cfg.attractor.t_transient >= 0.0) || !(cfg.attractor.t_sample >= 0.0) ||
      cfg.attractor.sample_every < 1) {
    throw ConfigInvalid("attractor", "times must be >= 0 and sample_every >= 1");
  }
  const StructuredMesh mesh(cfg.spec.nx, cfg.spec.ny);
  const DiffeoFamily limit = DiffeoFamily::identity(cfg.spec.profile);
  const double lambda0 =
      robin_first_eigenvalue(cfg.spec, limit, mesh, oscillation_resolving_rule(limit, mesh));
  if (!(lambda0 > 0.0)) {
    std::ostringstream msg;
    msg << "first Robin eigenvalue lambda_0(0) = " << lambda0 << " is not positive";
    throw ConfigInvalid("autovalor", msg.str());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("schema", "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig cfg = parse_config(text.str());
  validate_config(cfg);
  return cfg;
}

}  // namespace osclab::cli
