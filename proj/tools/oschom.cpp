#include "oschom/acceptance.hpp"
#include "oschom/constraint.hpp"
#include "oschom/error.hpp"
#include "oschom/gammacheck.hpp"
#include "oschom/geodesic.hpp"
#include "oschom/graph_io.hpp"
#include "oschom/levelset.hpp"
#include "oschom/metric.hpp"
#include "oschom/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oschom;

namespace {

struct RunConfig {
  std::string command;
  std::string constraint = "sin-product";
  std::string grid_file;
  std::vector<double> z;
  double c = 0.05;
  int directions = 0;
  std::vector<double> T;
  int resolution = 128;
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double alpha = 2.0 / 3.0;
  std::vector<double> w{0.6, 0.8};
  double k = 4.0;
  std::string profile = "sawtooth";
  std::string spec_file;
  std::uint64_t seed = 1;
  std::string out = "oschom-out";
  int threads = 0;
};

// Values from the config file fill every option the command line left unset.
void apply_config(const json& j, RunConfig& cfg, const CLI::App& app) {
  auto given = [&](const std::string& name) { return app.count("--" + name) > 0; };
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key) && !given(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  if (j.contains("command") && cfg.command.empty()) cfg.command = j.at("command").get<std::string>();
  take("constraint", cfg.constraint);
  take("grid", cfg.grid_file);
  take("z", cfg.z);
  take("c", cfg.c);
  take("directions", cfg.directions);
  take("T", cfg.T);
  take("resolution", cfg.resolution);
  take("eps", cfg.eps);
  take("alpha", cfg.alpha);
  take("w", cfg.w);
  take("k", cfg.k);
  take("profile", cfg.profile);
  take("spec", cfg.spec_file);
  take("seed", cfg.seed);
  take("out", cfg.out);
  take("threads", cfg.threads);
}

PeriodicConstraint constraint_of(const RunConfig& cfg) {
  if (!cfg.grid_file.empty()) return PeriodicConstraint::load_grid_file(cfg.grid_file);
  return make_constraint(cfg.constraint);
}

Vec3 vector_of(const std::vector<double>& v, int dim) {
  if (static_cast<int>(v.size()) != dim) {
    fail(ErrorCode::ConfigError, "--w needs " + std::to_string(dim) + " components");
  }
  Vec3 out = Vec3::Zero();
  for (int d = 0; d < dim; ++d) out(d) = v[d];
  return out;
}

std::vector<double> schedule_of(const RunConfig& cfg, int dim) {
  std::vector<double> s = cfg.T.empty() ? default_schedule(dim) : cfg.T;
  std::sort(s.begin(), s.end());
  return s;
}

MetricOptions metric_options(const RunConfig& cfg) {
  MetricOptions mo;
  mo.directions = cfg.directions;
  mo.resolution = cfg.resolution;
  mo.threads = cfg.threads;
  mo.stable.schedule = cfg.T;
  return mo;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

json vec_json(const Vec3& v, int dim) {
  json a = json::array();
  for (int d = 0; d < dim; ++d) a.push_back(v(d));
  return a;
}

std::vector<PeriodicGraph> level_graphs(const PeriodicConstraint& phi, const RunConfig& cfg) {
  if (phi.dim() == 3) return exact_level_graphs(phi);
  std::vector<double> zs = cfg.z.empty() ? scan_level_candidates(phi, cfg.resolution) : cfg.z;
  std::vector<PeriodicGraph> out;
  for (double z : zs) {
    try {
      out.push_back(extract_level_graph(phi, z, cfg.resolution));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LevelOutOfRange || !cfg.z.empty()) throw;
    }
  }
  return out;
}

int cmd_levels(const RunConfig& cfg) {
  PeriodicConstraint phi = constraint_of(cfg);
  std::vector<PeriodicGraph> graphs = level_graphs(phi, cfg);
  json summary = json::array();
  std::cout << "level,vertices,edges,components,unbounded,max_rank\n";
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const PeriodicGraph& g = graphs[i];
    ComponentReport rep = classify_components(g);
    int max_rank = 0;
    json comps = json::array();
    for (const auto& c : rep.components) {
      max_rank = std::max(max_rank, c.translation_rank);
      json gens = json::array();
      for (const auto& s : c.generators) gens.push_back(vec_json(s.cast<double>(), g.dim));
      comps.push_back({{"vertices", c.vertices.size()}, {"rank", c.translation_rank}, {"generators", gens}});
    }
    double z = g.level.value_or(0.0);
    json rec = {{"level", z},
                {"vertices", g.num_vertices()},
                {"edges", g.edges.size()},
                {"unbounded", rep.num_unbounded},
                {"non_degenerate", rep.satisfies_non_degenerate},
                {"components", comps},
                {"notes", g.notes}};
    if (rep.num_unbounded > 0) rec["length_constant_estimate"] = estimate_length_constant(g, 200, cfg.seed);
    summary.push_back(rec);
    std::string stem = "level_" + std::to_string(i);
    write_text_file(fs::path(cfg.out) / (stem + ".json"), graph_to_json(g));
    if (g.dim == 2) write_text_file(fs::path(cfg.out) / (stem + ".svg"), graph_svg(g));
    std::cout << num(z) << ',' << g.num_vertices() << ',' << g.edges.size() << ',' << rep.components.size() << ','
              << rep.num_unbounded << ',' << max_rank << '\n';
  }
  write_text_file(fs::path(cfg.out) / "levels.json", summary.dump(1) + "\n");
  return 0;
}

int cmd_psi(const RunConfig& cfg) {
  PeriodicConstraint phi = constraint_of(cfg);
  HomogenizedMetric m = assemble_metric(phi, cfg.z, metric_options(cfg));
  std::ostringstream csv;
  csv << (m.dim == 2 ? "wx,wy" : "wx,wy,wz") << ",level,psi_hom,error_bound";
  for (double T : schedule_of(cfg, m.dim)) csv << ",psi_T" << num(T);
  csv << '\n';
  for (std::size_t k = 0; k < m.directions.size(); ++k) {
    const auto& s = m.directional_samples[m.psi_level[k]].samples[k];
    for (int d = 0; d < m.dim; ++d) csv << num(m.directions[k](d)) << ',';
    csv << num(s.level) << ',' << num(m.psi_values[k]) << ',' << num(s.error_bound);
    for (const auto& [T, v] : s.psi_T_values) csv << ',' << num(v);
    csv << '\n';
  }
  write_text_file(fs::path(cfg.out) / "psi.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_ball(const RunConfig& cfg) {
  PeriodicConstraint phi = constraint_of(cfg);
  HomogenizedMetric m = assemble_metric(phi, cfg.z, metric_options(cfg));
  write_text_file(fs::path(cfg.out) / "metric.json", metric_to_json(m) + "\n");
  if (m.dim == 2) write_text_file(fs::path(cfg.out) / "ball.svg", ball_svg(m));
  std::cout << "levels used:";
  for (double z : m.levels_used) std::cout << ' ' << num(z);
  std::cout << "\nball vertices: " << m.ball_vertices.size() << '\n';
  for (const auto& l : m.labels) std::cout << "label: " << l << '\n';
  return 0;
}

int cmd_tube(const RunConfig& cfg) {
  PeriodicConstraint phi = constraint_of(cfg);
  if (cfg.z.size() != 1) fail(ErrorCode::ConfigError, "tube needs exactly one --z");
  Vec3 w = vector_of(cfg.w, phi.dim());
  PeriodicGraph g = tube_graph(phi, cfg.z.front(), cfg.c, cfg.resolution);
  std::ostringstream csv;
  csv << "T,psi_T_zc\n";
  for (double T : schedule_of(cfg, phi.dim())) csv << num(T) << ',' << num(psi_T_z(g, w, T)) << '\n';
  write_text_file(fs::path(cfg.out) / "tube.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  FinslerBallSpec spec = cfg.spec_file.empty() ? random_rational_spec(cfg.seed)
                                               : spec_from_json(read_text_file(cfg.spec_file));
  PeriodicGraph g = build_network(spec);
  SynthesisCheck check = verify_synthesis(g, spec, cfg.directions > 0 ? cfg.directions : 64);
  write_text_file(fs::path(cfg.out) / "spec.json", spec_to_json(spec) + "\n");
  write_text_file(fs::path(cfg.out) / "network.json", graph_to_json(g));
  write_text_file(fs::path(cfg.out) / "network.svg", graph_svg(g));
  std::ostringstream csv;
  csv << "wx,wy,psi_computed,psi_target\n";
  for (std::size_t i = 0; i < check.directions.size(); ++i) {
    csv << num(check.directions[i].x()) << ',' << num(check.directions[i].y()) << ',' << num(check.computed[i]) << ','
        << num(check.target[i]) << '\n';
  }
  write_text_file(fs::path(cfg.out) / "synth.csv", csv.str());
  std::cout << "cell size " << spec.cell_size.str() << ", " << g.num_vertices() << " vertices, max relative error "
            << num(check.max_relative_error) << '\n';
  return 0;
}

int cmd_degenerate(const RunConfig& cfg) {
  ShearProfile profile = cfg.profile == "sine" ? ShearProfile::Sine : ShearProfile::Sawtooth;
  if (cfg.profile != "sine" && cfg.profile != "sawtooth") fail(ErrorCode::ConfigError, "--profile: sawtooth or sine");
  DegenerateConstruction dc = build_degenerate(cfg.k, profile);
  PeriodicGraph g = extract_level_graph(dc.phi, 0.0, cfg.resolution);
  ComponentReport rep = classify_components(g);
  LiftedGraphSearch search(g);
  double psi = psi_hom_z(search, rep, dc.finite_direction);
  double r = std::sqrt(2.0);
  json unreachable = json::array();
  for (double T : schedule_of(cfg, 2)) {
    unreachable.push_back({{"T", T}, {"certified", certify_unreachable(g, rep, {Vec3::Zero(), r}, {vec2(T, 0), r})}});
  }
  json out = {{"k", cfg.k},
              {"profile", cfg.profile},
              {"amplitude", dc.amplitude},
              {"period_length", dc.period_length},
              {"psi_finite_direction", psi},
              {"components", rep.components.size()},
              {"unbounded", rep.num_unbounded},
              {"horizontal_unreachable", unreachable}};
  write_text_file(fs::path(cfg.out) / "degenerate.json", out.dump(1) + "\n");
  write_text_file(fs::path(cfg.out) / "degenerate.svg", graph_svg(g));
  std::cout << out.dump(1) << '\n';
  return 0;
}

int cmd_gamma(const RunConfig& cfg) {
  PeriodicConstraint phi = constraint_of(cfg);
  MetricOptions mo = metric_options(cfg);
  HomogenizedMetric m = assemble_metric(phi, cfg.z, mo);
  TrendOptions to;
  to.seed = cfg.seed;
  to.threads = cfg.threads;
  TrendTable t = gamma_trend(phi, m, vector_of(cfg.w, phi.dim()), cfg.eps, cfg.alpha, to);
  write_text_file(fs::path(cfg.out) / "gamma.csv", t.to_csv());
  std::cout << t.to_csv();
  std::cout << "recovery nonincreasing: " << (t.recovery_nonincreasing ? "yes" : "no")
            << ", descent above floor: " << (t.descent_above_floor ? "yes" : "no") << '\n';
  return 0;
}

int cmd_examples(const RunConfig& cfg) {
  AcceptanceOptions ao;
  ao.threads = cfg.threads;
  bool all = true;
  run_acceptance(ao, [&](const CriterionResult& r) {
    all = all && r.pass;
    std::cout << format_result(r) << std::endl;
  });
  return all ? 0 : 3;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ConfigError:
    case ErrorCode::IoError:
    case ErrorCode::UnsupportedKind:
    case ErrorCode::LevelOutOfRange: return 2;
    default: return 3;
  }
}

void report_error(const RunConfig& cfg, std::string_view code, const std::string& message) {
  json err = {{"error", code}, {"message", message}, {"command", cfg.command}};
  std::cerr << err.dump() << '\n';
  try {
    write_text_file(fs::path(cfg.out) / "error.json", err.dump(1) + "\n");
  } catch (const Error&) {
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenization of oscillating-constraint curve energies"};
  app.require_subcommand(0, 1);
  RunConfig cfg;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; command-line flags win");
  app.add_option("--constraint", cfg.constraint, "catalog id: zero, zero-3d, sin-product, dist-z2, face-network-3d, "
                                                 "dist-z3, sheared-sine");
  app.add_option("--grid", cfg.grid_file, "grid-sampled constraint file (.csv/.txt or binary)");
  app.add_option("--z", cfg.z, "level values (default: scan)");
  app.add_option("--c", cfg.c, "tube half-width");
  app.add_option("--directions", cfg.directions, "direction count (0: 64 in 2D, 200 in 3D)");
  app.add_option("--T", cfg.T, "T schedule (default 10 20 40 80 in 2D, 5 10 20 40 in 3D)");
  app.add_option("--resolution", cfg.resolution, "grid resolution");
  app.add_option("--eps", cfg.eps, "epsilon list");
  app.add_option("--alpha", cfg.alpha, "delta = eps^alpha");
  app.add_option("--w", cfg.w, "direction vector");
  app.add_option("--k", cfg.k, "degenerate family length parameter");
  app.add_option("--profile", cfg.profile, "degenerate shear profile: sawtooth or sine");
  app.add_option("--spec", cfg.spec_file, "rational ball spec JSON");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads (0: logical cores)");
  app.fallthrough();

  const std::vector<std::pair<const char*, const char*>> commands{
      {"levels", "extract and classify level sets"},
      {"psi", "directional psi_hom table"},
      {"ball", "assemble the homogenized metric and its unit ball"},
      {"tube", "psi_T on a tube around a level"},
      {"synth", "rationalize, build and verify a Finsler ball network"},
      {"degenerate", "degenerate sheared family"},
      {"gamma", "Gamma-trend table"},
      {"examples", "run the acceptance suite"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    if (!config_file.empty()) {
      json j;
      try {
        j = json::parse(read_text_file(config_file));
      } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
      }
      if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
      try {
        apply_config(j, cfg, app);
      } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
      }
    }
    if (cfg.command == "levels") return cmd_levels(cfg);
    if (cfg.command == "psi") return cmd_psi(cfg);
    if (cfg.command == "ball") return cmd_ball(cfg);
    if (cfg.command == "tube") return cmd_tube(cfg);
    if (cfg.command == "synth") return cmd_synth(cfg);
    if (cfg.command == "degenerate") return cmd_degenerate(cfg);
    if (cfg.command == "gamma") return cmd_gamma(cfg);
    if (cfg.command == "examples") return cmd_examples(cfg);
    fail(ErrorCode::ConfigError, cfg.command.empty() ? "no command given" : "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    report_error(cfg, to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report_error(cfg, "Internal", e.what());
    return 3;
  }
}
