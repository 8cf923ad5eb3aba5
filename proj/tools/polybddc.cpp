// Command-line driver: truncation, solve, scaling and convergence studies.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "polybddc/polybddc.hpp"

namespace {

using namespace polybddc;

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return value;
}

/// "a..b" (inclusive) or "a,b,c".
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    const int a = parse_int(item.substr(0, dots));
    const int b = parse_int(item.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range '" + item + "'");
    for (int i = a; i <= b; ++i) out.push_back(i);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// Mesh size "1/8" or "0.125" to the number of cells per side.
int parse_mesh_size(const std::string& s) {
  double h = 0.0;
  const auto slash = s.find('/');
  try {
    h = slash == std::string::npos ? std::stod(s) : std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad mesh size '" + s + "'");
  }
  if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("mesh size must lie in (0, 1]: '" + s + "'");
  const double n = 1.0 / h;
  if (std::abs(n - std::round(n)) > 1e-9 * n) throw std::invalid_argument("1/h must be an integer: '" + s + "'");
  return static_cast<int>(std::lround(n));
}

/// "1/8..1/64" walks powers of two; comma lists are taken as given.
std::vector<int> parse_h_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_mesh_size(item));
      continue;
    }
    const int a = parse_mesh_size(item.substr(0, dots));
    const int b = parse_mesh_size(item.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty range '" + item + "'");
    for (int n = a; n <= b; n *= 2) out.push_back(n);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

int square_side(int np) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(np))));
  if (np < 1 || side * side != np) throw std::invalid_argument("N_p must be a perfect square, got " + std::to_string(np));
  return side;
}

void check_degrees(const std::vector<int>& ks) {
  for (int k : ks) {
    if (k < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  }
}

void check_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tolerance must lie in (0, 1)");
}

void emit_csv(const std::string& path, const std::vector<StudyRow>& rows) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, rows);
  } else {
    write_csv(path, rows);
  }
}

/// Reads flat key=value lines ('#' starts a comment) into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
  std::ifstream file(path);
  if (!file) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "command") {
      command = value;
      continue;
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

/// Splices config-file tokens in front of the command-line flags so that
/// flags given on the command line win.
std::vector<std::string> expand_arguments(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file name");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;
  std::string command;
  const std::vector<std::string> from_file = config_tokens(config_path, command);
  std::vector<std::string> out;
  std::size_t start = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) {
    out.push_back(rest[0]);
    start = 1;
  } else if (!command.empty()) {
    out.push_back(command);
  }
  out.insert(out.end(), from_file.begin(), from_file.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(start), rest.end());
  return out;
}

struct RunConfig {
  std::string gamma = "top";
  std::string h_arg;
  std::string n_arg;
  std::string k_arg = "1";
  std::string method = "hho";
  std::string mesh = "simplicial";
  std::string np_arg = "4";
  std::string hh_arg = "8";
  double tolerance = 1e-8;
  int max_iterations = 500;
  std::string out;
  std::string vtk = "solution.vtk";
};

std::vector<int> mesh_list(const RunConfig& cfg, const std::string& fallback) {
  if (!cfg.n_arg.empty()) return parse_int_list(cfg.n_arg);
  return parse_h_list(cfg.h_arg.empty() ? fallback : cfg.h_arg);
}

int run_truncation(const RunConfig& cfg) {
  const unsigned sides = gamma_from_string(cfg.gamma);
  const std::vector<int> ns = mesh_list(cfg, "1/8..1/64");
  const std::vector<int> ks = parse_int_list(cfg.k_arg);
  check_degrees(ks);
  emit_csv(cfg.out, truncation_study(ns, ks, sides).rows);
  return 0;
}

int run_solve(const RunConfig& cfg) {
  const Method method = method_from_string(cfg.method);
  const MeshFamily family = mesh_family_from_string(cfg.mesh);
  const std::vector<int> ns = mesh_list(cfg, "1/16");
  const std::vector<int> ks = parse_int_list(cfg.k_arg);
  const std::vector<int> nps = parse_int_list(cfg.np_arg);
  if (ns.size() != 1 || ks.size() != 1 || nps.size() != 1) {
    throw std::invalid_argument("solve takes a single mesh size, degree and N_p");
  }
  check_degrees(ks);
  check_tolerance(cfg.tolerance);
  const int side = square_side(nps[0]);
  const PolytopalMesh mesh = build_mesh(family, ns[0], ns[0]);
  const CoarsePartition partition = agglomerate(mesh, side, side);
  const FgmresOptions options{cfg.tolerance, cfg.max_iterations};
  const PoissonSolve result = solve_poisson(mesh, MethodConfig(method, ks[0]), partition, options);

  std::cout << "iterations " << result.iterations << '\n'
            << "converged " << (result.converged ? "yes" : "no") << '\n'
            << "kappa " << result.kappa << '\n'
            << "error_l2 " << result.error_l2 << '\n'
            << "error_energy " << result.error_energy << '\n';
  if (!cfg.vtk.empty()) {
    std::vector<double> subdomain(partition.subdomain_of_cell().begin(), partition.subdomain_of_cell().end());
    write_vtk(cfg.vtk, mesh, {{"u", result.cell_means, false}, {"subdomain", subdomain, true}});
  }
  if (!cfg.out.empty()) {
    StudyRow row;
    row.family = to_string(family);
    row.h = 1.0 / ns[0];
    row.k = ks[0];
    row.method = to_string(method);
    row.np = nps[0];
    row.iterations = result.iterations;
    row.kappa = result.kappa;
    row.error_l2 = result.error_l2;
    emit_csv(cfg.out, {row});
  }
  if (!result.converged) {
    std::cerr << "FGMRES did not reach the tolerance within " << cfg.max_iterations << " iterations\n";
    return kExitSolver;
  }
  return 0;
}

int run_scaling(const RunConfig& cfg) {
  ScalingOptions options;
  options.method = method_from_string(cfg.method);
  options.family = mesh_family_from_string(cfg.mesh);
  options.h_ratios = parse_int_list(cfg.hh_arg);
  options.degrees = parse_int_list(cfg.k_arg);
  check_degrees(options.degrees);
  check_tolerance(cfg.tolerance);
  options.np_sides.clear();
  for (int np : parse_int_list(cfg.np_arg)) options.np_sides.push_back(square_side(np));
  options.solver = FgmresOptions{cfg.tolerance, cfg.max_iterations};
  emit_csv(cfg.out, scaling_study(options).rows);
  return 0;
}

int run_convergence(const RunConfig& cfg) {
  const Method method = method_from_string(cfg.method);
  const MeshFamily family = mesh_family_from_string(cfg.mesh);
  const std::vector<int> ns = mesh_list(cfg, "1/8..1/64");
  const std::vector<int> ks = parse_int_list(cfg.k_arg);
  check_degrees(ks);
  std::vector<StudyRow> rows;
  for (int k : ks) {
    for (StudyRow& row : convergence_study(method, family, k, ns).rows) rows.push_back(std::move(row));
  }
  emit_csv(cfg.out, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeletal discretisations of the Poisson problem with BDDC preconditioning"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config();  // disable CLI11's own config handling; --config is handled before parsing
  app.footer("Any subcommand accepts --config FILE with key=value lines; command-line flags override it.");

  RunConfig cfg;
  auto add_output = [&](CLI::App* sub) { sub->add_option("--out", cfg.out, "CSV output path (default: stdout)"); };
  // "--h" is a mesh-size option, so help is only reachable as --help
  auto add_command = [&](const char* name, const char* description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->set_help_flag("--help", "Print this help message and exit");
    return sub;
  };

  CLI::App* truncation = add_command("truncation", "Largest eigenvalue of the truncated H^1/2 pencil");
  truncation->add_option("--gamma", cfg.gamma, "top, top_right, all or sides joined by '+'");
  truncation->add_option("--h", cfg.h_arg, "mesh sizes, e.g. 1/8..1/64");
  truncation->add_option("--n", cfg.n_arg, "cells per side, e.g. 8,16,32");
  truncation->add_option("--k", cfg.k_arg, "degrees, e.g. 0..3");
  add_output(truncation);

  CLI::App* solve = add_command("solve", "Single FGMRES + BDDC solve of the manufactured problem");
  solve->add_option("--method", cfg.method, "hdg, hdg_plus, hho or hho_mixed");
  solve->add_option("--mesh", cfg.mesh, "cartesian, simplicial or voronoi");
  solve->add_option("--n", cfg.n_arg, "cells per side");
  solve->add_option("--h", cfg.h_arg, "mesh size, e.g. 1/16");
  solve->add_option("--k", cfg.k_arg, "face degree");
  solve->add_option("--np", cfg.np_arg, "number of subdomains (a perfect square)");
  solve->add_option("--tol", cfg.tolerance, "relative residual tolerance");
  solve->add_option("--max-iter", cfg.max_iterations, "iteration limit");
  solve->add_option("--vtk", cfg.vtk, "VTK output path (empty to skip)");
  add_output(solve);

  CLI::App* scaling = add_command("scaling", "Weak-scaling study at fixed H/h");
  scaling->add_option("--method", cfg.method, "hdg, hdg_plus, hho or hho_mixed");
  scaling->add_option("--mesh", cfg.mesh, "cartesian, simplicial or voronoi");
  scaling->add_option("--hh", cfg.hh_arg, "H/h values, e.g. 8 or 4,8,16");
  scaling->add_option("--np", cfg.np_arg, "subdomain counts, e.g. 4,16,64");
  scaling->add_option("--k", cfg.k_arg, "degrees, e.g. 0..2");
  scaling->add_option("--tol", cfg.tolerance, "relative residual tolerance");
  scaling->add_option("--max-iter", cfg.max_iterations, "iteration limit");
  add_output(scaling);

  CLI::App* convergence = add_command("convergence", "Refinement study with a direct solver");
  convergence->add_option("--method", cfg.method, "hdg, hdg_plus, hho or hho_mixed");
  convergence->add_option("--mesh", cfg.mesh, "cartesian, simplicial or voronoi");
  convergence->add_option("--h", cfg.h_arg, "mesh sizes, e.g. 1/8..1/64");
  convergence->add_option("--n", cfg.n_arg, "cells per side, e.g. 8,16,32");
  convergence->add_option("--k", cfg.k_arg, "degrees, e.g. 0..2");
  add_output(convergence);

  std::vector<std::string> args;
  try {
    args = expand_arguments(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (truncation->parsed()) return run_truncation(cfg);
    if (solve->parsed()) return run_solve(cfg);
    if (scaling->parsed()) return run_scaling(cfg);
    return run_convergence(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}
