#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pathlp/pathlp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitRounding = 4;

pathlp::SolveMode parse_mode(const std::string& mode) {
  if (mode == "l2") return pathlp::SolveMode::l2;
  if (mode == "robust") return pathlp::SolveMode::robust;
  if (mode == "fast") return pathlp::SolveMode::fast;
  throw pathlp::PreconditionViolation("unknown mode '" + mode + "'");
}

int run_solve(const std::string& instance_path, const std::string& mode_name,
              double delta, double inner_radius, double outer_radius,
              double eta, bool round_vertex, const std::string& trace_path,
              int ell_star) {
  pathlp::LoadedInstance loaded = pathlp::load_instance(instance_path);

  pathlp::LpParameters params;
  if (loaded.params) params = *loaded.params;
  if (inner_radius > 0.0) params.inner_radius = inner_radius;
  if (outer_radius > 0.0) params.outer_radius = outer_radius;
  if (!(params.inner_radius > 0.0) || !(params.outer_radius > 0.0))
    throw pathlp::PreconditionViolation(
        "inner and outer radius required (file params section or flags)");
  // L is recomputed from c; a supplied value only tightens the check.
  const double supplied_l = params.lipschitz;
  params.lipschitz = pathlp::norm2(loaded.lp.c());
  if (supplied_l > 0.0) {
    if (supplied_l < params.lipschitz * (1.0 - 1e-12))
      throw pathlp::PreconditionViolation("supplied L below ||c||_2");
    params.lipschitz = supplied_l;
  }

  pathlp::SolveConfig config;
  if (ell_star >= 0) config.ell_star = static_cast<std::size_t>(ell_star);

  std::ofstream trace_file;
  std::optional<pathlp::TraceWriter> writer;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file)
      throw pathlp::ParseError("cannot open trace file '" + trace_path + "'");
    writer.emplace(trace_file);
    config.trace = writer->sink();
  }

  pathlp::SolveReport report = pathlp::solve(loaded.lp, params, delta,
                                             parse_mode(mode_name), config);
  if (writer) writer->close();

  std::cout << "mode:            " << pathlp::mode_name(report.mode) << "\n";
  std::cout << "objective:       " << pathlp::format_double(report.objective)
            << "\n";
  std::cout << "gap_certificate: "
            << pathlp::format_double(report.gap_certificate) << "\n";
  std::cout << "iterations:      " << report.iterations << "\n";
  std::cout << "fallbacks:       " << report.fallback_count << "\n";
  std::cout << "wall_time:       " << pathlp::format_double(report.wall_time)
            << "\n";

  pathlp::Vector x = report.x;
  if (round_vertex) {
    if (!(eta > 0.0))
      throw pathlp::PreconditionViolation(
          "--round-to-vertex requires --eta > 0");
    x = pathlp::round_to_vertex(loaded.lp, report.x, eta, delta, params);
    std::cout << "rounded objective: "
              << pathlp::format_double(pathlp::dot(loaded.lp.c(), x)) << "\n";
  }
  std::cout << "x:";
  for (double v : x) std::cout << ' ' << pathlp::format_double(v);
  std::cout << "\n";
  return kExitOk;
}

int run_gen(std::size_t rows, std::size_t cols, std::uint64_t seed,
            const std::string& output) {
  pathlp::GeneratedInstance gen =
      pathlp::make_random_instance(cols, rows, seed);
  pathlp::save_instance(output, gen.lp, gen.params);
  std::cout << "wrote " << output << " (" << rows << " x " << cols
            << ", seed " << seed << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal-dual path-following LP solver"};
  app.require_subcommand(1);

  // solve
  std::string instance_path;
  std::string mode = "l2";
  double delta = 1e-6;
  double inner_radius = 0.0;
  double outer_radius = 0.0;
  double eta = 0.0;
  bool round_vertex = false;
  std::string trace_path;
  int ell_star = -1;

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve a standard-form instance file");
  solve_cmd->add_option("instance", instance_path, "instance file")->required();
  solve_cmd->add_option("--mode", mode, "l2 | robust | fast")
      ->check(CLI::IsMember({"l2", "robust", "fast"}));
  solve_cmd->add_option("--delta", delta, "target accuracy: gap <= delta L R");
  solve_cmd->add_option("--inner-radius", inner_radius,
                        "inner radius r (overrides file params)");
  solve_cmd->add_option("--outer-radius", outer_radius,
                        "outer radius R (overrides file params)");
  solve_cmd->add_option("--eta", eta,
                        "vertex gap in units of L R (expert; enables "
                        "--round-to-vertex)");
  solve_cmd->add_flag("--round-to-vertex", round_vertex,
                      "snap the result to the exact optimal vertex");
  solve_cmd->add_option("--trace", trace_path, "write per-iteration CSV trace");
  solve_cmd->add_option("--ell-star", ell_star,
                        "snapshot exponent for fast mode");

  // gen
  std::size_t gen_rows = 4;
  std::size_t gen_cols = 10;
  std::uint64_t seed = 1;
  std::string gen_output = "instance.lp.txt";

  CLI::App* gen_cmd =
      app.add_subcommand("gen", "generate a random test instance");
  gen_cmd->add_option("--rows", gen_rows, "number of constraints d");
  gen_cmd->add_option("--cols", gen_cols, "number of variables n");
  gen_cmd->add_option("--seed", seed, "RNG seed");
  gen_cmd->add_option("-o,--output", gen_output, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed())
      return run_solve(instance_path, mode, delta, inner_radius, outer_radius,
                       eta, round_vertex, trace_path, ell_star);
    return run_gen(gen_rows, gen_cols, seed, gen_output);
  } catch (const pathlp::RoundingFailure& err) {
    std::cerr << "rounding failure: " << err.what() << "\n";
    return kExitRounding;
  } catch (const pathlp::ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const pathlp::RankDeficient& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const pathlp::InfeasibleInput& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const pathlp::PreconditionViolation& err) {
    std::cerr << "validation error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const pathlp::Error& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  }
}
