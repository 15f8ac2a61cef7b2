#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gmaxent/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generalized maximum-entropy inference over state spaces"};
  app.require_subcommand(1);

  gmaxent::CommandOptions options;
  double tolerance = 0.0;
  int max_iter = 0;
  std::uint64_t seed = 0;
  std::string output;
  app.add_option("--tolerance", tolerance, "Gradient tolerance and Frank-Wolfe gap");
  app.add_option("--max-iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed recorded in the solver section");
  app.add_option("--output", output, "Write the report to this file");
  app.add_option("--resolution", options.resolution, "Oracle grid step")->check(CLI::PositiveNumber);
  app.add_flag("--compare", options.compare, "Also run the solver and report the entropy delta");

  std::string path;
  auto* validate = app.add_subcommand("validate", "Validate the model, observables, effects and generators");
  validate->add_option("file", path, "Problem file")->required();
  auto* solve = app.add_subcommand("solve", "Solve the MaxEnt problem");
  solve->add_option("file", path, "Problem file")->required();
  auto* oracle = app.add_subcommand("oracle", "Brute-force grid oracle");
  oracle->add_option("file", path, "Problem file")->required();

  std::string op;
  std::string second;
  auto* lattice = app.add_subcommand("lattice", "Region meet, join or inclusion");
  lattice->add_option("op", op, "meet | join | leq")->required()->check(CLI::IsMember({"meet", "join", "leq"}));
  lattice->add_option("a", path, "First region file")->required();
  lattice->add_option("b", second, "Second region file")->required();

  for (auto* sub : {validate, solve, oracle, lattice}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (app.count("--tolerance") > 0) options.tolerance = tolerance;
  if (app.count("--max-iter") > 0) options.max_iterations = max_iter;
  if (app.count("--seed") > 0) options.seed = seed;
  if (!output.empty()) options.output = output;

  if (*validate) return gmaxent::cmd_validate(path, std::cout, std::cerr, options);
  if (*solve) return gmaxent::cmd_solve(path, std::cout, std::cerr, options);
  if (*oracle) return gmaxent::cmd_oracle(path, std::cout, std::cerr, options);
  const auto lattice_op = op == "meet" ? gmaxent::LatticeOp::Meet
                          : op == "join" ? gmaxent::LatticeOp::Join
                                         : gmaxent::LatticeOp::Leq;
  return gmaxent::cmd_lattice(lattice_op, path, second, std::cout, std::cerr, options);
}
