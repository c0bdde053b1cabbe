#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "experiments/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Annealing experiments on glued-trees instances. Every command writes CSV "
      "(12-significant-digit floats, '#' comment lines, a '# config:' echo of the "
      "resolved flags) to --out, or stdout when --out is omitted.\n"
      "Exit codes: 0 success, 1 usage error, 2 numerical failure."};
  app.get_formatter()->column_width(28);

  experiments::RunConfig cfg;
  app.add_option("command", cfg.command,
                 "spectrum | evolve | gap-scaling | classical | crosscheck | randomized")
      ->required();
  app.add_option("--n", cfg.n,
                 "tree depth; defaults: spectrum 10, evolve 40, gap-scaling 16 (rows "
                 "6..n), classical 8 (rows 2..n), crosscheck 4, randomized 10");
  app.add_option("--alpha", cfg.alpha,
                 "corner coupling, in (0, 1/2) (the staging analysis assumes "
                 "alpha < 1/2); default 1/sqrt(8) = 0.35355339059327373");
  app.add_option("--seed", cfg.seed, "master seed for instances/walks/runs; default 1");
  app.add_option("--epsilon", cfg.epsilon,
                 "annealing rate parameter; linear total time is n^6/epsilon unless "
                 "--T is given; defaults: randomized 0.4, others 1");
  app.add_option("--kappa", cfg.kappa,
                 "stage half-width parameter, delta = kappa/n^3; default 1");
  app.add_option("--T", cfg.T,
                 "total-time override; defaults: zero-config evolve 10000, "
                 "crosscheck 2000 (both linear)");
  app.add_option("--grid", cfg.grid,
                 "grid size; defaults: spectrum 2001 s-points, evolve 501 samples, "
                 "crosscheck 65 samples");
  app.add_option("--trials", cfg.trials,
                 "runs per configuration; defaults: classical 100 walks per n, "
                 "randomized 200 seeds");
  app.add_option("--max-queries", cfg.max_queries,
                 "oracle-query cap per classical walk; default 1000000");
  app.add_option("--out", cfg.out, "output file path; default stdout");
  app.add_option("--schedule", cfg.schedule,
                 "annealing schedule kind; default linear (randomized defaults to "
                 "gap-adapted)")
      ->check(CLI::IsMember({"linear", "gap-adapted"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file) {
      std::cerr << "usage error: cannot open output file " << cfg.out << "\n";
      return 1;
    }
    os = &file;
  }
  return experiments::run_command(cfg, *os, std::cerr);
}
