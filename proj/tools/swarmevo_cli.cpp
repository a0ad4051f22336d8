// swarmevo command line: evolution, re-test experiments, behaviour analysis,
// replay and exports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swarmevo/harness.hpp"
#include "swarmevo/io.hpp"

namespace fs = std::filesystem;
using namespace swarmevo;

namespace {

struct Common {
  std::string config_path;
  std::string profile = "desk";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "out";
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("-c,--config", c.config_path, "JSON config; missing keys fall back to its profile")
      ->check(CLI::ExistingFile);
  app->add_option("-p,--profile", c.profile, "Base profile when no config is given")
      ->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("-s,--seed", c.seed, "Master seed");
  app->add_option("-w,--workers", c.workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  if (with_out) app->add_option("-o,--out", c.out, "Output directory");
}

harness::ExperimentConfig resolve(const Common& c) {
  auto cfg = c.config_path.empty() ? harness::profile_by_name(c.profile) : harness::load_config(c.config_path);
  if (c.seed) cfg.master_seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  cfg.validate();
  return cfg;
}

void print_table(const std::vector<harness::TableRow>& rows) {
  std::printf("%-10s %-10s %-6s %-8s %-8s %-8s\n", "trained", "tested", "robots", "n", "mean", "std");
  for (const auto& r : rows)
    std::printf("%-10g %-10g %-6zu %-8zu %-8.4f %-8.4f\n", r.controller_arena, r.test_arena, r.swarm_size,
                r.samples, r.mean, r.stddev);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolve and analyse reservoir controllers for gradient-seeking robot swarms"};
  app.require_subcommand(1);

  Common evo_opts;
  auto* evolve = app.add_subcommand("evolve", "Run every repetition x arena evolution");
  add_common(evolve, evo_opts);

  Common flex_opts;
  std::string flex_champions;
  auto* flex = app.add_subcommand("flexibility", "Re-test champions in every arena");
  add_common(flex, flex_opts);
  flex->add_option("--champions", flex_champions, "champions.tsv from evolve")->required()->check(CLI::ExistingFile);

  Common scal_opts;
  std::string scal_champions;
  auto* scal = app.add_subcommand("scalability", "Re-test champions at other swarm sizes");
  add_common(scal, scal_opts);
  scal->add_option("--champions", scal_champions, "champions.tsv from evolve")->required()->check(CLI::ExistingFile);

  Common beh_opts;
  std::string beh_champions, beh_genotype;
  std::optional<double> beh_arena, beh_trained_arena;
  std::optional<std::uint64_t> beh_reservoir, beh_episode_seed;
  auto* beh = app.add_subcommand("behavior", "Record one long episode with trajectories and order");
  add_common(beh, beh_opts);
  auto* champ_opt = beh->add_option("--champions", beh_champions, "champions.tsv from evolve")
                        ->check(CLI::ExistingFile);
  auto* geno_opt = beh->add_option("--genotype", beh_genotype, "18 whitespace-separated genes");
  beh->add_option("--reservoir-seed", beh_reservoir, "Reservoir seed for --genotype")->needs(geno_opt);
  beh->add_option("--trained-arena", beh_trained_arena, "Pick the champion evolved in this arena");
  beh->add_option("--arena", beh_arena, "Arena to run in (default: the controller's own arena)");
  beh->add_option("--episode-seed", beh_episode_seed, "Episode seed (default: derived from the master seed)");
  champ_opt->excludes(geno_opt);

  std::string manifest, replay_out = "replay";
  auto* rep = app.add_subcommand("replay", "Re-run a recorded experiment and compare file hashes");
  rep->add_option("manifest", manifest, "manifest.json of the run")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", replay_out, "Directory for the re-run");

  Common exp_opts;
  std::string what;
  double exp_arena = 10.0;
  std::uint64_t exp_reservoir = 0;
  auto* exp = app.add_subcommand("export", "Write a field map, the resolved config or a reservoir");
  add_common(exp, exp_opts);
  exp->add_option("what", what, "field | config | reservoir")->required()->check(CLI::IsMember({"field", "config", "reservoir"}));
  exp->add_option("--arena", exp_arena, "Arena side for field export")->check(CLI::PositiveNumber);
  exp->add_option("--reservoir-seed", exp_reservoir, "Seed for reservoir export");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) {
      const auto cfg = resolve(evo_opts);
      std::printf("%zu runs, %zu episodes each\n", cfg.repetitions * cfg.arena_sizes.size(),
                  harness::episodes_per_run(cfg));
      const auto result = harness::run_evolution(cfg, evo_opts.out);
      for (const auto& c : result.champions)
        std::printf("arena %g: champion fitness %.4f (rep %zu)\n", c.arena_size, c.fitness, c.repetition);
    } else if (*flex) {
      const auto cfg = resolve(flex_opts);
      const auto champions = harness::read_champions(flex_champions);
      print_table(harness::aggregate(harness::run_flexibility(cfg, champions, flex_opts.out)));
    } else if (*scal) {
      const auto cfg = resolve(scal_opts);
      const auto champions = harness::read_champions(scal_champions);
      print_table(harness::aggregate(harness::run_scalability(cfg, champions, scal_opts.out)));
    } else if (*beh) {
      const auto cfg = resolve(beh_opts);
      harness::Champion champ;
      if (!beh_genotype.empty()) {
        champ.genotype = parse_genotype(beh_genotype);
        champ.reservoir_seed = beh_reservoir.value_or(0);
        champ.arena_size = beh_trained_arena.value_or(cfg.arena_sizes.front());
      } else {
        if (beh_champions.empty()) throw std::invalid_argument("behavior needs --champions or --genotype");
        const auto all = harness::read_champions(beh_champions);
        if (all.empty()) throw std::invalid_argument("no champions in " + beh_champions);
        champ = all.front();
        if (beh_trained_arena) {
          bool found = false;
          for (const auto& c : all)
            if (c.arena_size == *beh_trained_arena) {
              champ = c;
              found = true;
            }
          if (!found) throw std::invalid_argument("no champion for the requested arena");
        }
      }
      const double arena = beh_arena.value_or(champ.arena_size);
      const auto rec = harness::run_behavior_analysis(
          cfg, champ, arena, beh_episode_seed.value_or(harness::behavior_seed(cfg.master_seed)), beh_opts.out);
      std::printf("fitness %.4f over %zu samples\n", rec.fitness, rec.f_trace.size());
    } else if (*rep) {
      const auto report = harness::replay(manifest, replay_out);
      for (const auto& f : report.mismatched) std::printf("MISMATCH %s\n", f.c_str());
      std::printf("%zu files match, %zu differ\n", report.matched.size(), report.mismatched.size());
      return report.ok() ? 0 : 1;
    } else if (*exp) {
      const auto cfg = resolve(exp_opts);
      const fs::path out(exp_opts.out);
      if (what == "config") {
        io::open_output(out / "config.json") << harness::config_to_json(cfg) << '\n';
        std::printf("%s\n", (out / "config.json").string().c_str());
      } else if (what == "field") {
        const auto arena = harness::build_arena(cfg, exp_arena);
        const auto path = out / ("field_" + io::format_double(exp_arena) + ".txt");
        write_field(*arena.field, path);
        std::printf("%s\n", path.string().c_str());
      } else {
        const auto w = ReservoirWeights::generate(exp_reservoir);
        const auto path = out / ("reservoir_" + std::to_string(exp_reservoir) + ".txt");
        auto f = io::open_output(path);
        for (const auto* m : {&w.hidden1, &w.hidden2})
          for (const auto& row : *m) {
            for (std::size_t c = 0; c < row.size(); ++c) f << (c ? " " : "") << io::format_double(row[c]);
            f << '\n';
          }
        std::printf("%s\n", path.string().c_str());
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
