#include "swarmevo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "swarmevo/io.hpp"

namespace swarmevo::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::uint64_t arena_tag(double size_m) { return static_cast<std::uint64_t>(std::llround(size_m * 1000.0)); }

std::string arena_label(double size_m) {
  std::ostringstream ss;
  ss << "arena_" << io::format_double(size_m);
  return ss.str();
}

std::string rep_label(std::size_t rep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rep_%03zu", rep);
  return buf;
}

std::string_view to_string(FieldProfile p) { return p == FieldProfile::gaussian ? "gaussian" : "radial"; }

FieldProfile parse_field_profile(const std::string& s) {
  if (s == "radial") return FieldProfile::radial;
  if (s == "gaussian") return FieldProfile::gaussian;
  throw std::invalid_argument("unknown field profile '" + s + "'");
}

std::string_view to_string(NeighborMode m) {
  return m == NeighborMode::in_range ? "in_range" : "quadrant_nearest";
}

NeighborMode parse_neighbor_mode(const std::string& s) {
  if (s == "quadrant_nearest") return NeighborMode::quadrant_nearest;
  if (s == "in_range") return NeighborMode::in_range;
  throw std::invalid_argument("unknown neighbour mode '" + s + "'");
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["master_seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["arena_sizes"] = c.arena_sizes;
  j["swarm_size"] = c.swarm_size;
  j["repetitions"] = c.repetitions;
  j["test_repetitions"] = c.test_repetitions;
  j["scalability_sizes"] = c.scalability_sizes;
  j["snapshot_times"] = c.snapshot_times;
  j["de"] = {{"population_size", c.de.population_size},
             {"generations", c.de.generations},
             {"f_scale", c.de.f_scale},
             {"crossover_rate", c.de.crossover_rate},
             {"eval_repeats", c.de.eval_repeats}};
  j["sim"] = {{"dt", c.sim.dt},
              {"control_period", c.sim.control_period},
              {"episode_length", c.sim.episode_length},
              {"sensor_range", c.sim.sensor_range},
              {"max_wheel", c.sim.max_wheel},
              {"body_radius", c.sim.body.body_radius},
              {"axle_length", c.sim.body.axle_length},
              {"order_neighbors", std::string(to_string(c.sim.order_neighbors))},
              {"collision_iterations", c.sim.collision_iterations}};
  j["controller"] = {{"hidden_activation", std::string(to_string(c.controller.hidden))},
                     {"output_activation", "tanh"},
                     {"velocity_mapping", std::string(to_string(c.controller.velocity))}};
  j["field"] = {{"cell_size_m", c.field.cell_size_m},
                {"g_max", c.field.g_max},
                {"profile", std::string(to_string(c.field.profile))},
                {"sigma_frac", c.field.sigma_frac}};
  j["spawn"] = {{"ring_radius_frac", c.spawn.ring_radius_frac},
                {"ring_radius_m", c.spawn.ring_radius_m ? json(*c.spawn.ring_radius_m) : json(nullptr)},
                {"box_side_m", c.spawn.box_side_m}};
  return j;
}

template <class T>
void read_if(const json& j, const char* key, T& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

ExperimentConfig config_from(const json& j) {
  ExperimentConfig c = profile_by_name(j.value("profile", std::string("desk")));
  read_if(j, "master_seed", c.master_seed);
  read_if(j, "workers", c.workers);
  read_if(j, "arena_sizes", c.arena_sizes);
  read_if(j, "swarm_size", c.swarm_size);
  read_if(j, "repetitions", c.repetitions);
  read_if(j, "test_repetitions", c.test_repetitions);
  read_if(j, "scalability_sizes", c.scalability_sizes);
  read_if(j, "snapshot_times", c.snapshot_times);
  if (j.contains("de")) {
    const auto& d = j.at("de");
    read_if(d, "population_size", c.de.population_size);
    read_if(d, "generations", c.de.generations);
    read_if(d, "f_scale", c.de.f_scale);
    read_if(d, "crossover_rate", c.de.crossover_rate);
    read_if(d, "eval_repeats", c.de.eval_repeats);
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    read_if(s, "dt", c.sim.dt);
    read_if(s, "control_period", c.sim.control_period);
    read_if(s, "episode_length", c.sim.episode_length);
    read_if(s, "sensor_range", c.sim.sensor_range);
    read_if(s, "max_wheel", c.sim.max_wheel);
    read_if(s, "body_radius", c.sim.body.body_radius);
    read_if(s, "axle_length", c.sim.body.axle_length);
    read_if(s, "collision_iterations", c.sim.collision_iterations);
    if (s.contains("order_neighbors"))
      c.sim.order_neighbors = parse_neighbor_mode(s.at("order_neighbors").get<std::string>());
  }
  if (j.contains("controller")) {
    const auto& k = j.at("controller");
    if (k.contains("hidden_activation"))
      c.controller.hidden = parse_activation(k.at("hidden_activation").get<std::string>());
    if (k.contains("velocity_mapping"))
      c.controller.velocity =
          parse_velocity_mapping(k.at("velocity_mapping").get<std::string>());
    if (k.value("output_activation", std::string("tanh")) != "tanh")
      throw std::invalid_argument("only tanh output activation is supported");
  }
  if (j.contains("field")) {
    const auto& f = j.at("field");
    read_if(f, "cell_size_m", c.field.cell_size_m);
    read_if(f, "g_max", c.field.g_max);
    read_if(f, "sigma_frac", c.field.sigma_frac);
    if (f.contains("profile")) c.field.profile = parse_field_profile(f.at("profile").get<std::string>());
  }
  if (j.contains("spawn")) {
    const auto& s = j.at("spawn");
    read_if(s, "ring_radius_frac", c.spawn.ring_radius_frac);
    read_if(s, "box_side_m", c.spawn.box_side_m);
    if (s.contains("ring_radius_m") && !s.at("ring_radius_m").is_null())
      c.spawn.ring_radius_m = s.at("ring_radius_m").get<double>();
  }
  c.validate();
  return c;
}

std::vector<std::string> inventory_paths(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "manifest.json") continue;
    out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_manifest(const fs::path& dir, const std::string& kind, const ExperimentConfig& config,
                    const json& extra, const std::string& status) {
  json m;
  m["artifact_version"] = kArtifactVersion;
  m["kind"] = kind;
  m["status"] = status;
  m["config"] = config_json(config);
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  json files = json::array();
  for (const auto& rel : inventory_paths(dir))
    files.push_back({{"path", rel}, {"sha256", io::sha256_file(dir / rel)}});
  m["files"] = files;
  auto out = io::open_output(dir / "manifest.json");
  out << m.dump(2) << '\n';
}

// Runs `body`; on failure writes a partial manifest before rethrowing.
template <class Body>
auto with_manifest(const fs::path& dir, const std::string& kind, const ExperimentConfig& config,
                   json& extra, Body body) {
  fs::create_directories(dir);
  try {
    auto result = body();
    write_manifest(dir, kind, config, extra, "complete");
    return result;
  } catch (const std::exception& e) {
    extra["error"] = e.what();
    try {
      write_manifest(dir, kind, config, extra, "partial");
    } catch (...) {
    }
    throw;
  }
}

std::string genotype_columns(const Genotype& g) { return io::join(g.genes(), '\t'); }

std::string genotype_header() {
  std::string h;
  for (std::size_t i = 0; i < kGenes; ++i) h += (i ? "\tg" : "g") + std::to_string(i);
  return h;
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double std_of(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

json champion_json(const Champion& c) {
  return {{"arena_size", c.arena_size},
          {"reservoir_seed", c.reservoir_seed},
          {"fitness", c.fitness},
          {"repetition", c.repetition},
          {"genotype", format_genotype(c.genotype)}};
}

Champion champion_from_json(const json& j) {
  Champion c;
  c.arena_size = j.at("arena_size").get<double>();
  c.reservoir_seed = j.at("reservoir_seed").get<std::uint64_t>();
  c.fitness = j.at("fitness").get<double>();
  c.repetition = j.at("repetition").get<std::size_t>();
  c.genotype = parse_genotype(j.at("genotype").get<std::string>());
  return c;
}

void write_retest_rows(std::span<const RetestRow> rows, const fs::path& path) {
  auto out = io::open_output(path);
  out << "controller_arena\ttest_arena\tswarm_size\trep\tseed\tring_radius_m\tbox_side_m\t"
      << summary_header() << "\terror\n";
  for (const auto& r : rows) {
    out << io::format_double(r.controller_arena) << '\t' << io::format_double(r.test_arena) << '\t'
        << r.swarm_size << '\t' << r.repetition << '\t' << r.seed << '\t'
        << io::format_double(r.ring_radius_m) << '\t' << io::format_double(r.box_side_m) << '\t'
        << summary_fields(r.outcome.summary) << '\t' << (r.outcome.error ? *r.outcome.error : "-")
        << '\n';
  }
}

void write_table(std::span<const TableRow> rows, const fs::path& path) {
  auto out = io::open_output(path);
  out << "controller_arena\ttest_arena\tswarm_size\tsamples\tmean\tstd\tmedian\tmin\tmax\n";
  for (const auto& r : rows) {
    out << io::format_double(r.controller_arena) << '\t' << io::format_double(r.test_arena) << '\t'
        << r.swarm_size << '\t' << r.samples << '\t' << io::format_double(r.mean) << '\t'
        << io::format_double(r.stddev) << '\t' << io::format_double(r.median) << '\t'
        << io::format_double(r.min) << '\t' << io::format_double(r.max) << '\n';
  }
}

struct ArenaCache {
  std::map<double, Arena> arenas;
  const Arena& get(const ExperimentConfig& config, double size) {
    auto it = arenas.find(size);
    if (it == arenas.end()) it = arenas.emplace(size, build_arena(config, size)).first;
    return it->second;
  }
};

std::vector<RetestRow> run_retests(const ExperimentConfig& config, std::vector<RetestRow> rows,
                                   std::span<const Champion> champions,
                                   std::span<const std::size_t> champion_of_row) {
  ArenaCache cache;
  for (const auto& r : rows) cache.get(config, r.test_arena);
  std::map<std::uint64_t, std::shared_ptr<const ReservoirWeights>> reservoirs;
  for (const auto& c : champions)
    if (!reservoirs.count(c.reservoir_seed))
      reservoirs[c.reservoir_seed] =
          std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(c.reservoir_seed));

  std::vector<EpisodeJob> jobs;
  jobs.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Champion& c = champions[champion_of_row[i]];
    const Arena& arena = cache.get(config, rows[i].test_arena);
    const SpawnSpec spawn = build_spawn(config, arena, rows[i].swarm_size, rows[i].box_side_m);
    rows[i].ring_radius_m = spawn.ring_radius_m;
    jobs.push_back({&arena, spawn, Controller(reservoirs.at(c.reservoir_seed), c.genotype, config.controller),
                    config.sim, rows[i].seed});
  }
  const auto outcomes = run_episodes_parallel(jobs, config.workers);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].outcome = outcomes[i];
  return rows;
}

void require_champions(std::span<const Champion> champions) {
  if (champions.empty()) throw std::invalid_argument("no champion genotypes given");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (arena_sizes.empty()) throw std::invalid_argument("at least one arena size required");
  for (double s : arena_sizes)
    if (!(s > 0.0)) throw std::invalid_argument("arena sizes must be positive");
  if (swarm_size < 1) throw std::invalid_argument("swarm_size must be >= 1");
  if (repetitions < 1 || test_repetitions < 1)
    throw std::invalid_argument("repetitions must be >= 1");
  for (auto n : scalability_sizes)
    if (n < 1) throw std::invalid_argument("scalability sizes must be >= 1");
  if (!(spawn.box_side_m > 0.0)) throw std::invalid_argument("spawn box side must be positive");
  if (!(spawn.ring_radius_frac >= 0.0)) throw std::invalid_argument("ring radius fraction must be >= 0");
  de.validate();
  sim.validate();
}

ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.profile = "desk";
  c.swarm_size = 5;
  c.repetitions = 5;
  c.test_repetitions = 30;
  c.de.population_size = 10;
  c.de.generations = 20;
  c.sim.episode_length = 120.0;
  return c;
}

ExperimentConfig paper_profile() {
  ExperimentConfig c;
  c.profile = "paper";
  c.swarm_size = 14;
  c.repetitions = 30;
  c.test_repetitions = 30;
  c.de.population_size = 25;
  c.de.generations = 100;
  c.sim.episode_length = 600.0;
  return c;
}

ExperimentConfig profile_by_name(const std::string& name) {
  if (name == "desk") return desk_profile();
  if (name == "paper") return paper_profile();
  throw std::invalid_argument("unknown profile '" + name + "' (desk, paper)");
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentConfig config_from_json(const std::string& text) { return config_from(json::parse(text)); }

ExperimentConfig load_config(const fs::path& path) { return config_from_json(io::read_text(path)); }

RepetitionSeeds repetition_seeds(std::uint64_t master, double arena_size, std::size_t rep) {
  RepetitionSeeds s;
  s.repetition =
      derive_seed(derive_seed(derive_seed(master, label_tag("evolve")), arena_tag(arena_size)), rep);
  s.reservoir = derive_seed(s.repetition, label_tag("reservoir"));
  s.run = derive_seed(s.repetition, label_tag("de"));
  return s;
}

std::uint64_t retest_seed(std::uint64_t master, double controller_arena, double test_arena,
                          std::size_t swarm_size, std::size_t rep) {
  std::uint64_t s = derive_seed(master, label_tag("retest"));
  s = derive_seed(s, arena_tag(controller_arena));
  s = derive_seed(s, arena_tag(test_arena));
  s = derive_seed(s, swarm_size);
  return derive_seed(s, rep);
}

std::uint64_t behavior_seed(std::uint64_t master) { return derive_seed(master, label_tag("behavior")); }

Arena build_arena(const ExperimentConfig& config, double size_m) {
  return make_arena(size_m, config.field.cell_size_m, config.field.g_max, config.field.profile,
                    config.field.sigma_frac);
}

SpawnSpec build_spawn(const ExperimentConfig& config, const Arena& arena, std::size_t n_robots,
                      double box_side_m) {
  const double wanted = config.spawn.ring_radius_m.value_or(config.spawn.ring_radius_frac * arena.size_m);
  const double half_free = arena.size_m / 2.0 - config.sim.body.body_radius;
  if (!(half_free > 0.0))
    throw std::invalid_argument("arena " + io::format_double(arena.size_m) + " cannot hold a robot");
  // Largest box that still fits centred, kept a hair inside the bound.
  const double box = std::min(box_side_m, std::sqrt(2.0) * half_free * (1.0 - 1e-12));
  const double limit = std::max(0.0, max_ring_radius(arena, box, config.sim.body.body_radius));
  SpawnSpec spec;
  spec.ring_radius_m = std::min(wanted, limit);
  spec.box_side_m = box;
  spec.n_robots = n_robots;
  return spec;
}

double scaled_box_side(const ExperimentConfig& config, std::size_t n_robots) {
  return config.spawn.box_side_m *
         std::sqrt(static_cast<double>(n_robots) / static_cast<double>(config.swarm_size));
}

std::size_t episodes_per_run(const ExperimentConfig& config) { return config.de.episodes_per_run(); }

de::BatchEvaluator make_episode_evaluator(const Arena& arena, const SpawnSpec& spawn,
                                          const SimConfig& sim,
                                          std::shared_ptr<const ReservoirWeights> reservoir,
                                          ControllerOptions options, int workers) {
  return [&arena, spawn, sim, reservoir, options, workers](std::span<const de::EvalRequest> requests) {
    std::vector<EpisodeJob> jobs;
    jobs.reserve(requests.size());
    for (const auto& r : requests)
      jobs.push_back({&arena, spawn, Controller(reservoir, r.genotype, options), sim, r.seed});
    const auto outcomes = run_episodes_parallel(jobs, workers);
    std::vector<de::EvalResult> results(outcomes.size());
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      results[i] = {outcomes[i].summary.fitness, outcomes[i].error};
    return results;
  };
}

void write_champions(std::span<const Champion> champions, const fs::path& path) {
  auto out = io::open_output(path);
  out << "arena\treservoir_seed\tfitness\trep\t" << genotype_header() << '\n';
  for (const auto& c : champions)
    out << io::format_double(c.arena_size) << '\t' << c.reservoir_seed << '\t'
        << io::format_double(c.fitness) << '\t' << c.repetition << '\t'
        << genotype_columns(c.genotype) << '\n';
}

std::vector<Champion> read_champions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open champions file " + path.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<Champion> out;
  while (std::getline(in, line)) {
    const auto f = io::split_fields(line);
    if (f.empty()) continue;
    if (f.size() != 4 + kGenes)
      throw std::invalid_argument("champion row needs " + std::to_string(4 + kGenes) + " columns");
    Champion c;
    c.arena_size = io::parse_double(f[0]);
    c.reservoir_seed = io::parse_u64(f[1]);
    c.fitness = io::parse_double(f[2]);
    c.repetition = static_cast<std::size_t>(io::parse_u64(f[3]));
    std::vector<double> genes;
    for (std::size_t i = 0; i < kGenes; ++i) genes.push_back(io::parse_double(f[4 + i]));
    c.genotype = Genotype::from(genes);
    out.push_back(c);
  }
  return out;
}

EvolutionResult run_evolution(const ExperimentConfig& config, const fs::path& out_dir) {
  config.validate();
  json extra;
  extra["episodes_per_run"] = episodes_per_run(config);
  extra["runs"] = json::array();
  return with_manifest(out_dir, "evolve", config, extra, [&] {
    EvolutionResult result;
    for (double size : config.arena_sizes) {
      const Arena arena = build_arena(config, size);
      const SpawnSpec spawn = build_spawn(config, arena, config.swarm_size, config.spawn.box_side_m);
      for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
        EvolutionRun run;
        run.arena_size = size;
        run.repetition = rep;
        run.seeds = repetition_seeds(config.master_seed, size, rep);
        const fs::path dir = out_dir / arena_label(size) / rep_label(rep);
        extra["runs"].push_back({{"arena_size", size},
                                 {"repetition", rep},
                                 {"repetition_seed", run.seeds.repetition},
                                 {"reservoir_seed", run.seeds.reservoir},
                                 {"run_seed", run.seeds.run},
                                 {"ring_radius_m", spawn.ring_radius_m},
                                 {"box_side_m", spawn.box_side_m},
                                 {"dir", fs::path(arena_label(size)) / rep_label(rep)}});

        auto reservoir = std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(run.seeds.reservoir));
        auto log_out = io::open_output(dir / "generations.tsv");
        log_out << "generation\tbest\tmean\tstd\tfailures\t" << genotype_header() << "\tseeds\n";
        auto events = io::open_output(dir / "events.log");
        const auto on_gen = [&](const de::GenerationLog& g, std::span<const de::Individual>) {
          std::string seeds;
          for (std::size_t i = 0; i < g.seeds.size(); ++i)
            seeds += (i ? "," : "") + std::to_string(g.seeds[i]);
          log_out << g.generation << '\t' << io::format_double(g.best) << '\t'
                  << io::format_double(g.mean) << '\t' << io::format_double(g.stddev) << '\t'
                  << g.failures.size() << '\t' << genotype_columns(g.best_genotype) << '\t' << seeds
                  << '\n';
          for (const auto& f : g.failures) events << "generation " << g.generation << ": " << f << '\n';
          log_out.flush();
          if (!log_out) throw std::runtime_error("failed writing " + (dir / "generations.tsv").string());
        };
        run.logs = de::evolve(config.de, run.seeds.run,
                              make_episode_evaluator(arena, spawn, config.sim, reservoir,
                                                     config.controller, config.workers),
                              on_gen);
        auto best_out = io::open_output(dir / "best_genotype.txt");
        best_out << format_genotype(run.logs.back().best_genotype) << '\n';
        result.runs.push_back(std::move(run));
      }
    }

    // Fitness curve table and champions, per arena.
    auto curves = io::open_output(out_dir / "fitness_curves.tsv");
    curves << "arena\tgeneration\truns\tmean_best\tstd_best\tmax_best\tmean_population_mean\n";
    for (double size : config.arena_sizes) {
      std::vector<const EvolutionRun*> runs;
      for (const auto& r : result.runs)
        if (r.arena_size == size) runs.push_back(&r);
      for (std::size_t g = 0; g < config.de.generations; ++g) {
        std::vector<double> best, mean;
        for (const auto* r : runs) {
          best.push_back(r->logs[g].best);
          mean.push_back(r->logs[g].mean);
        }
        curves << io::format_double(size) << '\t' << g << '\t' << runs.size() << '\t'
               << io::format_double(mean_of(best)) << '\t' << io::format_double(std_of(best)) << '\t'
               << io::format_double(*std::max_element(best.begin(), best.end())) << '\t'
               << io::format_double(mean_of(mean)) << '\n';
      }
      const EvolutionRun* top = runs.front();
      for (const auto* r : runs)
        if (r->logs.back().best > top->logs.back().best) top = r;
      result.champions.push_back({size, top->seeds.reservoir, top->logs.back().best,
                                  top->repetition, top->logs.back().best_genotype});
    }
    curves.close();
    write_champions(result.champions, out_dir / "champions.tsv");
    return result;
  });
}

std::vector<RetestRow> run_flexibility(const ExperimentConfig& config,
                                       std::span<const Champion> champions, const fs::path& out_dir) {
  config.validate();
  require_champions(champions);
  json extra;
  extra["champions"] = json::array();
  for (const auto& c : champions) extra["champions"].push_back(champion_json(c));
  return with_manifest(out_dir, "flexibility", config, extra, [&] {
    std::vector<RetestRow> rows;
    std::vector<std::size_t> owner;
    for (std::size_t ci = 0; ci < champions.size(); ++ci)
      for (double test : config.arena_sizes)
        for (std::size_t rep = 0; rep < config.test_repetitions; ++rep) {
          RetestRow r;
          r.controller_arena = champions[ci].arena_size;
          r.test_arena = test;
          r.swarm_size = config.swarm_size;
          r.repetition = rep;
          r.box_side_m = config.spawn.box_side_m;
          r.seed = retest_seed(config.master_seed, r.controller_arena, test, r.swarm_size, rep);
          rows.push_back(r);
          owner.push_back(ci);
        }
    rows = run_retests(config, std::move(rows), champions, owner);
    write_retest_rows(rows, out_dir / "flexibility.tsv");
    write_table(aggregate(rows), out_dir / "flexibility_table.tsv");
    return rows;
  });
}

std::vector<RetestRow> run_scalability(const ExperimentConfig& config,
                                       std::span<const Champion> champions, const fs::path& out_dir) {
  config.validate();
  require_champions(champions);
  json extra;
  extra["champions"] = json::array();
  for (const auto& c : champions) extra["champions"].push_back(champion_json(c));
  return with_manifest(out_dir, "scalability", config, extra, [&] {
    std::vector<RetestRow> rows;
    std::vector<std::size_t> owner;
    for (std::size_t ci = 0; ci < champions.size(); ++ci)
      for (std::size_t n : config.scalability_sizes)
        for (std::size_t rep = 0; rep < config.test_repetitions; ++rep) {
          RetestRow r;
          r.controller_arena = champions[ci].arena_size;
          r.test_arena = champions[ci].arena_size;
          r.swarm_size = n;
          r.repetition = rep;
          r.box_side_m = scaled_box_side(config, n);
          r.seed = retest_seed(config.master_seed, r.controller_arena, r.test_arena, n, rep);
          rows.push_back(r);
          owner.push_back(ci);
        }
    rows = run_retests(config, std::move(rows), champions, owner);
    write_retest_rows(rows, out_dir / "scalability.tsv");
    write_table(aggregate(rows), out_dir / "scalability_table.tsv");
    return rows;
  });
}

std::vector<TableRow> aggregate(std::span<const RetestRow> rows) {
  std::map<std::tuple<double, double, std::size_t>, std::vector<double>> groups;
  std::vector<std::tuple<double, double, std::size_t>> order;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.controller_arena, r.test_arena, r.swarm_size);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r.outcome.summary.fitness);
  }
  std::vector<TableRow> out;
  for (const auto& key : order) {
    const auto& xs = groups.at(key);
    TableRow t;
    std::tie(t.controller_arena, t.test_arena, t.swarm_size) = key;
    t.samples = xs.size();
    t.mean = mean_of(xs);
    t.stddev = std_of(xs);
    t.median = median_of(xs);
    t.min = *std::min_element(xs.begin(), xs.end());
    t.max = *std::max_element(xs.begin(), xs.end());
    out.push_back(t);
  }
  return out;
}

EvalRecord run_behavior_analysis(const ExperimentConfig& config, const Champion& champion,
                                 double arena_size, std::uint64_t episode_seed,
                                 const fs::path& out_dir) {
  config.validate();
  json extra;
  extra["champion"] = champion_json(champion);
  extra["arena_size"] = arena_size;
  extra["episode_seed"] = episode_seed;
  return with_manifest(out_dir, "behavior", config, extra, [&] {
    const Arena arena = build_arena(config, arena_size);
    const SpawnSpec spawn = build_spawn(config, arena, config.swarm_size, config.spawn.box_side_m);
    const Controller controller(
        std::make_shared<const ReservoirWeights>(ReservoirWeights::generate(champion.reservoir_seed)),
        champion.genotype, config.controller);
    EvalRecord rec = run_episode(arena, spawn, controller, config.sim, episode_seed, {.trajectories = true});
    write_metric_trace(rec, out_dir / "metrics.tsv");
    write_trajectories(rec.trajectories, out_dir / "trajectories.tsv");

    const std::size_t n = config.swarm_size;
    const std::size_t steps = rec.f_trace.size();
    auto snaps = io::open_output(out_dir / "snapshots.tsv");
    snaps << "requested_t\tt\trobot_id\tx\ty\ttheta\n";
    for (double t : config.snapshot_times) {
      const double k_real = std::round(t / config.sim.control_period);
      const std::size_t k = static_cast<std::size_t>(std::clamp(k_real, 0.0, static_cast<double>(steps - 1)));
      for (std::size_t i = 0; i < n; ++i) {
        const PoseSample& p = rec.trajectories[k * n + i];
        snaps << io::format_double(t) << '\t' << io::format_double(p.t) << '\t' << p.robot << '\t'
              << io::format_double(p.x) << '\t' << io::format_double(p.y) << '\t'
              << io::format_double(p.heading) << '\n';
      }
    }
    snaps.close();
    auto summary = io::open_output(out_dir / "summary.tsv");
    summary << "arena\tseed\tring_radius_m\t" << summary_header() << '\n'
            << io::format_double(arena_size) << '\t' << episode_seed << '\t'
            << io::format_double(spawn.ring_radius_m) << '\t'
            << summary_fields(summarize_run(rec, arena.field->peak())) << '\n';
    return rec;
  });
}

ReplayReport replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const json m = json::parse(io::read_text(manifest_path));
  const std::string kind = m.at("kind").get<std::string>();
  const ExperimentConfig config = config_from(m.at("config"));
  if (kind == "evolve") {
    run_evolution(config, out_dir);
  } else if (kind == "flexibility" || kind == "scalability") {
    std::vector<Champion> champions;
    for (const auto& c : m.at("champions")) champions.push_back(champion_from_json(c));
    if (kind == "flexibility")
      run_flexibility(config, champions, out_dir);
    else
      run_scalability(config, champions, out_dir);
  } else if (kind == "behavior") {
    run_behavior_analysis(config, champion_from_json(m.at("champion")),
                          m.at("arena_size").get<double>(), m.at("episode_seed").get<std::uint64_t>(),
                          out_dir);
  } else {
    throw std::invalid_argument("manifest has unknown kind '" + kind + "'");
  }

  ReplayReport report;
  for (const auto& f : m.at("files")) {
    const std::string rel = f.at("path").get<std::string>();
    const fs::path p = out_dir / rel;
    if (fs::exists(p) && io::sha256_file(p) == f.at("sha256").get<std::string>())
      report.matched.push_back(rel);
    else
      report.mismatched.push_back(rel);
  }
  return report;
}

}  // namespace swarmevo::harness
