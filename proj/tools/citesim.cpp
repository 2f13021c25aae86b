// citesim command-line driver.
//
// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "citesim/citesim.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace citesim;
using citesim::cli::RunManifest;

namespace {

/// Bad arguments or input documents (exit 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kSeedEnv = "CITESIM_SEED";

/// Flag > CITESIM_SEED > fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnv); env && *env) {
    char* end = nullptr;
    errno = 0;
    const auto v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || env[0] == '-') throw UsageError(std::string(kSeedEnv) + ": expected a non-negative integer");
    return v;
  }
  return fallback;
}

/// Creates `dir`; refuses a non-empty directory unless `force`.
void prepare_out(const fs::path& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (!force && !fs::is_empty(dir)) throw UsageError(dir.string() + " is not empty (use --force to overwrite)");
  }
  fs::create_directories(dir);
}

class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const fs::path& rel) {
    fs::create_directories((dir_ / rel).parent_path());
    std::ofstream out(dir_ / rel, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / rel).string());
    files_.push_back(rel);
    return out;
  }

  void json(const fs::path& rel, const Json& doc) {
    auto out = open(rel);
    out << doc.dump(2) << '\n';
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

void finish(OutputSet& out, RunManifest m) {
  m.files = out.files();
  cli::write_manifest(out.dir(), m);
  const auto bad = cli::verify_manifest(out.dir());
  if (!bad.empty()) throw Error("manifest verification failed for " + bad.front());
}

std::string sha_of_json(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  GeneratorParams params;
  std::optional<std::uint64_t> seed;
  fs::path out;
  bool force = false;
};

int cmd_generate(const GenerateArgs& a) {
  const auto started = cli::utc_timestamp();
  GeneratorParams p = a.params;
  p.seed = resolve_seed(a.seed, p.seed);
  prepare_out(a.out, a.force);
  const auto graph = generate_synthetic(p);
  OutputSet out(a.out);
  {
    auto e = out.open(kEdgeFile);
    auto g = out.open(kGenderFile);
    write_edge_list(graph, e, g);
  }
  out.json("generator.json", to_json(p));
  finish(out, {"generate", sha_of_json(to_json(p)), p.seed, started, {}, {}});
  std::cout << "authors " << graph.n_authors() << "  edges " << graph.n_edges() << "  woman fraction "
            << fmt(gender_fraction(graph, Gender::Woman)) << "  same-gender edges "
            << fmt(same_gender_edge_fraction(graph)) << '\n';
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::optional<fs::path> config;
  fs::path graph;
  fs::path out;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
  bool force = false;
  bool snapshot = false;
};

SimConfig load_sim_config(const std::optional<fs::path>& path) {
  if (!path) return {};
  const auto doc = read_json_file(*path);
  try {
    return sim_config_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path->string() + ": " + e.what());
  }
}

int cmd_simulate(const SimulateArgs& a) {
  const auto started = cli::utc_timestamp();
  SimConfig config = load_sim_config(a.config);
  config.master_seed = resolve_seed(a.seed, config.master_seed);
  validate(config);
  const auto loaded = read_graph(a.graph);
  if (a.dry_run) {
    std::cout << "config ok; graph " << loaded.graph.n_authors() << " authors, " << loaded.graph.n_edges()
              << " edges\n";
    return 0;
  }
  prepare_out(a.out, a.force);
  const auto& graph = loaded.graph;
  const auto sim = run_simulation(graph, config);
  const auto rows = yearly_overcitation(sim.records, graph);

  OutputSet out(a.out);
  out.json("config.json", to_json(config));
  for (const auto& rec : sim.records) {
    auto c = out.open("citations_year_" + std::to_string(rec.year) + ".csv");
    write_citations_csv(c, rec, graph);
    auto p = out.open("population_year_" + std::to_string(rec.year) + ".csv");
    write_population_csv(p, rec, sim.agents);
  }
  {
    auto o = out.open("overcitation.csv");
    write_overcitation_csv(o, rows);
  }
  out.json("tests.json", tests_json(rows));
  if (a.snapshot) out.json("agents.json", population_to_json(sim.agents));
  finish(out, {"simulate", config_fingerprint(config), config.master_seed, started, {}, {}});

  const auto s = summarize_run(rows, Gender::Woman);
  std::cout << "woman overcitation  all " << fmt(s.all.mean) << "  women citers " << fmt(s.women.mean)
            << "  men citers " << fmt(s.men.mean) << '\n';
  return 0;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
  fs::path spec;
  fs::path out;
  std::size_t jobs = 1;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

void write_result(OutputSet& out, const fs::path& sub, const ExperimentResult& result) {
  {
    auto s = out.open(sub / "summary.csv");
    write_summary_csv(s, result);
  }
  {
    auto s = out.open(sub / "series.csv");
    write_series_csv(s, result);
  }
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& run = result.runs[i];
    Json doc = {{"sweep_value", run.sweep_value},
                {"replicate", run.replicate},
                {"fingerprint", run.fingerprint},
                {"config", to_json(run.config)},
                {"woman_overcitation",
                 {{"all", to_json(run.summary.all)},
                  {"women_citers", to_json(run.summary.women)},
                  {"men_citers", to_json(run.summary.men)}}}};
    char name[32];
    std::snprintf(name, sizeof name, "run_%04zu.json", i);
    out.json(sub / "runs" / name, doc);
  }
}

Json sweep_report(const ExperimentResult& result) {
  const auto values = result.values();
  Json j = {{"parameter", result.parameter}, {"values", values}};
  for (Gender citer : {Gender::Woman, Gender::Man}) {
    const auto means = result.replicate_means(citer, &ExperimentRow::mean_overcitation_w);
    const auto slopes = result.replicate_means(citer, &ExperimentRow::slope);
    Json g = {{"mean_overcitation_w", means}, {"slope", slopes}};
    if (values.size() >= 2) g["spearman_mean_vs_value"] = stats::spearman(values, means);
    const auto crossing = zero_crossing(values, means);
    g["zero_crossing"] = crossing ? Json(*crossing) : Json(nullptr);
    j[citer == Gender::Woman ? "women_citers" : "men_citers"] = g;
  }
  return j;
}

int cmd_experiment(const ExperimentArgs& a) {
  const auto started = cli::utc_timestamp();
  const auto doc = read_json_file(a.spec);
  ExperimentSpec spec;
  try {
    spec = experiment_spec_from_json(doc, a.spec.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(a.spec.string() + ": " + e.what());
  }
  spec.base.master_seed = resolve_seed(a.seed, spec.base.master_seed);

  const fs::path dir = a.out / spec.name;
  prepare_out(dir, a.force);
  const CoauthorGraph graph = spec.graph_dir ? read_graph(*spec.graph_dir).graph : generate_synthetic(*spec.generate);

  OutputSet out(dir);
  Json resolved = doc;
  resolved["base"] = to_json(spec.base);
  out.json("spec.json", resolved);

  switch (spec.kind) {
    case ExperimentSpec::Kind::Baseline: {
      const auto r = run_baseline(graph, spec.base, spec.replicates, a.jobs);
      write_result(out, "", r);
      out.json("report.json", sweep_report(r));
      break;
    }
    case ExperimentSpec::Kind::Sweep: {
      const auto r = run_sweep(graph, spec.sweep(), a.jobs);
      write_result(out, "", r);
      out.json("report.json", sweep_report(r));
      break;
    }
    case ExperimentSpec::Kind::Cds: {
      const auto r = run_cds_scenario(graph, spec.base, spec.meetings_variants, spec.adoption_fractions,
                                      spec.replicates, a.jobs);
      Json report;
      if (!r.meetings.runs.empty()) {
        write_result(out, "meetings", r.meetings);
        report["meetings"] = sweep_report(r.meetings);
        report["meetings"]["men_citers"]["final_year_mean"] =
            r.meetings.replicate_means(Gender::Man, &ExperimentRow::final_year_mean);
      }
      if (!r.adoption.runs.empty()) {
        write_result(out, "adoption", r.adoption);
        report["adoption"] = sweep_report(r.adoption);
        report["adoption"]["min_equitable_fraction"] =
            r.min_equitable_fraction ? Json(*r.min_equitable_fraction) : Json(nullptr);
      }
      out.json("report.json", report);
      break;
    }
  }
  finish(out, {"experiment", sha_of_json(resolved), spec.base.master_seed, started, {}, {}});
  std::cout << "wrote " << out.files().size() << " files to " << dir.string() << '\n';
  return 0;
}

// --------------------------------------------------------------------- cds

struct CdsArgs {
  fs::path input;
  std::optional<fs::path> benchmark;
  std::optional<fs::path> out;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct RatesRow {
  std::string label;
  CdsRates rates;
  std::size_t line = 0;
};

/// Reads a CSV with columns ww,mw,wm,mm (optionally prefixed rep_) and an
/// optional leading label column such as paper_id.
std::vector<RatesRow> read_rates_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return path.string() + ":" + std::to_string(lineno) + ": "; };
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) header = split_csv(line);
  }
  const std::vector<std::string> cats{"ww", "mw", "wm", "mm"};
  bool labelled = header.size() == 5;
  auto is_cat = [](const std::string& c, const std::string& h) { return h == c || h == "rep_" + c; };
  if (!(header.size() == 4 || labelled) ||
      !std::equal(cats.begin(), cats.end(), header.begin() + (labelled ? 1 : 0), is_cat))
    throw UsageError(where() + "expected header [paper_id,]rep_ww,rep_mw,rep_wm,rep_mm");

  std::vector<RatesRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw UsageError(where() + "expected " + std::to_string(header.size()) + " fields");
    RatesRow row;
    row.line = lineno;
    row.label = labelled ? cells[0] : std::to_string(rows.size() + 1);
    double v[4];
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& cell = cells[k + (labelled ? 1 : 0)];
      char* end = nullptr;
      v[k] = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0' || !std::isfinite(v[k]))
        throw UsageError(where() + "field " + cats[k] + " is not a number");
      if (v[k] < 0) throw UsageError(where() + "field " + cats[k] + " is negative");
    }
    row.rates = {v[0], v[1], v[2], v[3]};
    if (row.rates.sum() > 1.0 + 1e-6) throw UsageError(where() + "rates sum to more than 1 (row " + std::to_string(rows.size() + 1) + ")");
    rows.push_back(row);
  }
  if (rows.empty()) throw UsageError(path.string() + ": no data rows");
  return rows;
}

int cmd_cds(const CdsArgs& a) {
  CdsBenchmark bench;
  if (a.benchmark) {
    const auto rows = read_rates_csv(*a.benchmark);
    if (rows.size() != 1) throw UsageError(a.benchmark->string() + ": expected exactly one data row");
    bench.expected = rows[0].rates;
    try {
      bench.validate();
    } catch (const ConfigError& e) {
      throw UsageError(a.benchmark->string() + ": " + e.what());
    }
  }
  const auto rows = read_rates_csv(a.input);

  std::ostringstream csv;
  csv << "paper_id,ww,mw,wm,mm\n";
  std::vector<std::vector<double>> cols(4);
  for (const auto& r : rows) {
    const auto o = cds_overcitation(r.rates, bench).values();
    csv << r.label;
    for (std::size_t k = 0; k < 4; ++k) {
      csv << ',' << fmt(o[k]);
      cols[k].push_back(o[k]);
    }
    csv << '\n';
  }
  csv << "mean";
  for (const auto& c : cols) csv << ',' << fmt(stats::mean(c));
  csv << '\n';
  if (rows.size() >= 2) {
    csv << "se";
    for (const auto& c : cols) csv << ',' << fmt(stats::standard_error(c));
    csv << '\n';
  }
  if (a.out) {
    std::ofstream f(*a.out, std::ios::binary);
    if (!f) throw Error("cannot write " + a.out->string());
    f << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const fs::path& dir) {
  const auto bad = cli::verify_manifest(dir);
  for (const auto& f : bad) std::cerr << "checksum mismatch: " << f << '\n';
  if (bad.empty()) std::cout << "ok\n";
  return bad.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based simulator of gendered citation dynamics", "citesim"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int status = 0;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic co-authorship graph");
  g->add_option("--n", gen.params.n_authors, "Number of authors")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 30));
  g->add_option("--woman-fraction", gen.params.woman_fraction, "Share of women authors")->check(CLI::Range(0.0, 1.0));
  g->add_option("--mean-degree", gen.params.mean_degree, "Target mean degree")->check(CLI::PositiveNumber);
  g->add_option("--assortativity", gen.params.gender_assortativity, "Gender assortativity in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  g->add_option("--seed", gen.seed, "Generator seed (overrides CITESIM_SEED)");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_flag("--force", gen.force, "Overwrite a non-empty output directory");
  g->callback([&] { status = cmd_generate(gen); });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run one simulation");
  s->add_option("--config", sim.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  s->add_option("--graph", sim.graph, "Directory with edges.txt and genders.txt")->required();
  s->add_option("--out", sim.out, "Output directory")->required();
  s->add_option("--seed", sim.seed, "Master seed (overrides CITESIM_SEED and the config)");
  s->add_flag("--dry-run", sim.dry_run, "Validate inputs and exit without writing");
  s->add_flag("--snapshot", sim.snapshot, "Also write the final agent population as agents.json");
  s->add_flag("--force", sim.force, "Overwrite a non-empty output directory");
  s->callback([&] { status = cmd_simulate(sim); });

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a replicated experiment or sweep");
  e->add_option("--spec", exp.spec, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
  e->add_option("--out", exp.out, "Results root; output goes to OUT/<name>")->required();
  e->add_option("--jobs", exp.jobs, "Parallel simulation runs")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
  e->add_option("--seed", exp.seed, "Base master seed (overrides CITESIM_SEED and the spec)");
  e->add_flag("--force", exp.force, "Overwrite a non-empty output directory");
  e->callback([&] { status = cmd_experiment(exp); });

  CdsArgs cds;
  auto* c = app.add_subcommand("cds", "Overcitation of reported citation-diversity-statement rates");
  c->add_option("--input", cds.input, "CSV with columns [paper_id,]rep_ww,rep_mw,rep_wm,rep_mm")->required()->check(CLI::ExistingFile);
  c->add_option("--benchmark", cds.benchmark, "CSV with one row of expected rates")->check(CLI::ExistingFile);
  c->add_option("--out", cds.out, "Write the result here instead of stdout");
  c->callback([&] { status = cmd_cds(cds); });

  fs::path verify_dir;
  auto* v = app.add_subcommand("verify", "Check an output directory against its manifest");
  v->add_option("dir", verify_dir, "Output directory")->required()->check(CLI::ExistingDirectory);
  v->callback([&] { status = cmd_verify(verify_dir); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return 2;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return status;
}
