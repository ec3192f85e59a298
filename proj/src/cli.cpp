#include "sbr/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "sbr/config.hpp"
#include "sbr/corpus.hpp"
#include "sbr/errors.hpp"
#include "sbr/eval.hpp"
#include "sbr/heatmap.hpp"
#include "sbr/synthetic.hpp"
#include "sbr/textprep.hpp"

namespace sbr {

namespace {

namespace fs = std::filesystem;

struct ExperimentFlags {
  std::string config;
  std::optional<std::string> corpus, content, scheme, algo, vector_size, folds, seed, out, stoplist,
      jobs, policy;
  bool timing = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "Run config file (key = value lines)");
    cmd->add_option("--corpus", corpus, "JSON-lines corpus");
    cmd->add_option("--content", content, "title, description, both (comma list)");
    cmd->add_option("--scheme", scheme, "bf, tf, tfidf (comma list)");
    cmd->add_option("--algo", algo, "Learner kind(s), comma list");
    cmd->add_option("--vector-size", vector_size, "Vocabulary size (sweep: comma list)");
    cmd->add_option("--folds", folds, "Cross-validation folds");
    cmd->add_option("--seed", seed, "Seed (falls back to SBR_SEED)");
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--stoplist", stoplist, "Stop-word file");
    cmd->add_option("--jobs", jobs, "Concurrent grid cells");
    cmd->add_option("--policy", policy, "Vocabulary ranking: df or tfidf");
    cmd->add_flag("--timing", timing, "Fill the wall_time_s column");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_config(config);
    auto apply = [&](const char* key, const std::optional<std::string>& v) {
      if (v) c.set(key, *v);
    };
    apply("corpus", corpus);
    apply("content", content);
    apply("scheme", scheme);
    apply("algorithm", algo);
    apply("vector_size", vector_size);
    apply("folds", folds);
    apply("seed", seed);
    apply("out", out);
    apply("stoplist", stoplist);
    apply("jobs", jobs);
    apply("policy", policy);
    if (timing) c.timing = true;
    c.validate();
    return c;
  }
};

Corpus load_curated(const fs::path& path) { return curate(load_corpus(path)).corpus; }

Stoplist stoplist_for(const std::optional<fs::path>& path) {
  return path ? load_stoplist(*path) : default_stoplist();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int cmd_ingest(const std::string& in, const std::string& out_path, std::ostream& out) {
  const auto loaded = load_corpus(in);
  const auto result = curate(loaded);
  save_corpus(result.corpus, out_path);
  out << result.report.loaded << " loaded, " << result.report.dropped << " dropped, "
      << result.report.repaired << " repaired\n";
  return kExitOk;
}

int cmd_stats(const std::string& path, std::ostream& out) {
  const auto corpus = load_curated(path);
  const auto& prov = corpus.provenance();
  auto row = [&](std::string_view name, const ClassCounts& c) {
    out << std::left << std::setw(16) << name << std::right << std::setw(10) << c.security
        << std::setw(14) << c.non_security << std::setw(10) << c.total() << '\n';
  };
  out << std::left << std::setw(16) << "source" << std::right << std::setw(10) << "security"
      << std::setw(14) << "non-security" << std::setw(10) << "total" << '\n';
  for (const auto& [source, counts] : prov.by_source) row(to_string(source), counts);
  row("total", prov.totals());
  return kExitOk;
}

int cmd_evaluate(const ExperimentFlags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  if (config.vector_sizes.size() != 1)
    throw ConfigError("vector_size: evaluate takes a single size (use sweep for a list)");
  const auto seed = resolve_seed(config.seed);
  const auto corpus = load_curated(config.corpus);
  const auto stoplist = stoplist_for(config.stoplist);
  const auto algorithms = config.algorithm_specs(seed);

  GridOptions options;
  options.vector_size = config.vector_sizes.front();
  options.k = config.folds;
  options.seed = seed;
  options.policy = config.policy;
  options.jobs = config.jobs;
  const auto results =
      run_grid(corpus, config.contents, config.schemes, algorithms, options, stoplist);

  ensure_dir(config.out);
  emit_report(results, ReportFormat::csv, config.out / "results.csv", config.timing);
  emit_report(results, ReportFormat::markdown, config.out / "results.md");
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.ok()) continue;
    ++failed;
    err << "failed cell " << to_string(r.spec.content) << '/' << to_string(r.spec.scheme) << '/'
        << to_string(r.spec.algorithm.kind) << ": " << *r.error << '\n';
  }
  out << results.size() << " cells, " << failed << " failed; wrote "
      << (config.out / "results.csv").string() << " and " << (config.out / "results.md").string()
      << '\n';
  return kExitOk;
}

int cmd_sweep(const ExperimentFlags& flags, std::ostream& out, std::ostream& err) {
  const RunConfig config = flags.resolve();
  if (config.contents.size() != 1 || config.schemes.size() != 1 || config.algorithms.size() != 1)
    throw ConfigError("sweep takes exactly one content variant, scheme and algorithm");
  const auto seed = resolve_seed(config.seed);
  const auto corpus = load_curated(config.corpus);
  const auto stoplist = stoplist_for(config.stoplist);

  ExperimentSpec base;
  base.content = config.contents.front();
  base.scheme = config.schemes.front();
  base.algorithm = config.algorithm_specs(seed).front();
  base.k = config.folds;
  base.seed = seed;
  base.policy = config.policy;
  const auto points = sweep_vector_size(corpus, base, config.vector_sizes, stoplist);

  ensure_dir(config.out);
  const auto path = config.out / "sweep.csv";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write " + path.string());
  write_sweep_csv(file, points);
  file.flush();
  if (!file) throw IoError("write failed for " + path.string());
  for (const auto& p : points)
    if (p.error) err << "size " << p.size << " failed: " << *p.error << '\n';
  out << points.size() << " sizes; wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_heatmap(const std::string& corpus_path, const std::string& id, const std::string& out_path,
                int zoom, const std::string& content, std::optional<std::size_t> vector_size,
                const std::optional<std::string>& stoplist_path, std::ostream& out) {
  if (zoom < 1) throw ConfigError("zoom: must be at least 1");
  const auto variant = parse_content_variant(content);
  if (!variant) throw ConfigError("content: unknown value '" + content + "'");
  const auto corpus = load_curated(corpus_path);
  const auto index = corpus.find(id);
  if (!index) throw DataError("no report with id '" + id + "'");
  const auto stoplist =
      stoplist_path ? load_stoplist(*stoplist_path) : default_stoplist();
  const auto docs = preprocess_corpus(corpus, *variant, stoplist);
  std::size_t size = vector_size.value_or(std::numeric_limits<std::size_t>::max());
  if (size < 1) throw ConfigError("vector-size: must be at least 1");
  const auto vocab = build_vocabulary(docs, size);
  const auto heatmap = encode_heatmap(docs[*index], vocab);
  render_heatmap(heatmap, out_path, zoom);
  out << "wrote " << out_path << " (" << kHeatmapSide * zoom << "x" << kHeatmapSide * zoom << ", "
      << heatmap.terms.size() << " terms)\n";
  return kExitOk;
}

int cmd_delays(const std::string& path, std::ostream& out) {
  const auto corpus = load_curated(path);
  const auto stats = delay_analysis(corpus);
  out << std::left << std::setw(14) << "class" << std::right << std::setw(8) << "n" << std::setw(12)
      << "q1_days" << std::setw(12) << "median_days" << std::setw(12) << "q3_days" << '\n';
  auto row = [&](std::string_view name, const std::optional<DelaySummary>& s) {
    out << std::left << std::setw(14) << name << std::right;
    if (!s) {
      out << std::setw(8) << 0 << std::setw(12) << "n/a" << std::setw(12) << "n/a" << std::setw(12)
          << "n/a" << '\n';
      return;
    }
    out << std::setw(8) << s->count << std::setw(12) << fixed(s->q1, 3) << std::setw(12)
        << fixed(s->median, 3) << std::setw(12) << fixed(s->q3, 3) << '\n';
  };
  row("security", stats.security);
  row("non-security", stats.non_security);
  return kExitOk;
}

int cmd_synth(const std::string& preset, std::optional<std::uint64_t> seed, std::size_t reports,
              const std::string& out_path, std::ostream& out) {
  const std::uint64_t s = seed ? *seed : resolve_seed(std::nullopt);
  SyntheticOptions options;
  if (preset == "lexicon")
    options = lexicon_preset(s);
  else if (preset == "split-signal")
    options = split_signal_preset(s);
  else
    throw ConfigError("preset: unknown value '" + preset + "'");
  options.reports = reports;
  const auto corpus = generate_synthetic_corpus(options);
  save_corpus(corpus, out_path);
  out << "wrote " << corpus.size() << " reports to " << out_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Security bug report classification experiments", "sbr"};
  app.require_subcommand(1);

  std::string in_path, out_path, corpus_path, report_id, content = "both", preset = "lexicon";
  int zoom = 10;
  std::size_t reports = 1000;
  std::optional<std::size_t> heatmap_size;
  std::optional<std::string> heatmap_stoplist;
  std::optional<std::uint64_t> synth_seed;

  auto* ingest = app.add_subcommand("ingest", "Load, curate and rewrite a corpus");
  ingest->add_option("--corpus", in_path, "Input JSON-lines file")->required();
  ingest->add_option("--out", out_path, "Curated output file")->required();

  auto* stats = app.add_subcommand("stats", "Per-source class counts");
  stats->add_option("--corpus", corpus_path, "JSON-lines corpus")->required();

  ExperimentFlags eval_flags, sweep_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated grid to CSV and markdown");
  eval_flags.attach(evaluate);
  auto* sweep = app.add_subcommand("sweep", "F-score per vocabulary size");
  sweep_flags.attach(sweep);

  auto* heatmap = app.add_subcommand("heatmap", "Render one report as a 7x7 PGM heatmap");
  heatmap->add_option("--corpus", corpus_path, "JSON-lines corpus")->required();
  heatmap->add_option("--id", report_id, "Report id")->required();
  heatmap->add_option("--out", out_path, "Output .pgm path")->required();
  heatmap->add_option("--zoom", zoom, "Pixels per cell")->capture_default_str();
  heatmap->add_option("--content", content, "title, description or both")->capture_default_str();
  heatmap->add_option("--vector-size", heatmap_size, "Vocabulary size (default: all terms)");
  heatmap->add_option("--stoplist", heatmap_stoplist, "Stop-word file");

  auto* delays = app.add_subcommand("delays", "Per-class time-to-fix quartiles in days");
  delays->add_option("--corpus", corpus_path, "JSON-lines corpus")->required();

  auto* synth = app.add_subcommand("synth", "Write a synthetic labeled corpus");
  synth->add_option("--preset", preset, "lexicon or split-signal")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Seed (falls back to SBR_SEED, then 0)");
  synth->add_option("--reports", reports, "Report count")->capture_default_str();
  synth->add_option("--out", out_path, "Output file")->required();

  std::vector<std::string> argv_storage{"sbr"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*ingest) return cmd_ingest(in_path, out_path, out);
    if (*stats) return cmd_stats(corpus_path, out);
    if (*evaluate) return cmd_evaluate(eval_flags, out, err);
    if (*sweep) return cmd_sweep(sweep_flags, out, err);
    if (*heatmap)
      return cmd_heatmap(corpus_path, report_id, out_path, zoom, content, heatmap_size,
                         heatmap_stoplist, out);
    if (*delays) return cmd_delays(corpus_path, out);
    if (*synth) return cmd_synth(preset, synth_seed, reports, out_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace sbr
