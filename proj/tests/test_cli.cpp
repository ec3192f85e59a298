#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "helpers.hpp"
#include "sbr/cli.hpp"
#include "sbr/config.hpp"
#include "sbr/errors.hpp"
#include "sbr/synthetic.hpp"

using namespace sbr;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Small synthetic corpus on disk for the experiment commands.
std::filesystem::path small_corpus(const std::filesystem::path& dir) {
  auto options = lexicon_preset(3);
  options.reports = 120;
  const auto path = dir / "corpus.jsonl";
  save_corpus(generate_synthetic_corpus(options), path);
  return path;
}

}  // namespace

TEST_CASE("ingest summarizes curation") {
  const auto dir = test::scratch_dir("cli_ingest");
  const std::string ok =
      R"({"id":"1","source":"mozilla","title":"a","description":"b","label":"security"})" "\n"
      R"({"id":"2","source":"mozilla","title":"c","description":"","label":"security"})" "\n"
      R"({"id":"3","source":"redhat","title":"","description":"d","label":"non-security"})" "\n";
  test::write_file(dir / "in.jsonl", ok);
  auto r = run({"ingest", "--corpus", (dir / "in.jsonl").string(), "--out", (dir / "out.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("3 loaded, 0 dropped") != std::string::npos);
  CHECK(line_count(test::read_file(dir / "out.jsonl")) == 3);

  test::write_file(dir / "in2.jsonl",
                   ok + R"({"id":"4","source":"other","title":" ","description":"","label":"security"})" "\n");
  r = run({"ingest", "--corpus", (dir / "in2.jsonl").string(), "--out", (dir / "out2.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("1 dropped") != std::string::npos);

  r = run({"ingest", "--corpus", (dir / "missing.jsonl").string(), "--out", (dir / "o.jsonl").string()});
  CHECK(r.code == kExitIo);
  CHECK_FALSE(r.err.empty());

  test::write_file(dir / "bad.jsonl", ok + "{broken\n");
  r = run({"ingest", "--corpus", (dir / "bad.jsonl").string(), "--out", (dir / "o.jsonl").string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("line 4") != std::string::npos);
}

TEST_CASE("stats prints per-source rows and totals") {
  const auto dir = test::scratch_dir("cli_stats");
  test::write_file(dir / "c.jsonl",
                   R"({"id":"1","source":"mozilla","title":"a","description":"","label":"security"})" "\n"
                   R"({"id":"2","source":"redhat","title":"a","description":"","label":"non-security"})" "\n"
                   R"({"id":"3","source":"redhat","title":"a","description":"","label":"security"})" "\n");
  auto r = run({"stats", "--corpus", (dir / "c.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("mozilla") != std::string::npos);
  std::istringstream lines(r.out);
  std::string line, last;
  while (std::getline(lines, line)) last = line;
  std::istringstream total(last);
  std::string name;
  int sec, non, all;
  total >> name >> sec >> non >> all;
  CHECK(name == "total");
  CHECK(sec == 2);
  CHECK(non == 1);
  CHECK(all == 3);

  test::write_file(dir / "empty.jsonl",
                   R"({"id":"1","source":"mozilla","title":"","description":"","label":"security"})" "\n");
  r = run({"stats", "--corpus", (dir / "empty.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("total                    0             0         0") != std::string::npos);
}

TEST_CASE("evaluate writes a grid and reruns byte-identically") {
  const auto dir = test::scratch_dir("cli_eval");
  const auto corpus = small_corpus(dir);
  test::write_file(dir / "run.cfg",
                   "# two of everything\n"
                   "corpus = corpus.jsonl\n"
                   "content = title, both\n"
                   "scheme = bf, tfidf\n"
                   "algorithm = decision-tree, random-forest\n"
                   "random-forest.n_estimators = 10\n"
                   "vector_size = 40\n"
                   "folds = 3\n"
                   "seed = 11\n"
                   "out = \"results\"\n");
  auto r = run({"evaluate", "--config", (dir / "run.cfg").string()});
  REQUIRE(r.code == 0);
  const auto csv = test::read_file(dir / "results" / "results.csv");
  CHECK(line_count(csv) == 9);
  CHECK(std::filesystem::exists(dir / "results" / "results.md"));

  r = run({"evaluate", "--config", (dir / "run.cfg").string()});
  CHECK(r.code == 0);
  CHECK(test::read_file(dir / "results" / "results.csv") == csv);

  r = run({"evaluate", "--config", (dir / "run.cfg").string(), "--seed", "12", "--out",
           (dir / "other").string()});
  CHECK(r.code == 0);
  const auto reseeded = test::read_file(dir / "other" / "results.csv");
  CHECK(line_count(reseeded) == 9);

  r = run({"evaluate", "--config", (dir / "run.cfg").string(), "--timing", "--out", (dir / "timed").string()});
  CHECK(r.code == 0);
  CHECK(test::read_file(dir / "timed" / "results.csv").find(",\n") == std::string::npos);
}

TEST_CASE("evaluate reports config problems with exit code 1") {
  const auto dir = test::scratch_dir("cli_eval_bad");
  const auto corpus = small_corpus(dir);
  test::write_file(dir / "bad.cfg", "corpus = corpus.jsonl\nalgorithm = decision-tree, svm\n");
  auto r = run({"evaluate", "--config", (dir / "bad.cfg").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("algorithm") != std::string::npos);

  test::write_file(dir / "bad2.cfg", "corpus = corpus.jsonl\nknn.neighbours = 3\n");
  r = run({"evaluate", "--config", (dir / "bad2.cfg").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("knn.neighbours") != std::string::npos);

  r = run({"evaluate", "--corpus", corpus.string(), "--scheme", "bm25"});
  CHECK(r.code == kExitConfig);
  r = run({"evaluate"});
  CHECK(r.code == kExitConfig);
  r = run({"frobnicate"});
  CHECK(r.code == kExitConfig);
}

TEST_CASE("sweep writes one row per size") {
  const auto dir = test::scratch_dir("cli_sweep");
  const auto corpus = small_corpus(dir);
  auto r = run({"sweep", "--corpus", corpus.string(), "--algo", "decision-tree", "--vector-size", "5,20,80",
                "--folds", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto csv = test::read_file(dir / "sweep.csv");
  CHECK(line_count(csv) == 4);
  CHECK(csv.rfind("vector_size,f_score\n5,", 0) == 0);

  r = run({"sweep", "--corpus", corpus.string(), "--algo", "decision-tree", "--vector-size", "",
           "--out", dir.string()});
  CHECK(r.code == kExitConfig);
  r = run({"sweep", "--corpus", corpus.string(), "--algo", "decision-tree,gnb", "--vector-size", "5",
           "--out", dir.string()});
  CHECK(r.code == kExitConfig);
}

TEST_CASE("heatmap command") {
  const auto dir = test::scratch_dir("cli_heatmap");
  const auto corpus = small_corpus(dir);
  auto r = run({"heatmap", "--corpus", corpus.string(), "--id", "SYN-0001", "--out", (dir / "h.pgm").string(),
                "--zoom", "10"});
  REQUIRE(r.code == 0);
  const auto img = test::read_file(dir / "h.pgm");
  CHECK(img.rfind("P5\n70 70\n255\n", 0) == 0);
  CHECK(img.size() == std::string("P5\n70 70\n255\n").size() + 4900);

  r = run({"heatmap", "--corpus", corpus.string(), "--id", "NOPE", "--out", (dir / "x.pgm").string()});
  CHECK(r.code == kExitData);
  r = run({"heatmap", "--corpus", corpus.string(), "--id", "SYN-0001", "--out", (dir / "x.pgm").string(),
           "--zoom", "0"});
  CHECK(r.code == kExitConfig);
}

TEST_CASE("delays command") {
  auto r = run({"delays", "--corpus", (std::filesystem::path(SBR_DATA_DIR) / "redhat_delay_sample.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("49.500") != std::string::npos);
  CHECK(r.out.find("2248.000") != std::string::npos);

  const auto dir = test::scratch_dir("cli_delays");
  test::write_file(dir / "c.jsonl",
                   R"({"id":"1","source":"redhat","title":"a","description":"","label":"security","created_at":0,"closed_at":86400})" "\n"
                   R"({"id":"2","source":"redhat","title":"a","description":"","label":"non-security"})" "\n");
  r = run({"delays", "--corpus", (dir / "c.jsonl").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("n/a") != std::string::npos);
}

TEST_CASE("synth reproduces the bundled corpus") {
  const auto dir = test::scratch_dir("cli_synth");
  auto r = run({"synth", "--preset", "lexicon", "--seed", "42", "--out", (dir / "s.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(test::read_file(dir / "s.jsonl") ==
        test::read_file(std::filesystem::path(SBR_DATA_DIR) / "synthetic_1000.jsonl"));
  r = run({"synth", "--preset", "split-signal", "--seed", "42", "--out", (dir / "t.jsonl").string()});
  REQUIRE(r.code == 0);
  CHECK(test::read_file(dir / "t.jsonl") ==
        test::read_file(std::filesystem::path(SBR_DATA_DIR) / "synthetic_split_1000.jsonl"));
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "corpus = data/x.jsonl  # trailing comment\n"
      "content = title,description\n"
      "scheme = tf\n"
      "algorithm = knn, gnb\n"
      "knn.neighbors = 3\n"
      "vector_size = 10, 20\n"
      "folds = 4\n"
      "policy = tfidf\n"
      "stoplist = \"stop#words.txt\"\n"
      "jobs = 2\n"
      "timing = true\n");
  const auto c = parse_config(in, "/base");
  CHECK(c.corpus == "/base/data/x.jsonl");
  CHECK(c.contents == std::vector<ContentVariant>{ContentVariant::title, ContentVariant::description});
  CHECK(c.vector_sizes == std::vector<std::size_t>{10, 20});
  CHECK(c.folds == 4);
  CHECK(c.policy == RankingPolicy::corpus_tfidf);
  CHECK(c.stoplist == std::filesystem::path("/base/stop#words.txt"));
  CHECK(c.jobs == 2);
  CHECK(c.timing);
  const auto specs = c.algorithm_specs(5);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].params.neighbors == 3);
  CHECK(specs[0].seed == 5);
  CHECK(specs[1].kind == AlgorithmKind::gnb);

  std::istringstream bad("folds 5\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
}

TEST_CASE("seed falls back to SBR_SEED") {
  CHECK(resolve_seed(7) == 7);
  setenv("SBR_SEED", "123", 1);
  CHECK(resolve_seed(std::nullopt) == 123);
  setenv("SBR_SEED", "abc", 1);
  CHECK_THROWS_AS(resolve_seed(std::nullopt), ConfigError);
  unsetenv("SBR_SEED");
  CHECK(resolve_seed(std::nullopt) == 0);
}
