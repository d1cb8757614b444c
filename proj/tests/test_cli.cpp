#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "numline/cli.hpp"
#include "numline/corpus.hpp"
#include "numline/io.hpp"

using namespace numline;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"numline"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("numline_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("unknown subcommand fails") {
  CHECK(run({"frobnicate"}) != 0);
  CHECK(run({}) != 0);
}

TEST_CASE("extract emits one TSV row per literal") {
  TempDir dir;
  const std::string corpus = dir.file("c.jsonl");
  write_file_atomic(corpus,
                    "{\"text\": \"Cohen paid her $130000 via\"}\n"
                    "{\"text\": \"Tigers weigh [MASK] lbs.\"}\n"
                    "{\"text\": \"from 1,700,000 onward\"}\n");
  const std::string out = dir.file("spans.tsv");
  CHECK(run({"extract", corpus, "--out", out}) == 0);
  const auto lines = read_lines(out);
  REQUIRE(lines.size() == 3);  // header + two literals
  CHECK(lines[0].rfind("line_no\t", 0) == 0);
  CHECK(lines[1].find("130000") != std::string::npos);
  CHECK(lines[2].find("1,700,000") != std::string::npos);
  CHECK(lines[2].find("1700000") != std::string::npos);
  // a manifest rides along with file outputs
  CHECK(fs::exists(out + ".manifest.json"));
}

TEST_CASE("tokenize renders the digit fixture") {
  TempDir dir;
  const std::string nums = dir.file("n.txt");
  write_file_atomic(nums, "600\n1\n");
  const std::string out = dir.file("tok.tsv");
  CHECK(run({"tokenize", nums, "--scheme", "digits", "--out", out}) == 0);
  const auto lines = read_lines(out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].find("6 0 0 [PAD]") != std::string::npos);
}

TEST_CASE("bins fit and assign round trip") {
  TempDir dir;
  const std::string nums = dir.file("n.txt");
  std::string content;
  for (int i = 1; i <= 8; ++i) content += std::to_string(i) + "\n";
  write_file_atomic(nums, content);
  const std::string spec = dir.file("bins.json");
  CHECK(run({"bins", "fit", "--n", "4", nums, "--out", spec}) == 0);
  const std::string assigned = dir.file("assigned.tsv");
  CHECK(run({"bins", "assign", "--spec", spec, nums, "--out", assigned}) == 0);
  const auto lines = read_lines(assigned);
  REQUIRE(lines.size() == 9);
  CHECK(lines[1] == "1\t0");
  CHECK(lines[8] == "8\t3");
}

TEST_CASE("eval scores a prediction file and rejects mismatches") {
  TempDir dir;
  const std::string pred = dir.file("pred.tsv");
  const std::string truth = dir.file("truth.tsv");
  write_file_atomic(pred, "id\tvalue\n1\t100\n2\t9000\n3\tNA\n");
  write_file_atomic(truth, "id\tvalue\n1\t150\n2\t100\n3\t100\n");
  const std::string out = dir.file("report.json");
  CHECK(run({"eval", "--pred", pred, "--truth", truth, "--out", out}) == 0);
  const std::string report = read_file(out);
  CHECK(report.find("\"n\": 3") != std::string::npos);
  CHECK(report.find("\"n_valid\": 2") != std::string::npos);

  // mismatched lengths exit nonzero
  write_file_atomic(pred, "id\tvalue\n1\t100\n");
  CHECK(run({"eval", "--pred", pred, "--truth", truth, "--out", out}) != 0);
}

TEST_CASE("analyze mantissa writes csv and svg") {
  TempDir dir;
  const std::string nums = dir.file("n.txt");
  write_file_atomic(nums, "2\n20\n200\n2000\n");
  const std::string out = dir.file("hist.csv");
  const std::string svg = dir.file("hist.svg");
  CHECK(run({"analyze", "mantissa", nums, "--bins", "9", "--out", out, "--svg", svg}) == 0);
  const auto lines = read_lines(out);
  CHECK(lines[0] == "bin_lo,bin_hi,count");
  CHECK(lines[2] == "2,3,4");  // all four values share mantissa 2
  CHECK(read_file(svg).find("<svg") != std::string::npos);
}

TEST_CASE("probe ranks the planted neuron first") {
  TempDir dir;
  const std::string acts = dir.file("a.csv");
  const std::string labels = dir.file("l.txt");
  std::string matrix = "6 4\n";
  std::string labs;
  for (int row = 0; row < 6; ++row) {
    const bool positive = row % 2 == 0;
    labs += positive ? "3\n" : "1\n";
    // neuron 2 fires exactly on the positives
    matrix += "0.1,0.2," + std::string(positive ? "9.0" : "-9.0") + ",0.3\n";
  }
  write_file_atomic(acts, matrix);
  write_file_atomic(labels, labs);
  const std::string out = dir.file("probe.json");
  CHECK(run({"probe", "--activations", acts, "--labels", labels, "--target", "3", "--k", "1",
             "--out", out}) == 0);
  const std::string report = read_file(out);
  const std::size_t first = report.find("\"neuron\"");
  REQUIRE(first != std::string::npos);
  CHECK(report.substr(first, 14).find("2") != std::string::npos);
  CHECK(report.find("\"f1\": 1.0") != std::string::npos);
}

TEST_CASE("train and experiment produce artifacts deterministically") {
  TempDir dir;
  CorpusConfig cc = CorpusConfig::defaults();
  cc.n_train = 300;
  cc.n_dev = 60;
  cc.n_test = 60;
  const Corpus corpus = gen_corpus(cc, 12);
  const std::string train_path = dir.file("train.jsonl");
  const std::string dev_path = dir.file("dev.jsonl");
  save_jsonl(corpus.train, train_path);
  save_jsonl(corpus.dev, dev_path);

  const std::string model_path = dir.file("model.json");
  CHECK(run({"--seed", "21", "train", "--head", "vocab-am", "--corpus", train_path, "--dev",
             dev_path, "--dim", "16", "--out", model_path}) == 0);
  CHECK(fs::exists(model_path));
  CHECK(fs::exists(model_path + ".manifest.json"));
  const std::string once = read_file(model_path);
  // the global flag parses on either side of the subcommand
  CHECK(run({"train", "--seed", "21", "--head", "vocab-am", "--corpus", train_path, "--dev",
             dev_path, "--dim", "16", "--out", model_path}) == 0);
  CHECK(read_file(model_path) == once);  // byte-identical rerun

  // a small two-head experiment
  const std::string cfg_path = dir.file("cfg.json");
  write_file_atomic(cfg_path,
                    "{\"seed\": 6, \"encoder_dim\": 16,"
                    " \"corpus\": {\"n_train\": 300, \"n_dev\": 60, \"n_test\": 60},"
                    " \"train\": {\"max_epochs\": 2, \"patience\": 1},"
                    " \"heads\": [\"const-median\", \"vocab-am\"]}\n");
  const std::string report_path = dir.file("report.json");
  const std::string table_path = dir.file("table.tsv");
  CHECK(run({"experiment", "--config", cfg_path, "--out", report_path, "--table",
             table_path}) == 0);
  CHECK(fs::exists(report_path));
  const auto table = read_lines(table_path);
  REQUIRE(table.size() == 3);
  CHECK(table[0].rfind("head\t", 0) == 0);
  const std::string report_once = read_file(report_path);
  CHECK(run({"experiment", "--config", cfg_path, "--out", report_path, "--table",
             table_path}) == 0);
  CHECK(read_file(report_path) == report_once);
}

TEST_CASE("bad inputs surface structured errors") {
  TempDir dir;
  const std::string nums = dir.file("n.txt");
  write_file_atomic(nums, "not_a_number\n");
  CHECK(run({"tokenize", nums}) != 0);
  CHECK(run({"tokenize", dir.file("missing.txt")}) != 0);
  CHECK(run({"bins", "fit", dir.file("missing.txt")}) != 0);
}
