#include "numline/cli.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <ctime>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "numline/analysis.hpp"
#include "numline/binning.hpp"
#include "numline/io.hpp"
#include "numline/metrics.hpp"
#include "numline/notation.hpp"
#include "numline/numparse.hpp"
#include "numline/train.hpp"

namespace numline {

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 177;
  std::string command;
  std::vector<std::string> argv;
};

// <out>.manifest.json: the resolved configuration for reproducibility.
// The timestamp lives here and only here; primary outputs stay byte-stable.
void write_manifest(const GlobalOpts& g, const std::string& out_path,
                    const std::vector<std::string>& inputs, const json& config) {
  json m;
  m["command"] = g.command;
  m["argv"] = g.argv;
  m["seed"] = g.seed;
  m["inputs"] = inputs;
  m["output"] = out_path;
  m["config"] = config;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  m["timestamp"] = buf;
  write_file_atomic(out_path + ".manifest.json", m.dump(2) + "\n");
}

void emit(const std::string& content, const std::string& out_path, const GlobalOpts& g,
          const std::vector<std::string>& inputs, const json& config) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    write_file_atomic(out_path, content);
    write_manifest(g, out_path, inputs, config);
  }
}

// ---------------------------------------------------------------- extract
int cmd_extract(const GlobalOpts& g, const std::string& file, const std::string& out) {
  std::string tsv = "line_no\tstart\tend\tsurface\tvalue\texponent\tmantissa\tstatus\n";
  std::size_t line_no = 0;
  for (const auto& line : read_lines(file)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const std::string text = j.at("text").get<std::string>();
    for (const auto& span : extract(text)) {
      tsv += std::to_string(line_no) + "\t" + std::to_string(span.start) + "\t" +
             std::to_string(span.end) + "\t" + span.surface + "\t" +
             format_double(span.raw_value) + "\t";
      if (span.parsed) {
        tsv += std::to_string(span.parsed->exponent) + "\t" +
               format_double(span.parsed->mantissa);
      } else {
        tsv += "NA\tNA";
      }
      tsv += std::string("\t") + to_string(span.status) + "\n";
    }
  }
  emit(tsv, out, g, {file}, json::object());
  return 0;
}

// --------------------------------------------------------------- tokenize
int cmd_tokenize(const GlobalOpts& g, const std::string& file, const std::string& scheme_name,
                 int pad, const std::string& separator, const std::string& out) {
  NotationScheme scheme;
  if (scheme_name == "digits") {
    scheme = NotationScheme::digits(pad > 0 ? pad : 17);
  } else if (scheme_name == "scientific") {
    scheme = NotationScheme::scientific(pad > 0 ? pad : 8);
  } else if (scheme_name == "numbert") {
    scheme = NotationScheme::numbert(pad > 0 ? pad : 8,
                                     separator.empty() ? "[EXP]" : separator);
  } else if (scheme_name == "decimal") {
    scheme = NotationScheme::decimal(pad > 0 ? pad : 8);
  } else {
    throw CLI::ValidationError("--scheme must be digits|scientific|numbert|decimal");
  }

  std::string tsv = "value\ttokens\n";
  for (double v : read_number_column(file)) {
    tsv += format_double(v) + "\t";
    const auto rendered = render_number(scheme, decompose(v));
    for (std::size_t i = 0; i < rendered.tokens.size(); ++i) {
      if (i) tsv += ' ';
      tsv += rendered.tokens[i];
    }
    tsv += "\n";
  }
  json cfg;
  cfg["scheme"] = scheme_name;
  cfg["pad"] = scheme.pad_len;
  cfg["exp_separator"] = scheme.exp_separator;
  emit(tsv, out, g, {file}, cfg);
  return 0;
}

// ------------------------------------------------------------------- bins
int cmd_bins_fit(const GlobalOpts& g, const std::string& file, int n_bins,
                 const std::string& out) {
  const FreqBins bins = fit_freq_bins(read_number_column(file), n_bins);
  json j;
  j["edges"] = bins.edges;
  j["representatives"] = bins.representatives;
  json cfg;
  cfg["n_bins"] = n_bins;
  emit(j.dump(2) + "\n", out, g, {file}, cfg);
  return 0;
}

int cmd_bins_assign(const GlobalOpts& g, const std::string& spec_path,
                    const std::string& file, const std::string& out) {
  const json spec = json::parse(read_file(spec_path));
  FreqBins bins;
  bins.edges = spec.at("edges").get<std::vector<double>>();
  bins.representatives = spec.at("representatives").get<std::vector<double>>();
  if (bins.edges.empty() || bins.representatives.size() != bins.edges.size() ||
      !std::is_sorted(bins.edges.begin(), bins.edges.end())) {
    throw std::invalid_argument(spec_path +
                                ": edges must be ascending with one representative per bin");
  }
  std::string tsv = "value\tbin\n";
  for (double v : read_number_column(file)) {
    tsv += format_double(v) + "\t" + std::to_string(bin_of(v, bins)) + "\n";
  }
  emit(tsv, out, g, {spec_path, file}, json::object());
  return 0;
}

// ------------------------------------------------------------------ train
int cmd_train(const GlobalOpts& g, const std::string& head_name, const std::string& corpus_path,
              const std::string& dev_path, const std::string& config_path, int dim,
              const std::string& out) {
  TrainConfig cfg;
  cfg.seed = g.seed;
  json cfg_json = json::object();
  if (!config_path.empty()) {
    cfg_json = json::parse(read_file(config_path));
    ExperimentConfig full = experiment_config_from_json(cfg_json.dump());
    cfg = full.train;
    cfg.seed = g.seed;
    dim = full.encoder_dim;
  }

  Corpus corpus;
  corpus.train = load_jsonl(corpus_path);
  if (!dev_path.empty()) {
    corpus.dev = load_jsonl(dev_path);
  } else {
    // hold out the trailing 10% (at least one example) as dev
    const std::size_t n = corpus.train.size();
    const std::size_t n_dev = std::max<std::size_t>(1, n / 10);
    if (n_dev >= n) {
      throw std::invalid_argument("train: corpus too small to split off a dev set");
    }
    corpus.dev.assign(corpus.train.end() - static_cast<std::ptrdiff_t>(n_dev),
                      corpus.train.end());
    corpus.train.resize(n - n_dev);
  }

  const Model model = train_model(head_kind_from_string(head_name), cfg, corpus, dim);
  json manifest_cfg;
  manifest_cfg["head"] = head_name;
  manifest_cfg["encoder_dim"] = dim;
  manifest_cfg["train"] = {{"batch_size", cfg.batch_size},
                           {"max_epochs", cfg.max_epochs},
                           {"patience", cfg.patience},
                           {"lr_pretrained", cfg.lr_pretrained},
                           {"lr_new", cfg.lr_new}};
  emit(model_to_json(model), out, g, {corpus_path, dev_path, config_path}, manifest_cfg);
  return 0;
}

// ------------------------------------------------------------------- eval
std::vector<std::pair<std::string, std::string>> read_id_value_tsv(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  bool first = true;
  for (const auto& line : read_lines(path)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::invalid_argument(path + ": expected TSV columns id, value");
    }
    std::string id = line.substr(0, tab);
    std::string value = line.substr(tab + 1);
    if (first && id == "id") {  // optional header
      first = false;
      continue;
    }
    first = false;
    rows.emplace_back(std::move(id), std::move(value));
  }
  return rows;
}

int cmd_eval(const GlobalOpts& g, const std::string& pred_path, const std::string& truth_path,
             const std::string& out) {
  const auto pred_rows = read_id_value_tsv(pred_path);
  const auto truth_rows = read_id_value_tsv(truth_path);
  if (pred_rows.size() != truth_rows.size()) {
    throw std::invalid_argument("eval: length mismatch between predictions (" +
                                std::to_string(pred_rows.size()) + ") and truths (" +
                                std::to_string(truth_rows.size()) + ")");
  }
  std::vector<std::optional<double>> preds;
  std::vector<double> truths;
  for (std::size_t i = 0; i < pred_rows.size(); ++i) {
    if (pred_rows[i].first != truth_rows[i].first) {
      throw std::invalid_argument("eval: id mismatch at row " + std::to_string(i + 1) +
                                  ": '" + pred_rows[i].first + "' vs '" +
                                  truth_rows[i].first + "'");
    }
    const std::string& ps = pred_rows[i].second;
    double pv = 0;
    auto res = std::from_chars(ps.data(), ps.data() + ps.size(), pv);
    if (res.ec != std::errc{} || res.ptr != ps.data() + ps.size() || pv < kMinValue ||
        pv > kMaxValue) {
      preds.emplace_back(std::nullopt);  // unparseable prediction counts toward NA
    } else {
      preds.emplace_back(pv);
    }
    const std::string& ts = truth_rows[i].second;
    double tv = 0;
    auto tres = std::from_chars(ts.data(), ts.data() + ts.size(), tv);
    if (tres.ec != std::errc{} || tres.ptr != ts.data() + ts.size()) {
      throw std::invalid_argument("eval: bad truth value '" + ts + "' at row " +
                                  std::to_string(i + 1));
    }
    truths.push_back(tv);
  }

  EvalOptions opts;
  opts.seed = g.seed;
  const EvalReport r = evaluate(preds, truths, opts);
  json j;
  j["n"] = r.n;
  j["n_valid"] = r.n_valid;
  j["e_acc"] = r.e_acc;
  j["e_acc_ci_halfwidth"] = r.e_acc_ci_halfwidth;
  j["log_mae"] = r.log_mae;
  j["na_fraction"] = r.na_fraction;
  j["bootstrap_var_log_mae"] = r.bootstrap_var_log_mae;
  j["status"] = r.na_status ? "na" : "ok";
  emit(j.dump(2) + "\n", out, g, {pred_path, truth_path}, json::object());
  return 0;
}

// ------------------------------------------------------------- experiment
int cmd_experiment(const GlobalOpts& g, const std::string& config_path, std::string out,
                   std::string table_path, const std::string& dump_corpus,
                   bool seed_given) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  if (!config_path.empty()) {
    cfg = experiment_config_from_json(read_file(config_path));
  }
  if (seed_given) cfg.seed = g.seed;
  if (out.empty()) out = "report.json";
  if (table_path.empty()) {
    table_path = out;
    const std::size_t dot = table_path.rfind(".json");
    if (dot != std::string::npos && dot == table_path.size() - 5) {
      table_path.resize(dot);
    }
    table_path += ".tsv";
  }

  if (!dump_corpus.empty()) {
    const Corpus corpus = gen_corpus(cfg.corpus, cfg.seed);
    save_jsonl(corpus.train, dump_corpus + ".train.jsonl");
    save_jsonl(corpus.dev, dump_corpus + ".dev.jsonl");
    save_jsonl(corpus.test, dump_corpus + ".test.jsonl");
  }

  const ExperimentReport report = run_experiment(cfg);
  const json cfg_json = json::parse(experiment_config_to_json(cfg));
  write_file_atomic(out, experiment_report_to_json(report));
  write_manifest(g, out, {config_path}, cfg_json);
  write_file_atomic(table_path, experiment_table_tsv(report));
  return 0;
}

// ---------------------------------------------------------------- analyze
int cmd_analyze_mantissa(const GlobalOpts& g, const std::string& file, int n_bins,
                         const std::string& out, const std::string& svg_path) {
  const auto values = read_number_column(file);
  const MantissaHistogram hist = mantissa_histogram(values, n_bins);
  json cfg;
  cfg["bins"] = n_bins;
  emit(histogram_csv(hist), out, g, {file}, cfg);
  if (!svg_path.empty()) write_file_atomic(svg_path, histogram_svg(hist));
  return 0;
}

// ------------------------------------------------------------------ probe
int cmd_probe(const GlobalOpts& g, const std::string& activations_path,
              const std::string& labels_path, int target, int k, bool binary, int curve_top,
              const std::string& out) {
  const ActivationMatrix m = binary ? read_activations_binary(activations_path)
                                    : read_activations_text(activations_path);
  std::vector<int> labels;
  for (const auto& line : read_lines(labels_path)) {
    if (line.empty()) continue;
    labels.push_back(std::stoi(line));
  }
  const auto results = neuron_pr(m, labels, target, k);

  json j;
  j["target_exponent"] = target;
  j["k"] = k;
  j["n_rows"] = m.rows;
  j["n_neurons"] = m.cols;
  j["results"] = json::array();
  for (const auto& r : results) {
    json row;
    row["neuron"] = r.neuron;
    row["precision"] = r.precision;
    row["recall"] = r.recall;
    row["f1"] = r.f1;
    row["triggered"] = r.triggered;
    row["hits"] = r.hits;
    row["positives"] = r.positives;
    j["results"].push_back(std::move(row));
  }
  j["pr_curves"] = json::object();
  for (int i = 0; i < curve_top && i < static_cast<int>(results.size()); ++i) {
    const int neuron = results[static_cast<std::size_t>(i)].neuron;
    json pts = json::array();
    for (const auto& [p, r] : neuron_pr_curve(m, labels, target, neuron)) {
      pts.push_back(json::array({p, r}));
    }
    j["pr_curves"][std::to_string(neuron)] = std::move(pts);
  }
  json cfg;
  cfg["target"] = target;
  cfg["k"] = k;
  cfg["curve_top"] = curve_top;
  emit(j.dump(2) + "\n", out, g, {activations_path, labels_path}, cfg);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  GlobalOpts g;
  for (int i = 0; i < argc; ++i) g.argv.emplace_back(argv[i]);

  CLI::App app{"number-aware tokenization and masked-number-prediction toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags parse on either side of the subcommand
  app.add_option("--seed", g.seed, "global random seed (all randomness flows from it)");

  // extract
  std::string ex_file, ex_out;
  auto* extract_cmd = app.add_subcommand("extract", "extract numeric literals from a JSONL corpus");
  extract_cmd->add_option("file", ex_file, "JSONL file with a 'text' field per line")->required();
  extract_cmd->add_option("--out", ex_out, "output TSV path (stdout when omitted)");

  // tokenize
  std::string tok_file, tok_scheme = "digits", tok_sep, tok_out;
  int tok_pad = 0;
  auto* tokenize_cmd = app.add_subcommand("tokenize", "render numbers as notation token sequences");
  tokenize_cmd->add_option("file", tok_file, "file with one number per line")->required();
  tokenize_cmd->add_option("--scheme", tok_scheme, "digits|scientific|numbert|decimal");
  tokenize_cmd->add_option("--pad", tok_pad, "pad length (scheme default when omitted)");
  tokenize_cmd->add_option("--sep", tok_sep, "numbert exponent separator ([EXP] or x)");
  tokenize_cmd->add_option("--out", tok_out, "output TSV path");

  // bins
  auto* bins_cmd = app.add_subcommand("bins", "equal-frequency bin vocabulary");
  bins_cmd->require_subcommand(1);
  std::string fit_file, fit_out;
  int fit_n = 21;
  auto* fit_cmd = bins_cmd->add_subcommand("fit", "fit equal-frequency bins");
  fit_cmd->add_option("file", fit_file, "file with one number per line")->required();
  fit_cmd->add_option("--n", fit_n, "number of bins");
  fit_cmd->add_option("--out", fit_out, "output JSON path");
  std::string assign_spec, assign_file, assign_out;
  auto* assign_cmd = bins_cmd->add_subcommand("assign", "assign values to fitted bins");
  assign_cmd->add_option("--spec", assign_spec, "bins JSON from 'bins fit'")->required();
  assign_cmd->add_option("file", assign_file, "file with one number per line")->required();
  assign_cmd->add_option("--out", assign_out, "output TSV path");

  // train
  std::string tr_head, tr_corpus, tr_dev, tr_config, tr_out;
  int tr_dim = 64;
  auto* train_cmd = app.add_subcommand("train", "train one decoder head on a JSONL corpus");
  train_cmd->add_option("--head", tr_head, "decoder head kind")->required();
  train_cmd->add_option("--corpus", tr_corpus, "training JSONL")->required();
  train_cmd->add_option("--dev", tr_dev, "dev JSONL (defaults to a trailing 10% split)");
  train_cmd->add_option("--config", tr_config, "experiment config JSON");
  train_cmd->add_option("--dim", tr_dim, "context encoder dimension");
  train_cmd->add_option("--out", tr_out, "model checkpoint path")->required();

  // eval
  std::string ev_pred, ev_truth, ev_out;
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against truths");
  eval_cmd->add_option("--pred", ev_pred, "predictions TSV (id, value)")->required();
  eval_cmd->add_option("--truth", ev_truth, "truths TSV (id, value)")->required();
  eval_cmd->add_option("--out", ev_out, "report JSON path");

  // experiment
  std::string xp_config, xp_out, xp_table, xp_dump;
  auto* experiment_cmd =
      app.add_subcommand("experiment", "train and compare every decoder head");
  experiment_cmd->add_option("--config", xp_config, "experiment config JSON");
  experiment_cmd->add_option("--out", xp_out, "report JSON path (default report.json)");
  experiment_cmd->add_option("--table", xp_table, "comparison table TSV path");
  experiment_cmd->add_option("--dump-corpus", xp_dump, "prefix for corpus JSONL dumps");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "corpus statistics");
  analyze_cmd->require_subcommand(1);
  std::string an_file, an_out, an_svg;
  int an_bins = 18;
  auto* mant_cmd = analyze_cmd->add_subcommand("mantissa", "mantissa histogram");
  mant_cmd->add_option("file", an_file, "file with one number per line")->required();
  mant_cmd->add_option("--bins", an_bins, "histogram bins over [1, 10)");
  mant_cmd->add_option("--out", an_out, "output CSV path");
  mant_cmd->add_option("--svg", an_svg, "optional SVG bar chart path");

  // probe
  std::string pr_act, pr_labels, pr_out;
  int pr_target = 3, pr_k = 50, pr_curves = 5;
  bool pr_binary = false;
  auto* probe_cmd = app.add_subcommand("probe", "neuron trigger precision/recall probe");
  probe_cmd->add_option("--activations", pr_act, "matrix file with 'N D' header")->required();
  probe_cmd->add_option("--labels", pr_labels, "one exponent label per line")->required();
  probe_cmd->add_option("--target", pr_target, "target exponent");
  probe_cmd->add_option("--k", pr_k, "trigger cutoff (top-k)");
  probe_cmd->add_flag("--binary", pr_binary, "matrix payload is little-endian doubles");
  probe_cmd->add_option("--curve-top", pr_curves, "emit PR curves for the top N neurons");
  probe_cmd->add_option("--out", pr_out, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*extract_cmd) {
      g.command = "extract";
      return cmd_extract(g, ex_file, ex_out);
    }
    if (*tokenize_cmd) {
      g.command = "tokenize";
      return cmd_tokenize(g, tok_file, tok_scheme, tok_pad, tok_sep, tok_out);
    }
    if (*fit_cmd) {
      g.command = "bins fit";
      return cmd_bins_fit(g, fit_file, fit_n, fit_out);
    }
    if (*assign_cmd) {
      g.command = "bins assign";
      return cmd_bins_assign(g, assign_spec, assign_file, assign_out);
    }
    if (*train_cmd) {
      g.command = "train";
      return cmd_train(g, tr_head, tr_corpus, tr_dev, tr_config, tr_dim, tr_out);
    }
    if (*eval_cmd) {
      g.command = "eval";
      return cmd_eval(g, ev_pred, ev_truth, ev_out);
    }
    if (*experiment_cmd) {
      g.command = "experiment";
      return cmd_experiment(g, xp_config, xp_out, xp_table, xp_dump,
                            app.count("--seed") > 0);
    }
    if (*mant_cmd) {
      g.command = "analyze mantissa";
      return cmd_analyze_mantissa(g, an_file, an_bins, an_out, an_svg);
    }
    if (*probe_cmd) {
      g.command = "probe";
      return cmd_probe(g, pr_act, pr_labels, pr_target, pr_k, pr_binary, pr_curves, pr_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}

}  // namespace numline
