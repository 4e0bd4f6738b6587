#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcm/pcm.hpp"

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pcm::Error("cannot open input file: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pcm::Error("cannot open output file: " + path);
  out << content;
  if (!out) throw pcm::Error("failed to write output file: " + path);
}

nlohmann::json classical_json(const pcm::ClassicalIndices& c) {
  return {{"ci", c.ci},   {"gci", c.gci}, {"hci", c.hci},          {"koczkodaj", c.koczkodaj},
          {"gw", c.gw},   {"re", c.re},   {"lambda_max", c.lambda_max}};
}

int run_analyze(const std::string& input, bool json, int precision, const pcm::IndexOptions& options) {
  pcm::PCMatrix m = pcm::parse_matrix(read_input(input));
  pcm::IndexReport report = pcm::analyze(m, options);
  if (json) {
    nlohmann::json j{{"n", report.n},
                     {"complete", report.complete},
                     {"tree_count", report.tree_count},
                     {"mii", report.mii},
                     {"kii", report.kii},
                     {"almost_consistent", report.almost_consistent},
                     {"classical", nullptr}};
    if (report.classical) j["classical"] = classical_json(*report.classical);
    std::cout << j.dump() << '\n';
    return 0;
  }
  std::cout << "n " << report.n << '\n'
            << "complete " << (report.complete ? "true" : "false") << '\n'
            << "tree_count " << report.tree_count << '\n'
            << "MII " << fixed(report.mii, precision) << '\n'
            << "KII " << fixed(report.kii, precision) << '\n'
            << "almost_consistent " << (report.almost_consistent ? "true" : "false") << '\n';
  if (report.classical) {
    const pcm::ClassicalIndices& c = *report.classical;
    std::cout << "CI " << fixed(c.ci, precision) << '\n'
              << "GCI " << fixed(c.gci, precision) << '\n'
              << "HCI " << fixed(c.hci, precision) << '\n'
              << "K " << fixed(c.koczkodaj, precision) << '\n'
              << "GW " << fixed(c.gw, precision) << '\n'
              << "RE " << fixed(c.re, precision) << '\n'
              << "lambda_max " << fixed(c.lambda_max, precision) << '\n';
  }
  return 0;
}

int run_weights(const std::string& input, const std::string& method, bool json, int precision) {
  pcm::PCMatrix m = pcm::parse_matrix(read_input(input));
  std::vector<double> w;
  if (method == "east") {
    w = pcm::east_weights(m);
  } else if (method == "gmm") {
    w = pcm::gmm_weights(m);
  } else {
    w = pcm::evm_weights(m).weights;
  }
  if (json) {
    std::cout << nlohmann::json{{"method", method}, {"weights", w}}.dump() << '\n';
    return 0;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) std::cout << ' ';
    std::cout << fixed(w[i], precision);
  }
  std::cout << '\n';
  return 0;
}

int run_trees(const std::string& input, bool list, bool json) {
  pcm::PCMatrix m = pcm::parse_matrix(read_input(input));
  pcm::ComparisonGraph g = pcm::induce_graph(m);
  if (!pcm::is_connected(g)) throw pcm::DisconnectedGraphError();
  std::uint64_t count = pcm::count_spanning_trees(g);
  std::vector<pcm::SpanningTree> trees;
  if (list) trees = pcm::enumerate_spanning_trees(g);
  if (json) {
    nlohmann::json j{{"tree_count", count}};
    if (list) {
      nlohmann::json arr = nlohmann::json::array();
      for (const pcm::SpanningTree& t : trees) {
        nlohmann::json edges = nlohmann::json::array();
        for (const pcm::Edge& e : t) edges.push_back({e.u + 1, e.v + 1});
        arr.push_back(edges);
      }
      j["trees"] = arr;
    }
    std::cout << j.dump() << '\n';
    return 0;
  }
  std::cout << "spanning trees: " << count << '\n';
  for (const pcm::SpanningTree& t : trees) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) std::cout << ' ';
      std::cout << '(' << t[i].u + 1 << ',' << t[i].v + 1 << ')';
    }
    std::cout << '\n';
  }
  return 0;
}

int run_validate(const std::string& input, bool json) {
  pcm::ValidationReport report = pcm::validate_text(read_input(input));
  if (json) {
    nlohmann::json violations = nlohmann::json::array();
    for (const pcm::Violation& v : report.violations)
      violations.push_back({{"row", v.row}, {"col", v.col}, {"description", v.description}});
    nlohmann::json j{{"complete", report.complete},
                     {"connected", report.connected},
                     {"violations", violations}};
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "complete " << (report.complete ? "true" : "false") << '\n'
              << "connected " << (report.connected ? "true" : "false") << '\n'
              << "violations " << report.violations.size() << '\n';
    for (const pcm::Violation& v : report.violations)
      std::cout << "row " << v.row << " col " << v.col << ": " << v.description << '\n';
    std::cout << (report.ok() ? "valid" : "invalid") << '\n';
  }
  return report.ok() ? 0 : 1;
}

int run_simulate(const pcm::SeriesConfig& cfg, const std::string& out, const std::string& summary) {
  pcm::StudyResult result = pcm::run_study(cfg);
  write_output(out, pcm::per_matrix_csv(result));
  if (!summary.empty()) write_output(summary, pcm::summary_csv(result));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spanning-tree inconsistency indices for pairwise comparison matrices"};
  app.require_subcommand(1);

  std::string input = "-";
  bool json = false;
  int precision = 5;
  std::string gci = "simple";
  std::string gw = "gmm";
  std::string method = "east";
  bool list = false;

  pcm::SeriesConfig cfg;
  std::string out = "-";
  std::string summary;

  CLI::App* analyze = app.add_subcommand("analyze", "Inconsistency report for a matrix");
  analyze->add_option("input", input, "Input file (- for stdin)");
  analyze->add_flag("--json", json, "Emit JSON instead of text");
  analyze->add_option("--precision", precision, "Decimal places for text output")
      ->check(CLI::Range(0, 17));
  analyze->add_option("--gci-normalization", gci, "GCI normalization")
      ->check(CLI::IsMember({"simple", "dof"}));
  analyze->add_option("--gw-weights", gw, "Weight vector used by GW")
      ->check(CLI::IsMember({"gmm", "evm"}));

  CLI::App* weights = app.add_subcommand("weights", "Priority vector for a matrix");
  weights->add_option("input", input, "Input file (- for stdin)");
  weights->add_option("--method", method, "Weighting method")
      ->check(CLI::IsMember({"east", "evm", "gmm"}));
  weights->add_flag("--json", json, "Emit JSON instead of text");
  weights->add_option("--precision", precision, "Decimal places for text output")
      ->check(CLI::Range(0, 17));

  CLI::App* trees = app.add_subcommand("trees", "Spanning trees of the comparison graph");
  trees->add_option("input", input, "Input file (- for stdin)");
  trees->add_flag("--list", list, "List the trees, one per line");
  trees->add_flag("--json", json, "Emit JSON instead of text");

  CLI::App* validate = app.add_subcommand("validate", "Check matrix invariants");
  validate->add_option("input", input, "Input file (- for stdin)");
  validate->add_flag("--json", json, "Emit JSON instead of text");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo study over random matrices");
  simulate->add_option("--n", cfg.n, "Matrix size")->check(CLI::Range(3, 64));
  simulate->add_option("--per-series", cfg.matrices_per_series, "Matrices per series")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--series", cfg.series_count, "Number of series")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", cfg.seed, "Master seed");
  simulate->add_option("--threads", cfg.threads, "Worker threads (0 = auto)");
  simulate->add_option("--weight-low", cfg.weight_low, "Lower bound for generating-vector components");
  simulate->add_option("--weight-high", cfg.weight_high, "Upper bound for generating-vector components");
  simulate->add_flag("--uniform-factors", cfg.uniform_factors,
                     "Draw perturbation factors uniformly instead of log-uniformly");
  simulate->add_option("--out", out, "Per-matrix CSV path (- for stdout)");
  simulate->add_option("--summary", summary, "Per-series summary CSV path (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (analyze->parsed()) {
      pcm::IndexOptions options;
      options.gci_normalization =
          gci == "dof" ? pcm::GciNormalization::DegreesOfFreedom : pcm::GciNormalization::Simple;
      options.gw_weights =
          gw == "evm" ? pcm::GwWeightSource::Eigenvector : pcm::GwWeightSource::GeometricMean;
      return run_analyze(input, json, precision, options);
    }
    if (weights->parsed()) return run_weights(input, method, json, precision);
    if (trees->parsed()) return run_trees(input, list, json);
    if (validate->parsed()) return run_validate(input, json);
    if (simulate->parsed()) return run_simulate(cfg, out, summary);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
