// Command-line front end: ingestion -> model search -> report, plus trial
// simulation and figure-data emission.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "coe/coe.hpp"

namespace {

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("COE_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[coe] " << msg << '\n';
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(cell, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != cell.size() || cell.empty())
      throw coe::config_error(what + ": not an integer: '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw coe::config_error(what + ": empty list");
  return out;
}

coe::target_spec target_from_json(const nlohmann::json& j, const std::string& origin) {
  coe::target_spec target;
  try {
    if (!j.contains("covariates")) throw coe::config_error(origin + ": target needs covariates");
    target.covariates = j["covariates"].get<std::vector<int>>();
    if (j.contains("desire")) target.desire = j["desire"].get<int>();
    if (j.contains("response")) target.response = j["response"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw coe::config_error(origin + ": " + e.what());
  }
  return target;
}

// Accepts a comma list of levels ("1,0,1"), inline JSON ("{...}"), or a path
// to a JSON file (optionally prefixed with @). Desire and response default
// to 1: the analysis asks about a treated, desiring responder.
coe::target_spec parse_target(const std::string& text) {
  if (text.empty()) throw coe::config_error("--target: empty specification");
  if (text.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw coe::config_error(std::string("--target: ") + e.what());
    }
    return target_from_json(j, "--target");
  }
  const std::string path = text.front() == '@' ? text.substr(1) : text;
  if (text.front() == '@' || std::filesystem::exists(path)) {
    std::ifstream in(path);
    if (!in) throw coe::config_error("--target: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw coe::config_error(path + ": " + e.what());
    }
    return target_from_json(j, path);
  }
  coe::target_spec target;
  target.covariates = parse_int_list(text, "--target");
  return target;
}

// Options shared by analyze, enumerate, sample, and figure diagnostics.
// A JSON config file may supply any of them; explicit flags win.
struct analysis_cli {
  std::string config_path;
  std::string data_path;
  std::string target_text;
  std::string cardinalities_text;
  std::string prior_text = "uniform";
  std::string search_text = "enumerate";
  std::string estimator_text = "posterior-mean";
  std::int64_t iterations = 10000;
  std::int64_t burn_in = -1;
  std::uint64_t seed = 0;
  int chains = 1;
  int top = 10;
  std::string out_path;

  CLI::Option* data_opt = nullptr;
  CLI::Option* target_opt = nullptr;
  CLI::Option* cardinalities_opt = nullptr;
  CLI::Option* prior_opt = nullptr;
  CLI::Option* search_opt = nullptr;
  CLI::Option* estimator_opt = nullptr;
  CLI::Option* iterations_opt = nullptr;
  CLI::Option* burn_in_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* chains_opt = nullptr;
  CLI::Option* top_opt = nullptr;
  CLI::Option* out_opt = nullptr;

  void attach(CLI::App* cmd, bool with_search) {
    cmd->add_option("--config", config_path, "JSON config file; explicit flags win");
    data_opt = cmd->add_option("--data", data_path, "Trial CSV (header id,T,E,R,H1..Hk)");
    target_opt = cmd->add_option(
        "--target", target_text, "Target individual: comma list of levels, inline JSON, or file");
    cardinalities_opt = cmd->add_option("--cardinalities", cardinalities_text,
                                        "Comma list of per-covariate level counts");
    prior_opt = cmd->add_option("--prior", prior_text, "Model prior: uniform | chen-chen")
                    ->check(CLI::IsMember({"uniform", "chen-chen"}));
    if (with_search) {
      search_opt = cmd->add_option("--search", search_text, "Search mode: enumerate | mh")
                       ->check(CLI::IsMember({"enumerate", "mh"}));
    }
    estimator_opt =
        cmd->add_option("--estimator", estimator_text, "RR estimator: posterior-mean | mle")
            ->check(CLI::IsMember({"posterior-mean", "mle"}));
    iterations_opt = cmd->add_option("--iterations", iterations, "MH iterations per chain");
    burn_in_opt =
        cmd->add_option("--burn-in", burn_in, "MH burn-in per chain (default: 10% of iterations)");
    seed_opt = cmd->add_option("--seed", seed, "MH seed");
    chains_opt = cmd->add_option("--chains", chains, "MH chain count");
    top_opt = cmd->add_option("--top", top, "Rows in the report");
    out_opt = cmd->add_option("--out", out_path, "Output path (default: stdout)");
  }

  // Fills every knob whose flag was not given from the config file.
  void merge_config() {
    if (config_path.empty()) return;
    std::ifstream in(config_path);
    if (!in) throw coe::config_error("cannot open " + config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw coe::config_error(config_path + ": " + e.what());
    }
    try {
      auto take_string = [&](CLI::Option* opt, const char* key, std::string& slot) {
        if ((!opt || opt->count() == 0) && j.contains(key)) slot = j[key].get<std::string>();
      };
      take_string(data_opt, "data", data_path);
      take_string(cardinalities_opt, "cardinalities", cardinalities_text);
      take_string(prior_opt, "prior", prior_text);
      take_string(search_opt, "search", search_text);
      take_string(estimator_opt, "estimator", estimator_text);
      take_string(out_opt, "out", out_path);
      if (target_opt->count() == 0 && j.contains("target")) {
        if (j["target"].is_string())
          target_text = j["target"].get<std::string>();
        else
          target_text = j["target"].dump();
      }
      if (iterations_opt->count() == 0 && j.contains("iterations"))
        iterations = j["iterations"].get<std::int64_t>();
      if (burn_in_opt->count() == 0 && j.contains("burn_in"))
        burn_in = j["burn_in"].get<std::int64_t>();
      if (seed_opt->count() == 0 && j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
      if (chains_opt->count() == 0 && j.contains("chains")) chains = j["chains"].get<int>();
      if (top_opt->count() == 0 && j.contains("top")) top = j["top"].get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw coe::config_error(config_path + ": " + e.what());
    }
    if (prior_text != "uniform" && prior_text != "chen-chen")
      throw coe::config_error(config_path + ": prior must be uniform or chen-chen");
    if (search_text != "enumerate" && search_text != "mh")
      throw coe::config_error(config_path + ": search must be enumerate or mh");
    if (estimator_text != "posterior-mean" && estimator_text != "mle")
      throw coe::config_error(config_path + ": estimator must be posterior-mean or mle");
  }

  coe::dataset load() const {
    if (data_path.empty()) throw coe::config_error("--data is required");
    if (target_text.empty()) throw coe::config_error("--target is required");
    coe::load_options opts;
    opts.target = parse_target(target_text);
    if (!cardinalities_text.empty())
      opts.cardinalities = parse_int_list(cardinalities_text, "--cardinalities");
    coe::dataset data = coe::load_dataset(data_path, opts);
    log_info("loaded " + data_path + ": n=" + std::to_string(data.records.size()) +
             ", k=" + std::to_string(data.num_covariates()));
    return data;
  }

  coe::prior_kind prior_kind_value() const {
    return prior_text == "uniform" ? coe::prior_kind::uniform : coe::prior_kind::chen_chen;
  }

  coe::search_kind search_kind_value() const {
    return search_text == "enumerate" ? coe::search_kind::enumerate : coe::search_kind::mh;
  }

  coe::estimator_kind estimator_kind_value() const {
    return estimator_text == "posterior-mean" ? coe::estimator_kind::posterior_mean
                                              : coe::estimator_kind::mle;
  }

  coe::posterior_table run_search(const coe::dataset& data) const {
    const coe::model_prior prior{prior_kind_value(), data.num_covariates()};
    if (search_kind_value() == coe::search_kind::enumerate) {
      log_info("enumerating 2^" + std::to_string(data.num_covariates()) + " models");
      return coe::enumerate_posterior(data, prior);
    }
    coe::mh_options mh;
    mh.iterations = iterations;
    mh.burn_in = burn_in;
    mh.seed = seed;
    mh.chains = chains;
    log_info("sampling " + std::to_string(chains) + " chain(s) x " + std::to_string(iterations) +
             " iterations");
    return coe::mh_sample(data, prior, mh);
  }

  coe::analysis_settings settings() const {
    coe::analysis_settings s;
    s.prior = prior_kind_value();
    s.search = search_kind_value();
    s.estimator = estimator_kind_value();
    s.top_m = top;
    if (search_kind_value() == coe::search_kind::mh) {
      s.iterations = iterations;
      s.burn_in = burn_in >= 0 ? burn_in : iterations / 10;
      s.seed = seed;
      s.chains = chains;
    }
    return s;
  }
};

void write_text(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw coe::data_error("cannot write " + out_path);
  out << content;
  log_info("wrote " + out_path);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Covariate selection and causation bounds for randomized trials"};
  app.require_subcommand(1);

  analysis_cli analyze_cli;
  auto* analyze = app.add_subcommand("analyze", "Full pipeline: search models, report estimates");
  analyze_cli.attach(analyze, /*with_search=*/true);

  analysis_cli enum_cli;
  auto* enumerate = app.add_subcommand("enumerate", "Exhaustive posterior over all models");
  enum_cli.attach(enumerate, /*with_search=*/false);

  analysis_cli sample_cli;
  auto* sample = app.add_subcommand("sample", "Metropolis-Hastings posterior over models");
  sample_cli.attach(sample, /*with_search=*/false);

  std::string sim_config_path;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic trial CSV");
  simulate->add_option("--config", sim_config_path, "Generator config JSON")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Override the config seed");
  simulate->add_option("--out", sim_out, "Output CSV path")->required();

  auto* figure = app.add_subcommand("figure", "Emit figure data as CSV");
  figure->require_subcommand(1);

  std::int64_t hyper_n00 = 0, hyper_n01 = 0;
  std::string hyper_out;
  auto* hypergeom = figure->add_subcommand("hypergeom", "Untreated-split factor over a count grid");
  hypergeom->add_option("n00", hyper_n00, "Untreated non-desiring group size")->required();
  hypergeom->add_option("n01", hyper_n01, "Untreated desiring group size")->required();
  hypergeom->add_option("--out", hyper_out, "Output path (default: stdout)");

  analysis_cli diag_cli;
  auto* diagnostics = figure->add_subcommand("diagnostics", "Per-model condition diagnostics");
  diag_cli.attach(diagnostics, /*with_search=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (analyze->parsed()) {
    analyze_cli.merge_config();
    const coe::dataset data = analyze_cli.load();
    const coe::posterior_table table = analyze_cli.run_search(data);
    const coe::analysis_report rep = coe::build_report(data, table, analyze_cli.settings());
    write_text(analyze_cli.out_path, coe::to_json(rep).dump(2) + "\n");
    return 0;
  }
  if (enumerate->parsed()) {
    enum_cli.merge_config();
    enum_cli.search_text = "enumerate";
    const coe::dataset data = enum_cli.load();
    const coe::posterior_table table = enum_cli.run_search(data);
    write_text(enum_cli.out_path, coe::to_json(table).dump(2) + "\n");
    return 0;
  }
  if (sample->parsed()) {
    sample_cli.merge_config();
    sample_cli.search_text = "mh";
    const coe::dataset data = sample_cli.load();
    const coe::posterior_table table = sample_cli.run_search(data);
    // A stochastic run keeps its provenance: full report, not a bare table.
    const coe::analysis_report rep = coe::build_report(data, table, sample_cli.settings());
    write_text(sample_cli.out_path, coe::to_json(rep).dump(2) + "\n");
    return 0;
  }
  if (simulate->parsed()) {
    coe::generator_config cfg = coe::load_generator_config(sim_config_path);
    const std::uint64_t seed = sim_seed_opt->count() > 0 ? sim_seed : cfg.seed;
    const coe::dataset data = coe::simulate_trial(cfg, seed);
    coe::write_dataset(data, sim_out);
    log_info("wrote " + sim_out + ": n=" + std::to_string(data.records.size()));
    return 0;
  }
  if (hypergeom->parsed()) {
    std::ostringstream grid;
    coe::write_hypergeom_grid(hyper_n00, hyper_n01, grid);
    write_text(hyper_out, grid.str());
    return 0;
  }
  if (diagnostics->parsed()) {
    diag_cli.merge_config();
    const coe::dataset data = diag_cli.load();
    const coe::posterior_table table = diag_cli.run_search(data);
    std::ostringstream rows;
    coe::write_diagnostics_csv(data, table, rows);
    write_text(diag_cli.out_path, rows.str());
    return 0;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const coe::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const coe::data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const coe::cap_error& e) {
    std::cerr << "cap exceeded: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
