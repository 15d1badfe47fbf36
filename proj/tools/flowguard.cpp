// flowguard command-line front end.

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "flowguard/cashflow.hpp"
#include "flowguard/errors.hpp"
#include "flowguard/features.hpp"
#include "flowguard/gnn/checkpoint.hpp"
#include "flowguard/harness/experiment.hpp"
#include "flowguard/harness/synth.hpp"
#include "flowguard/service/bench.hpp"
#include "flowguard/service/pipeline.hpp"
#include "flowguard/service/server.hpp"
#include "flowguard/txparse.hpp"

namespace fs = std::filesystem;
using namespace flowguard;

namespace {

// Phase named in failure messages; each command advances it as it goes.
std::string g_phase = "setup";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

// "20:100:10" (inclusive range) or "20,40,60".
std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  try {
    if (text.find(':') != std::string::npos) {
      std::vector<int> p;
      std::stringstream ss(text);
      for (std::string f; std::getline(ss, f, ':');) p.push_back(std::stoi(f));
      if (p.size() != 3 || p[2] <= 0 || p[0] > p[1]) throw ConfigError("grid range must be lo:hi:step");
      for (int v = p[0]; v <= p[1]; v += p[2]) out.push_back(v);
    } else {
      std::stringstream ss(text);
      for (std::string f; std::getline(ss, f, ',');) out.push_back(std::stoi(f));
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad grid '" + text + "'");
  }
  if (out.empty()) throw ConfigError("empty grid '" + text + "'");
  return out;
}

std::string transfers_json(const TransferExtraction& ex) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : ex.transfers)
    arr.push_back({{"sender", t.sender.hex()},
                   {"receiver", t.receiver.hex()},
                   {"asset", t.asset.to_string()},
                   {"amount", u256_to_dec(t.amount)}});
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : ex.malformed_events) diags.push_back({{"log_index", d.log_index}, {"message", d.message}});
  return nlohmann::json{{"transfers", arr}, {"malformed_events", diags}}.dump(2);
}

std::string response_text(const service::ClassifyResponse& r) {
  std::string s = fmt::format(
      "tx_hash: {}\nprediction: {}\nscore: {:.6f}\n"
      "graph_stats: nodes={} edges={} assets={} max_node_degree={}\n"
      "timing_ms: parse={:.4f} build={:.4f} classify={:.4f} total={:.4f}\n",
      r.tx_hash, r.prediction, r.score, r.graph_stats.node_count, r.graph_stats.edge_count,
      r.graph_stats.asset_count, r.graph_stats.max_node_degree, r.timing.parse_ms, r.timing.build_ms,
      r.timing.classify_ms, r.timing.total_ms);
  if (r.no_transfers) s += "no_transfers: true\n";
  for (const auto& d : r.diagnostics) s += "diagnostic: " + d + "\n";
  return s;
}

struct ModelFlags {
  std::string arch = "graphsage";
  int layers = 2;
  int hidden = 16;
  std::string direction = "symmetrized";

  void add(CLI::App* app) {
    app->add_option("--arch", arch, "mlp, gcn, gat, gin or graphsage")
        ->check(CLI::IsMember({"mlp", "gcn", "gat", "gin", "graphsage", "sage"}, CLI::ignore_case))
        ->capture_default_str();
    app->add_option("--layers", layers, "graph layers")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--hidden", hidden, "hidden width")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--direction", direction, "message direction: symmetrized or forward")
        ->check(CLI::IsMember({"symmetrized", "forward"}))
        ->capture_default_str();
  }
  gnn::ModelConfig config() const {
    gnn::ModelConfig c;
    c.arch = gnn::arch_from_string(arch);
    c.num_layers = layers;
    c.hidden_dim = hidden;
    c.direction = gnn::direction_from_string(direction);
    return c;
  }
};

struct TrainFlags {
  gnn::TrainConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--epochs", cfg.epochs, "training epochs")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--train-size", cfg.train_size_per_class, "training graphs per class")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--lr", cfg.learning_rate, "Adam learning rate")->capture_default_str();
    app->add_option("--batch-size", cfg.batch_size, "graphs per step, 0 for full batch")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--seed", cfg.seed, "seed for split, initialization and ordering")->capture_default_str();
  }
};

// Every long option can also come from FLOWGUARD_<NAME>, e.g. --train-size
// from FLOWGUARD_TRAIN_SIZE.
void bind_environment(CLI::App* app) {
  for (auto* opt : app->get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names.front() == "help") continue;
    std::string env = "FLOWGUARD_" + names.front();
    for (auto& ch : env) ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    opt->envname(env);
  }
}

service::Server* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowguard: cash-flow graph classification of EVM transactions"};
  app.require_subcommand(1);
  app.footer(
      "Every long option may also be set through the environment as FLOWGUARD_<OPTION>,\n"
      "upper-cased with dashes as underscores (for example FLOWGUARD_MODEL, FLOWGUARD_TRAIN_SIZE).\n"
      "Command-line values take precedence.\n"
      "Exit status: 0 success, 1 operational failure, 2 usage error.");

  // parse
  std::string fixture, out;
  auto* parse_cmd = app.add_subcommand("parse", "Decode a fixture and print its transfers as JSON");
  parse_cmd->add_option("--fixture", fixture, "transaction fixture")->required();
  parse_cmd->add_option("--out", out, "output file (default stdout)");

  // build
  auto* build_cmd = app.add_subcommand("build", "Build the cash flow graph of a fixture");
  build_cmd->add_option("--fixture", fixture, "transaction fixture")->required();
  build_cmd->add_option("--out", out, "graph document (default stdout)");

  // featurize
  std::string graph_path, accounts_path;
  auto* feat_cmd = app.add_subcommand("featurize", "Attach the 8-column feature matrix to a graph");
  feat_cmd->add_option("--graph", graph_path, "graph document")->required();
  feat_cmd->add_option("--accounts", accounts_path, "contract account table (address -> verified)");
  feat_cmd->add_option("--out", out, "featurized graph (default stdout)");

  // train
  std::string data_dir, model_path, loss_csv, drop;
  ModelFlags model_flags;
  TrainFlags train_flags;
  auto* train_cmd = app.add_subcommand("train", "Train on a dataset directory and write a checkpoint");
  train_cmd->add_option("--data", data_dir, "dataset directory")->required();
  train_cmd->add_option("--out", model_path, "checkpoint path")->required();
  train_cmd->add_option("--loss-csv", loss_csv, "per-epoch loss CSV");
  train_cmd->add_option("--drop", drop, "feature families to drop: type,frequency,diversity,profit");
  model_flags.add(train_cmd);
  train_flags.add(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score every graph of a dataset with a checkpoint");
  eval_cmd->add_option("--model", model_path, "checkpoint")->required();
  eval_cmd->add_option("--data", data_dir, "dataset directory")->required();
  eval_cmd->add_option("--out", out, "metrics CSV (default stdout)");

  // ablate
  bool ablate_all = false;
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare the full feature set against masked variants");
  ablate_cmd->add_option("--data", data_dir, "dataset directory")->required();
  ablate_cmd->add_option("--drop", drop, "feature families to drop: type,frequency,diversity,profit");
  ablate_cmd->add_flag("--all", ablate_all, "run each single-family variant");
  ablate_cmd->add_option("--out", out, "metrics CSV (default stdout)");
  model_flags.add(ablate_cmd);
  train_flags.add(ablate_cmd);

  // sweep
  std::string epochs_grid = "20:100:10", sizes_grid = "20:100:10";
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate over an epoch x train-size grid");
  sweep_cmd->add_option("--data", data_dir, "dataset directory")->required();
  sweep_cmd->add_option("--epochs-grid", epochs_grid, "lo:hi:step or a comma list")->capture_default_str();
  sweep_cmd->add_option("--train-sizes", sizes_grid, "lo:hi:step or a comma list")->capture_default_str();
  sweep_cmd->add_option("--out", out, "grid CSV (default stdout)");
  model_flags.add(sweep_cmd);
  train_flags.add(sweep_cmd);

  // classify
  std::string tx_hash, rpc;
  bool as_json = false;
  auto* classify_cmd = app.add_subcommand("classify", "Classify one transaction");
  auto* fixture_opt = classify_cmd->add_option("--fixture", fixture, "transaction fixture");
  auto* hash_opt = classify_cmd->add_option("--tx-hash", tx_hash, "transaction hash to replay over RPC");
  classify_cmd->add_option("--rpc", rpc, "archive node JSON-RPC endpoint");
  classify_cmd->add_option("--model", model_path, "checkpoint")->required();
  classify_cmd->add_option("--accounts", accounts_path, "contract account table");
  classify_cmd->add_flag("--json", as_json, "print the response as JSON");
  fixture_opt->excludes(hash_opt);

  // serve
  service::ServerOptions server_opts;
  auto* serve_cmd = app.add_subcommand("serve", "Serve POST /classify and GET /health");
  serve_cmd->add_option("--model", model_path, "checkpoint")->required();
  serve_cmd->add_option("--accounts", accounts_path, "contract account table");
  serve_cmd->add_option("--host", server_opts.host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", server_opts.port, "bind port, 0 for any")->capture_default_str();
  serve_cmd->add_option("--max-body", server_opts.max_body_bytes, "request size limit in bytes")
      ->capture_default_str();
  serve_cmd->add_option("--rpc", rpc, "default endpoint for {tx_hash} requests");

  // bench
  service::BenchConfig bench_cfg;
  auto* bench_cmd = app.add_subcommand("bench", "Measure pipeline latency on random transactions");
  bench_cmd->add_option("--model", model_path, "checkpoint (default: untrained graphsage)");
  bench_cmd->add_option("--graphs", bench_cfg.graphs, "transactions to classify")->capture_default_str();
  bench_cmd->add_option("--nodes", bench_cfg.nodes, "accounts per transaction")->capture_default_str();
  bench_cmd->add_option("--extra-transfers", bench_cfg.extra_transfers, "transfers beyond the spanning ones")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_cfg.seed, "generator seed")->capture_default_str();

  // synth
  harness::SynthConfig synth_cfg;
  std::string family = "profit_cycle";
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labeled dataset directory");
  synth_cmd->add_option("--family", family, "profit_cycle, frequency_burst, diversity_spread or structure_only")
      ->check(CLI::IsMember({"profit_cycle", "frequency_burst", "diversity_spread", "structure_only"}))
      ->capture_default_str();
  synth_cmd->add_option("--positives", synth_cfg.positives, "positive graphs")->capture_default_str();
  synth_cmd->add_option("--negatives", synth_cfg.negatives, "negative graphs")->capture_default_str();
  synth_cmd->add_option("--min-nodes", synth_cfg.min_nodes, "smallest graph")->capture_default_str();
  synth_cmd->add_option("--max-nodes", synth_cfg.max_nodes, "largest graph")->capture_default_str();
  synth_cmd->add_option("--seed", synth_cfg.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--out", data_dir, "dataset directory")->required();

  for (auto* sub : app.get_subcommands({})) bind_environment(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (parse_cmd->parsed()) {
      g_phase = "parse";
      write_output(out, transfers_json(extract_transfers_detailed(parse_fixture(read_file(fixture)))));
    } else if (build_cmd->parsed()) {
      g_phase = "parse";
      const auto transfers = extract_transfers(parse_fixture(read_file(fixture)));
      g_phase = "build";
      write_output(out, graph_to_json(construct_graph(transfers)));
    } else if (feat_cmd->parsed()) {
      g_phase = "build";
      const auto db = accounts_path.empty() ? AccountDb{} : AccountDb::load(accounts_path);
      write_output(out, graph_to_json(assemble_features(graph_from_json(read_file(graph_path)), db)));
    } else if (train_cmd->parsed()) {
      g_phase = "load";
      const auto data = harness::load_dataset(data_dir);
      g_phase = "train";
      const auto mask = harness::AblationMask::without(drop);
      const auto r = harness::run_experiment(data, mask, model_flags.config(), train_flags.cfg);
      gnn::save_checkpoint(r.checkpoint, model_path);
      if (!loss_csv.empty()) {
        std::string csv = "epoch,loss\n";
        for (std::size_t i = 0; i < r.epoch_loss.size(); ++i)
          csv += fmt::format("{},{:.17g}\n", i + 1, r.epoch_loss[i]);
        write_output(loss_csv, csv);
      }
      std::cerr << "held-out " << harness::metrics_csv_header() << '\n'
                << "held-out " << harness::metrics_csv_row(r.metrics) << '\n';
    } else if (eval_cmd->parsed()) {
      g_phase = "load";
      const auto ckpt = gnn::load_checkpoint(model_path);
      const auto data = harness::load_dataset(data_dir);
      g_phase = "eval";
      const auto e = harness::evaluate_checkpoint(ckpt, data);
      write_output(out, harness::metrics_csv_header() + "\n" + harness::metrics_csv_row(e.metrics) + "\n");
    } else if (ablate_cmd->parsed()) {
      g_phase = "load";
      const auto data = harness::load_dataset(data_dir);
      g_phase = "train";
      std::vector<harness::AblationMask> masks{harness::AblationMask{}};
      if (ablate_all) {
        for (const char* f : {"type", "frequency", "diversity", "profit"})
          masks.push_back(harness::AblationMask::without(f));
      } else if (!drop.empty()) {
        masks.push_back(harness::AblationMask::without(drop));
      }
      std::string csv = "variant,input_dim," + harness::metrics_csv_header() + "\n";
      for (const auto& m : masks)
        csv += fmt::format("{},{},{}\n", m.name(), m.width(),
                           harness::metrics_csv_row(
                               harness::ablation_run(data, m, model_flags.config(), train_flags.cfg)));
      write_output(out, csv);
    } else if (sweep_cmd->parsed()) {
      g_phase = "load";
      const auto data = harness::load_dataset(data_dir);
      g_phase = "train";
      const auto cells = harness::sweep(data, parse_grid(epochs_grid), parse_grid(sizes_grid), model_flags.config(),
                                        train_flags.cfg);
      write_output(out, harness::sweep_csv(cells));
    } else if (classify_cmd->parsed()) {
      g_phase = "load";
      const auto clf = service::Classifier::load(
          model_path, accounts_path.empty() ? std::nullopt : std::optional<fs::path>(accounts_path));
      service::ClassifyResponse r;
      if (!fixture.empty()) {
        g_phase = "parse";
        const auto bytes = read_file(fixture);
        r = clf.classify_fixture(bytes);
      } else if (!tx_hash.empty()) {
        if (rpc.empty()) throw InputError("--tx-hash needs --rpc");
        r = clf.classify_remote(rpc, tx_hash);
      } else {
        std::cerr << "error: classify needs --fixture or --tx-hash\n\n" << classify_cmd->help();
        return 2;
      }
      std::cout << (as_json ? service::response_to_json(r) + "\n" : response_text(r));
    } else if (serve_cmd->parsed()) {
      g_phase = "load";
      auto clf = std::make_shared<const service::Classifier>(service::Classifier::load(
          model_path, accounts_path.empty() ? std::nullopt : std::optional<fs::path>(accounts_path)));
      if (!rpc.empty()) server_opts.rpc_endpoint = rpc;
      g_phase = "serve";
      service::Server server(clf, server_opts);
      const int port = server.bind();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << fmt::format("listening on {}:{} (model {})\n", server_opts.host, port,
                               clf->checkpoint_digest());
      server.run();
      g_server = nullptr;
    } else if (bench_cmd->parsed()) {
      g_phase = "load";
      gnn::Checkpoint ckpt;
      if (model_path.empty()) {
        ckpt.params = gnn::ModelParams::init(gnn::ModelConfig{}, 42);
        for (int c = 0; c < feature_col::kWidth; ++c) ckpt.feature_columns.push_back(c);
      } else {
        ckpt = gnn::load_checkpoint(model_path);
      }
      g_phase = "bench";
      std::cout << service::bench_report_text(service::run_bench(ckpt, bench_cfg));
    } else if (synth_cmd->parsed()) {
      g_phase = "synth";
      synth_cfg.family = harness::synth_family_from_string(family);
      harness::save_dataset(harness::synth_dataset(synth_cfg), data_dir);
    }
  } catch (const service::PhaseError& e) {
    std::cerr << fmt::format("error [{}]: {}: {}\n", e.phase(), e.kind(), e.message());
    return 1;
  } catch (const Error& e) {
    std::cerr << fmt::format("error [{}]: {}: {}\n", g_phase, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::cerr << fmt::format("error [{}]: {}\n", g_phase, e.what());
    return 1;
  }
  return 0;
}
