#include "mixscope/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "mixscope/dot.hpp"
#include "mixscope/error.hpp"
#include "mixscope/expansion.hpp"
#include "mixscope/heuristics.hpp"
#include "mixscope/manifest.hpp"
#include "mixscope/matcher.hpp"
#include "mixscope/peeling.hpp"
#include "mixscope/serialize.hpp"
#include "mixscope/simulator.hpp"
#include "mixscope/taint.hpp"

namespace mixscope::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Run {
 public:
  Run(std::string name, std::ostream& out, std::ostream& err)
      : manifest(std::move(name)), out_(out), err_(err) {}

  RunManifest manifest;
  std::string out_path;
  std::string manifest_path;

  TransactionGraph graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    manifest.add_input(path);
    auto g = ingest_ndjson(in);
    spdlog::info("loaded {} transactions from {}", g.size(), path);
    return g;
  }

  std::string input(const std::string& path) {
    auto text = read_file(path);
    manifest.add_input(path);
    return text;
  }

  /// Txids given inline, or files holding a JSON array, an object with a
  /// "members" or "mixing_txs" array, or one txid per line.
  std::vector<TxId> txids(const std::vector<std::string>& values) {
    std::vector<TxId> out;
    for (const auto& v : values) {
      if (TxId::valid(v)) {
        out.emplace_back(v);
        continue;
      }
      const auto text = input(v);
      const auto first = text.find_first_not_of(" \t\r\n");
      if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
          throw DataError(v + ": " + e.what());
        }
        if (doc.is_object()) {
          if (doc.contains("members")) doc = doc["members"];
          else if (doc.contains("mixing_txs")) doc = doc["mixing_txs"];
        }
        if (!doc.is_array()) throw DataError(v + ": expected an array of txids");
        for (const auto& item : doc) {
          if (!item.is_string()) throw DataError(v + ": expected an array of txids");
          out.emplace_back(item.get<std::string>());
        }
        continue;
      }
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.emplace_back(line.substr(b, e - b + 1));
      }
    }
    return out;
  }

  void emit(const std::string& contents) {
    if (out_path.empty()) {
      out_ << contents;
      return;
    }
    write_atomic(out_path, contents);
    manifest.add_output(out_path, contents);
  }

  void emit_json(const Json& doc) { emit(doc.dump(2) + "\n"); }

  void write(const std::string& path, const std::string& contents) {
    write_atomic(path, contents);
    manifest.add_output(path, contents);
  }

  void finish() {
    const auto doc = manifest.to_json().dump(2) + "\n";
    std::string path = manifest_path;
    if (path.empty() && !out_path.empty()) path = out_path + ".manifest.json";
    if (path.empty()) {
      err_ << manifest.to_json().dump() << '\n';
      return;
    }
    write_atomic(path, doc);
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

Amount btc_flag(const std::string& text, const char* flag) {
  try {
    return parse_btc(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("mixscope", sink);
  logger->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("MIXSCOPE_LOG")) {
    const std::string v = env;
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  logger->set_level(level);
  spdlog::set_default_logger(logger);
}

void snapshot_config(const CLI::App& sub, RunManifest& manifest) {
  for (const auto* opt : sub.get_options()) {
    const auto name = opt->get_single_name();
    if (name.empty() || name == "help") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      manifest.config()[name] = r.size() == 1 ? Json(r.front()) : Json(r);
    } else {
      manifest.config()[name] = opt->get_default_str();
    }
  }
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging(err);

  CLI::App app{"mixscope: analysis of mixing services on a UTXO transaction graph", "mixscope"};
  app.require_subcommand(1);

  std::string graph_path, out_path, manifest_path;
  auto common = [&](CLI::App* sub, bool needs_graph) {
    if (needs_graph) sub->add_option("--graph", graph_path, "Transaction NDJSON file")->required();
    sub->add_option("--out", out_path, "Write the result here instead of stdout");
    sub->add_option("--manifest", manifest_path, "Run manifest path");
  };

  std::size_t min_set_size = 2;
  auto set_size_flag = [&](CLI::App* sub) {
    sub->add_option("--min-set-size", min_set_size, "Smallest anonymity set")->capture_default_str();
  };
  auto heuristics = [&] {
    HeuristicsConfig cfg;
    cfg.min_set_size = min_set_size;
    return cfg;
  };

  std::function<void(Run&)> action;

  // ingest-check
  auto* ingest = app.add_subcommand("ingest-check", "Validate and summarize a transaction file");
  common(ingest, true);
  ingest->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      std::size_t coinbase = 0;
      for (const auto& tx : g.transactions()) coinbase += tx.is_coinbase();
      Json doc{{"transactions", g.size()}, {"blocks", g.block_times().size()},
               {"coinbase", coinbase}};
      if (!g.empty()) {
        doc["first_height"] = g.transactions().front().block_height;
        doc["last_height"] = g.transactions().back().block_height;
      }
      run.emit_json(doc);
    };
  });

  // simulate
  SimConfig sim;
  std::string sim_chip_unit = "0.001";
  bool same_type = false, no_links = false;
  std::string sim_dir;
  auto* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic corpus with ground truth");
  simulate_cmd->add_option("--seed", sim.rng_seed, "RNG seed")->capture_default_str();
  simulate_cmd->add_option("--out", sim_dir, "Output directory")->required();
  simulate_cmd->add_option("--manifest", manifest_path, "Run manifest path");
  simulate_cmd->add_option("--chip-mixes", sim.chip_mixes)->capture_default_str();
  simulate_cmd->add_option("--coinjoin-rounds", sim.coinjoin_rounds)->capture_default_str();
  simulate_cmd->add_option("--peeling-chains", sim.peeling_chains)->capture_default_str();
  simulate_cmd->add_option("--background", sim.background_txs)->capture_default_str();
  simulate_cmd->add_option("--converter-deposits", sim.converter_deposits)->capture_default_str();
  simulate_cmd->add_option("--converter-payouts", sim.converter_payouts)->capture_default_str();
  simulate_cmd->add_option("--chip-unit", sim_chip_unit, "Chip unit in BTC")->capture_default_str();
  simulate_cmd->add_option("--isolated-fraction", sim.isolated_fraction,
                           "Share of mixes never co-spent with another mix")
      ->capture_default_str();
  simulate_cmd->add_option("--unspent-chip-fraction", sim.unspent_chip_fraction)->capture_default_str();
  simulate_cmd->add_option("--chain-min", sim.chain_length.first)->capture_default_str();
  simulate_cmd->add_option("--chain-max", sim.chain_length.second)->capture_default_str();
  simulate_cmd->add_option("--record-jitter", sim.record_jitter, "Seconds")->capture_default_str();
  simulate_cmd->add_option("--txs-per-block", sim.txs_per_block)->capture_default_str();
  simulate_cmd->add_option("--hack-targets", sim.hack_targets,
                           "Chip mixes receiving a fanned-out hack deposit")
      ->capture_default_str();
  simulate_cmd->add_flag("--same-type-addresses", same_type, "Service and users share address types");
  simulate_cmd->add_flag("--no-links", no_links, "Do not co-spend chips across mixes");
  simulate_cmd->callback([&] {
    action = [&](Run& run) {
      sim.chip_unit = btc_flag(sim_chip_unit, "--chip-unit");
      sim.address_type_disjoint = !same_type;
      sim.connected_mixes = !no_links;
      const auto result = simulate(sim);
      std::ostringstream txs;
      write_ndjson(result, txs);
      Rng jitter_rng(sim.rng_seed + 1);
      std::string records;
      for (const auto& r : emit_convert_records(result.truth, sim.record_jitter, jitter_rng))
        records += record_to_json(r) + "\n";
      run.write(sim_dir + "/txs.ndjson", txs.str());
      run.write(sim_dir + "/groundtruth.json", to_json(result.truth).dump(2) + "\n");
      run.write(sim_dir + "/records.ndjson", records);
      if (run.manifest_path.empty()) run.manifest_path = sim_dir + "/manifest.json";
      spdlog::info("simulated {} transactions", result.transactions.size());
    };
  });

  // detect-sets
  std::vector<std::string> txid_args;
  auto* detect = app.add_subcommand("detect-sets", "List anonymity sets");
  common(detect, true);
  set_size_flag(detect);
  detect->add_option("--txid", txid_args, "Transactions or txid files (default: all)");
  detect->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      const auto cfg = heuristics();
      cfg.validate();
      Json doc = Json::array();
      auto report = [&](const Transaction& tx) {
        const auto sets = detect_anonymity_sets(tx, cfg);
        if (sets.empty()) return;
        Json arr = Json::array();
        for (const auto& s : sets) arr.push_back(to_json(s));
        doc.push_back(Json{{"txid", tx.txid.str()}, {"sets", std::move(arr)}});
      };
      if (txid_args.empty()) {
        for (const auto& tx : g.transactions()) report(tx);
      } else {
        for (const auto& id : run.txids(txid_args)) report(g.get(id));
      }
      run.emit_json(doc);
    };
  });

  // classify
  auto* classify = app.add_subcommand("classify", "Classify the mixing mechanism of sample transactions");
  common(classify, true);
  set_size_flag(classify);
  classify->add_option("--samples", txid_args, "Sample txids or txid files")->required();
  classify->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      const auto samples = run.txids(txid_args);
      run.emit_json(to_json(classify_mechanism(samples, g, heuristics())));
    };
  });

  // expand
  auto* expand = app.add_subcommand("expand", "Grow a mixing transaction set from seeds");
  common(expand, true);
  set_size_flag(expand);
  expand->add_option("--seeds", txid_args, "Seed txids or txid files")->required();
  expand->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      const auto seeds = run.txids(txid_args);
      const auto result = seed_expand(g, seeds, heuristics());
      spdlog::info("expansion reached {} members", result.members.size());
      run.emit_json(to_json(result));
    };
  });

  // chains
  PeelingConfig peel;
  auto* chains = app.add_subcommand("chains", "Reconstruct peeling chains");
  common(chains, true);
  chains->add_option("--txid", txid_args, "Transactions in chains, or txid files")->required();
  chains->add_option("--many-inputs", peel.many_inputs_threshold, "Collector input threshold")
      ->capture_default_str();
  chains->add_option("--max-chain-length", peel.max_chain_length)->capture_default_str();
  chains->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      std::vector<PeelingChain> found;
      std::set<TxId> starts;
      for (const auto& id : run.txids(txid_args)) {
        const auto start = find_starting_point(g, id, peel);
        if (starts.insert(start).second) found.push_back(extend_chain(g, start, peel));
      }
      const auto ends = find_ending_points(g, found, peel);
      Json arr = Json::array();
      for (const auto& c : found) arr.push_back(to_json(c));
      Json collectors = Json::object();
      for (const auto& [collector, idx] : group_by_collector(ends)) collectors[collector.str()] = idx;
      run.emit_json(Json{{"chains", std::move(arr)}, {"collectors", std::move(collectors)}});
    };
  });

  // trace
  TaintConfig taint;
  std::string root, min_output = "0.9";
  auto* trace = app.add_subcommand("trace", "Trace tainted funds into a mixing set");
  common(trace, true);
  trace->add_option("--root", root, "Source transaction")->required();
  trace->add_option("--mixing", txid_args, "Mixing txids or txid files")->required();
  trace->add_option("--max-depth", taint.max_depth, "Hops from the root")->capture_default_str();
  trace->add_option("--min-output", min_output, "Smallest followed output in BTC")
      ->capture_default_str();
  trace->callback([&] {
    action = [&](Run& run) {
      taint.min_output = btc_flag(min_output, "--min-output");
      const auto g = run.graph(graph_path);
      const auto mixing = run.txids(txid_args);
      run.emit_json(to_json(trace_taint(g, TxId(root), mixing, taint)));
    };
  });

  // profit
  std::string chip_unit = "0.001";
  std::vector<std::string> fee_addresses;
  std::optional<double> common_fraction;
  auto* profit = app.add_subcommand("profit", "Estimate service income per month");
  common(profit, true);
  profit->add_option("--mixers", txid_args, "Mixing txids or txid files")->required();
  profit->add_option("--chip-unit", chip_unit, "Chip unit in BTC")->capture_default_str();
  profit->add_option("--fee-address", fee_addresses, "Sum outputs to these addresses instead");
  profit->add_option("--common-outputs", common_fraction,
                     "List output addresses present in at least this share of transactions");
  profit->callback([&] {
    action = [&](Run& run) {
      const auto unit = btc_flag(chip_unit, "--chip-unit");
      const auto g = run.graph(graph_path);
      const auto txs = run.txids(txid_args);
      if (common_fraction) {
        Json arr = Json::array();
        for (const auto& [addr, count] : common_output_addresses(g, txs, *common_fraction))
          arr.push_back(Json{{"address", addr}, {"count", count}});
        run.emit_json(Json{{"addresses", std::move(arr)}});
      } else if (!fee_addresses.empty()) {
        run.emit_json(to_json(estimate_address_fees(g, fee_addresses, txs)));
      } else {
        run.emit_json(to_json(estimate_pwyw_fees(g, txs, unit)));
      }
    };
  });

  // match
  MatcherConfig matcher;
  std::string records_path, reverse, service_file;
  std::vector<std::uint32_t> legacy;
  auto* match = app.add_subcommand("match", "Match convert records to transactions");
  common(match, true);
  match->add_option("--records", records_path, "Convert record NDJSON")->required();
  match->add_option("--window-blocks", matcher.window_blocks, "Odd window width in blocks")
      ->capture_default_str();
  match->add_option("--legacy-deltas", legacy, "AFTER BEFORE block offsets")->expected(2);
  match->add_option("--tolerance", matcher.value_tolerance, "Value tolerance in satoshis")
      ->capture_default_str();
  match->add_option("--reverse", reverse, "Only records converting into this currency");
  match->add_option("--service-addresses", service_file, "Known service addresses, one per line");
  match->callback([&] {
    action = [&](Run& run) {
      if (!legacy.empty()) matcher.legacy_deltas = std::pair{legacy[0], legacy[1]};
      const auto g = run.graph(graph_path);
      std::istringstream rec_in(run.input(records_path));
      const auto records = read_records(rec_in);
      AddressValidator validator = unknown_validator();
      if (!service_file.empty()) {
        auto known = std::make_shared<std::set<std::string, std::less<>>>();
        std::istringstream lines(run.input(service_file));
        std::string line;
        while (std::getline(lines, line))
          if (!line.empty()) known->insert(line);
        validator = [known](std::string_view a) {
          return known->count(a) ? Validation::Service : Validation::NotService;
        };
      }
      const auto results = reverse.empty()
                               ? match_records(g, records, matcher, validator)
                               : reverse_match(g, records, reverse, matcher, validator);
      std::size_t matched = 0;
      Json arr = Json::array();
      for (const auto& r : results) {
        matched += r.status != MatchStatus::Rejected;
        arr.push_back(Json::parse(match_result_to_json(r)));
      }
      run.emit_json(Json{{"records", results.size()}, {"matched", matched}, {"results", std::move(arr)}});
    };
  });

  // export-dot
  std::string taint_path, chain_txid;
  auto* dot = app.add_subcommand("export-dot", "Write an analysis subgraph as Graphviz DOT");
  common(dot, true);
  auto* dot_taint = dot->add_option("--taint", taint_path, "Taint report JSON");
  auto* dot_chain = dot->add_option("--chain", chain_txid, "Any transaction of a peeling chain");
  auto* dot_members = dot->add_option("--members", txid_args, "Member txids or txid files");
  dot_taint->excludes(dot_chain)->excludes(dot_members);
  dot_chain->excludes(dot_members);
  dot->add_option("--many-inputs", peel.many_inputs_threshold)->capture_default_str();
  dot->callback([&] {
    action = [&](Run& run) {
      const auto g = run.graph(graph_path);
      if (!taint_path.empty()) {
        nlohmann::json doc;
        try {
          doc = nlohmann::json::parse(run.input(taint_path));
        } catch (const nlohmann::json::exception& e) {
          throw DataError(taint_path + ": " + e.what());
        }
        run.emit(taint_to_dot(taint_report_from_json(doc)));
      } else if (!chain_txid.empty()) {
        auto chain = extend_chain(g, find_starting_point(g, TxId(chain_txid), peel), peel);
        run.emit(chain_to_dot(g, chain));
      } else if (!txid_args.empty()) {
        run.emit(members_to_dot(g, run.txids(txid_args)));
      } else {
        throw UsageError("export-dot needs one of --taint, --chain or --members");
      }
    };
  });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto* failing = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failing->help();
    return 1;
  }

  const auto* sub = app.get_subcommands().front();
  Run run(sub->get_name(), out, err);
  run.out_path = out_path;
  run.manifest_path = manifest_path;
  try {
    snapshot_config(*sub, run.manifest);
    action(run);
    run.finish();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const AnalysisError& e) {
    err << "analysis error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

int cli_dispatch(int argc, char** argv) {
  return cli_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace mixscope::cli
