#pragma once

// Command-line front end. run_cli is the whole program minus process setup,
// so tests can drive it with their own streams and transport.

#include <cstdlib>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wikimem/pipeline.hpp"

namespace wikimem {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNetwork = 3, kExitData = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::RateLimited:
    case ErrorKind::Transport:
    case ErrorKind::Truncated: return kExitNetwork;
    default: return kExitData;
  }
}

using TransportFactory = std::function<std::shared_ptr<HttpTransport>()>;

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                   const TransportFactory& transport_factory) {
  RunConfig cfg;
  std::string since = "2011-01-01", until = "2024-03-01", metric = "jaccard", k = "auto";
  std::string ego_config, endpoint;
  bool no_redirect_match = false;

  CLI::App app{"wikimem: collective-memory measures over Wikipedia revision histories"};
  app.name("wikimem");
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(std::string("Environment:\n  ") + kUserAgentEnv +
             "  User-Agent sent to the API, e.g. \"wikimem/1.0 (you@example.org)\"; required for network access\n"
             "Exit codes: 0 ok, 2 config error, 3 network error, 4 data error");

  app.add_option("--focal-en", cfg.focal_en, "English focal article title")->capture_default_str();
  app.add_option("--focal-ar", cfg.focal_ar, "Arabic focal article title")->capture_default_str();
  app.add_option("--since", since, "Start of the period (YYYY-MM[-DD[THH:MM:SSZ]])")->capture_default_str();
  app.add_option("--until", until, "End of the period (same formats)")->capture_default_str();
  app.add_option("--cache-dir", cfg.cache_dir, "Revision cache directory")->capture_default_str();
  app.add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  app.add_option("--metric", metric, "Row similarity for clustering")
      ->check(CLI::IsMember({"jaccard", "cosine"}))
      ->capture_default_str();
  app.add_option("--k", k, "Number of clusters: auto or an integer >= 2")->capture_default_str();
  app.add_option("--final-frac", cfg.thresholds.final_frac,
                 "Forgotten when a cluster's last count is at most this share of its peak")
      ->capture_default_str();
  app.add_option("--toggle-threshold", cfg.thresholds.toggles,
                 "Debated when members toggle at least this often on average")
      ->capture_default_str();
  app.add_option("--ego-config", ego_config, "YAML list of related articles (default: built-in list)");
  app.add_option("--endpoint", endpoint, "API endpoint template containing {lang}");
  app.add_option("--requests-per-second", cfg.requests_per_second, "API request ceiling")->capture_default_str();
  app.add_flag("--per-revision", cfg.per_revision, "One column per revision instead of per month");
  app.add_flag("--normalized", cfg.normalized, "Normalize figure value axes");
  app.add_flag("--fetch", cfg.fetch, "Let analysis commands fetch what the cache lacks");
  app.add_flag("--no-redirect-match", no_redirect_match, "Count only links to the focal title itself");

  std::vector<std::pair<CLI::App*, std::string>> commands = {
      {app.add_subcommand("fetch", "Download revisions, language links and redirects into the cache"), "fetch"},
      {app.add_subcommand("salience", "Article size and outlink count over time"), "salience"},
      {app.add_subcommand("deliberate", "Cluster outlinks by inclusion history"), "deliberate"},
      {app.add_subcommand("contextualize", "Outlinks by inter-language-link status"), "contextualize"},
      {app.add_subcommand("consolidate", "Related articles linking the focal article"), "consolidate"},
      {app.add_subcommand("report", "Write index.md with hashes of all outputs"), "report"},
      {app.add_subcommand("all", "Every construct, then the report"), "all"},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "wikimem: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    cfg.since = parse_timestamp(since);
    cfg.until = parse_timestamp(until);
    cfg.metric = parse_similarity_metric(metric);
    if (k != "auto") {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(k, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != k.size()) throw Error(ErrorKind::Config, "--k must be auto or an integer, got '" + k + "'");
      cfg.k = value;
    }
    if (!ego_config.empty()) cfg.ego_config = ego_config;
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    cfg.redirect_match = !no_redirect_match;
    if (const char* ua = std::getenv(kUserAgentEnv)) cfg.user_agent = ua;

    std::string command;
    for (const auto& [sub, name] : commands) {
      if (sub->parsed()) command = name;
    }
    Pipeline pipeline(cfg, transport_factory ? transport_factory() : nullptr, &err);
    if (command == "fetch") out << pipeline.cmd_fetch() << "\n";
    if (command == "salience") out << pipeline.cmd_salience() << "\n";
    if (command == "deliberate") out << pipeline.cmd_deliberate() << "\n";
    if (command == "contextualize") out << pipeline.cmd_contextualize() << "\n";
    if (command == "consolidate") out << pipeline.cmd_consolidate() << "\n";
    if (command == "report") out << pipeline.cmd_report() << "\n";
    if (command == "all") {
      for (const auto& line : pipeline.cmd_all()) out << line << "\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "wikimem: " << e.describe() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "wikimem: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace wikimem
