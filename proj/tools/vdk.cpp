// vdk: viewpoint diversity reports for reply-tree conversations.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vdk/report.hpp"

namespace {

void add_run_options(CLI::App& cmd, vdk::RunConfig& cfg, std::string& labels) {
  cmd.add_option("--topic", cfg.topic, "Topic tag written into every report row")->required();
  cmd.add_option("--tweets", cfg.tweets_path, "Tweets JSONL file")->required();
  cmd.add_option("--labels", labels, "Labels file (CSV or JSONL: tweet_id,relevance,claim)");
  cmd.add_option("--out", cfg.output_dir, "Output directory")->required();
  cmd.add_option("--max-size", cfg.max_tweets_per_conversation,
                 "Maximum tweets kept per conversation")
      ->capture_default_str();
  cmd.add_option("--min-authors", cfg.min_authors, "Minimum distinct authors per conversation")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reply-tree reconstruction and viewpoint diversity metrics"};
  app.require_subcommand(1);

  vdk::RunConfig cfg;
  std::string labels;
  std::string variant = "both";
  std::string self_replies = "true";

  auto* analyze = app.add_subcommand("analyze", "Full report set: stats, metrics, dyadic");
  add_run_options(*analyze, cfg, labels);
  analyze->add_option("--bin-width", cfg.bin_width, "Histogram bin width")->capture_default_str();
  analyze->add_option("--variant", variant, "both|with-l1|without-l1")
      ->check(CLI::IsMember({"both", "with-l1", "without-l1"}))
      ->capture_default_str();
  analyze->add_option("--dyadic-self-replies", self_replies,
                      "Count self-replies in dyadic conditionals")
      ->check(CLI::IsMember({"true", "false"}))
      ->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Structural statistics only (stats.csv)");
  add_run_options(*stats, cfg, labels);

  std::string synth_config;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic JSONL corpus");
  synth->add_option("--config", synth_config, "Generator config JSON")->required();
  synth->add_option("--out", synth_out, "Output JSONL path")->required();

  CLI11_PARSE(app, argc, argv);

  if (!labels.empty()) cfg.labels_path = labels;
  cfg.variants = vdk::parse_variant_selection(variant);
  cfg.include_self_replies_in_dyadic = self_replies == "true";

  if (*analyze) return vdk::cmd_analyze(cfg);
  if (*stats) return vdk::cmd_stats(cfg);
  return vdk::cmd_synth(synth_config, synth_out);
}
