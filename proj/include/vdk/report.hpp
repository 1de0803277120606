#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vdk/conversation.hpp"
#include "vdk/dyadic.hpp"
#include "vdk/ingest.hpp"
#include "vdk/metrics.hpp"

namespace vdk {

enum class VariantSelection { both, with_l1, without_l1 };

VariantSelection parse_variant_selection(std::string_view s);
std::vector<Variant> variants_of(VariantSelection s);

struct RunConfig {
  std::string topic;
  std::filesystem::path tweets_path;
  std::optional<std::filesystem::path> labels_path;
  std::filesystem::path output_dir;
  std::size_t max_tweets_per_conversation = kDefaultMaxNodes;
  std::size_t min_authors = 2;
  double bin_width = kDefaultBinWidth;
  VariantSelection variants = VariantSelection::both;
  bool include_self_replies_in_dyadic = true;
};

void validate(const RunConfig& config);

struct VariantReport {
  Variant variant = Variant::with_l1;
  std::vector<FragmentationScore> fragmentation;
  FragmentationTally fragmentation_tally;
  LabelDistribution pool;
  std::vector<RepresentationScore> representation;
  std::size_t representation_undefined = 0;
  Histogram fragmentation_hist;
  Histogram representation_hist;
};

struct PipelineDiagnostics {
  IngestDiagnostics ingest;
  ReconstructionDiagnostics reconstruction;
  std::size_t ineligible_conversations = 0;
  std::size_t capped_conversations = 0;
  std::size_t capped_tweets_dropped = 0;
};

struct AnalysisReport {
  std::string topic;
  std::vector<ConversationTree> trees;  // eligible and capped
  CorpusStats stats;
  std::vector<VariantReport> variants;
  DyadicMatrix dyadic;
  PipelineDiagnostics diagnostics;
  std::vector<std::string> sources;
  std::string ingested_at;
};

// Reconstruct, filter, cap. Shared by analyze and stats.
std::vector<ConversationTree> prepare_trees(const Corpus& corpus, const RunConfig& config,
                                            PipelineDiagnostics& diagnostics);

AnalysisReport analyze(const Corpus& corpus, const RunConfig& config);

// File name -> contents for every report file of the analyze command.
std::map<std::string, std::string> render_reports(const AnalysisReport& report);

std::string fragmentation_csv(const AnalysisReport& report);
std::string representation_csv(const AnalysisReport& report);
std::string diagnostics_json(const AnalysisReport& report);

// Writes all files to temporaries inside `dir` first, then renames them into
// place. On failure no new file is left behind.
void write_files_atomically(const std::filesystem::path& dir,
                            const std::map<std::string, std::string>& files);

// Command entry points. Return the process exit status; errors are reported
// as a single JSON line on stderr.
int cmd_analyze(const RunConfig& config);
int cmd_stats(const RunConfig& config);
int cmd_synth(const std::filesystem::path& config_path, const std::filesystem::path& out_path);

std::string error_json(std::string_view kind, std::string_view message);

}  // namespace vdk
