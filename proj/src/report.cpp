#include "vdk/report.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include <json.hpp>

#include "format.hpp"
#include "vdk/exposure.hpp"
#include "vdk/log.hpp"
#include "vdk/synth.hpp"

namespace vdk {
namespace {

using ojson = nlohmann::ordered_json;

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void emit_ingest_summary(const Corpus& corpus) {
  if (!log().should_log(spdlog::level::info)) return;
  std::cerr << diagnostics_json(corpus.diagnostics) << '\n';
}

int report_error(std::string_view kind, std::string_view message) {
  std::cerr << error_json(kind, message) << '\n';
  return 1;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    return report_error(to_string(e.kind()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return report_error("io", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
}

}  // namespace

VariantSelection parse_variant_selection(std::string_view s) {
  if (s == "both") return VariantSelection::both;
  if (s == "with-l1" || s == "with_l1") return VariantSelection::with_l1;
  if (s == "without-l1" || s == "without_l1") return VariantSelection::without_l1;
  throw Error(ErrorKind::config, "unknown variant '" + std::string(s) + "'");
}

std::vector<Variant> variants_of(VariantSelection s) {
  switch (s) {
    case VariantSelection::with_l1:
      return {Variant::with_l1};
    case VariantSelection::without_l1:
      return {Variant::without_l1};
    case VariantSelection::both:
      break;
  }
  return {Variant::with_l1, Variant::without_l1};
}

void validate(const RunConfig& config) {
  if (config.max_tweets_per_conversation < 2) {
    throw Error(ErrorKind::config, "--max-size must be at least 2");
  }
  if (config.min_authors < 1) throw Error(ErrorKind::config, "--min-authors must be at least 1");
  bin_count_for(config.bin_width);
}

std::vector<ConversationTree> prepare_trees(const Corpus& corpus, const RunConfig& config,
                                            PipelineDiagnostics& diagnostics) {
  auto rebuilt = build_conversations(corpus);
  diagnostics.reconstruction = rebuilt.diagnostics;

  std::vector<ConversationTree> capped;
  capped.reserve(rebuilt.trees.size());
  for (const auto& tree : rebuilt.trees) {
    auto t = cap_size(tree, config.max_tweets_per_conversation);
    if (t.size() < tree.size()) {
      ++diagnostics.capped_conversations;
      diagnostics.capped_tweets_dropped += tree.size() - t.size();
    }
    capped.push_back(std::move(t));
  }
  const std::size_t before = capped.size();
  auto eligible = filter_eligible(std::move(capped), config.min_authors);
  diagnostics.ineligible_conversations = before - eligible.size();
  return eligible;
}

AnalysisReport analyze(const Corpus& corpus, const RunConfig& config) {
  validate(config);
  AnalysisReport report;
  report.topic = config.topic.empty() ? corpus.topic : config.topic;
  report.sources = corpus.sources;
  report.ingested_at = corpus.ingested_at;
  report.diagnostics.ingest = corpus.diagnostics;
  report.trees = prepare_trees(corpus, config, report.diagnostics);
  report.stats = corpus_stats(report.trees);

  std::vector<ViewpointMatrix> matrices;
  matrices.reserve(report.trees.size());
  for (const auto& tree : report.trees) {
    matrices.push_back(build_viewpoint_matrix(build_viewpoint_network(tree)));
  }

  for (Variant v : variants_of(config.variants)) {
    VariantReport vr;
    vr.variant = v;
    const bool exclude = excludes_l1(v);

    std::vector<double> defined_frag;
    for (const auto& m : matrices) {
      for (auto& s : fragmentation_scores(m, exclude, &vr.fragmentation_tally)) {
        if (s.defined) defined_frag.push_back(s.score);
        vr.fragmentation.push_back(std::move(s));
      }
    }
    vr.fragmentation_hist = histogram(defined_frag, config.bin_width);

    vr.pool = pool_distribution(report.trees, exclude);
    vr.representation = representation_scores(report.trees, vr.pool, exclude);
    std::vector<double> defined_rep;
    for (const auto& s : vr.representation) {
      if (s.defined) {
        defined_rep.push_back(s.score);
      } else {
        ++vr.representation_undefined;
      }
    }
    vr.representation_hist = histogram(defined_rep, config.bin_width);
    report.variants.push_back(std::move(vr));
  }

  report.dyadic =
      dyadic_conditionals(report.trees, kStanceLabels, config.include_self_replies_in_dyadic);
  return report;
}

std::string fragmentation_csv(const AnalysisReport& report) {
  std::string out = "topic,conversation_id,author_id,score,defined,variant\n";
  const std::string topic = csv_field(report.topic);
  for (const auto& vr : report.variants) {
    const std::string variant(to_string(vr.variant));
    for (const auto& s : vr.fragmentation) {
      out += topic + ',' + csv_field(s.conversation_id) + ',' + csv_field(s.author_id) + ',' +
             (s.defined ? detail::format_double(s.score) : std::string()) + ',' +
             (s.defined ? "true" : "false") + ',' + variant + '\n';
    }
  }
  return out;
}

std::string representation_csv(const AnalysisReport& report) {
  std::string out = "topic,conversation_id,raw_kl,score,variant\n";
  const std::string topic = csv_field(report.topic);
  for (const auto& vr : report.variants) {
    const std::string variant(to_string(vr.variant));
    for (const auto& s : vr.representation) {
      out += topic + ',' + csv_field(s.conversation_id) + ',';
      if (s.defined) {
        out += detail::format_double(s.raw_kl) + ',' + detail::format_double(s.score);
      } else {
        out += ',';
      }
      out += ',' + variant + '\n';
    }
  }
  return out;
}

std::string diagnostics_json(const AnalysisReport& report) {
  const auto& d = report.diagnostics;
  ojson obj;
  obj["topic"] = report.topic;
  obj["ingest"] = {{"lines", d.ingest.lines},
                   {"unlabeled", d.ingest.unlabeled},
                   {"labels_read", d.ingest.labels_read},
                   {"labels_unmatched", d.ingest.labels_unmatched}};
  obj["conversations"] = {{"groups", d.reconstruction.conversation_groups},
                          {"discarded_components", d.reconstruction.discarded_components},
                          {"discarded_tweets", d.reconstruction.discarded_tweets},
                          {"capped", d.capped_conversations},
                          {"capped_tweets_dropped", d.capped_tweets_dropped},
                          {"ineligible", d.ineligible_conversations},
                          {"eligible", report.trees.size()}};

  ojson frag = ojson::object();
  ojson rep = ojson::object();
  for (const auto& vr : report.variants) {
    const std::string key(to_string(vr.variant));
    frag[key] = {{"scores", vr.fragmentation.size()},
                 {"defined", vr.fragmentation_tally.defined},
                 {"undefined_zero_exposure", vr.fragmentation_tally.zero_exposure},
                 {"undefined_lone_user", vr.fragmentation_tally.lone_user}};
    double max_kl = 0.0;
    for (const auto& s : vr.representation) {
      if (s.defined) max_kl = std::max(max_kl, s.raw_kl);
    }
    ojson pool = ojson::object();
    for (std::size_t i = 0; i < vr.pool.labels.size(); ++i) {
      pool[std::string(to_string(vr.pool.labels[i]))] = vr.pool.probabilities[i];
    }
    rep[key] = {{"conversations", vr.representation.size()},
                {"undefined", vr.representation_undefined},
                {"max_raw_kl", max_kl},
                {"pool", vr.pool.empty() ? ojson(nullptr) : pool}};
  }
  obj["fragmentation"] = std::move(frag);
  obj["representation"] = std::move(rep);
  obj["dyadic"] = {{"n_qualifying_edges", report.dyadic.n_qualifying_edges}};

  ojson notes = ojson::array();
  if (report.trees.empty()) notes.push_back("zero eligible conversations");
  obj["notes"] = std::move(notes);
  // The only non-deterministic field; excluded from reproducibility checks.
  obj["provenance"] = {{"sources", report.sources}, {"ingested_at_utc", report.ingested_at}};
  return obj.dump(2) + "\n";
}

std::map<std::string, std::string> render_reports(const AnalysisReport& report) {
  std::map<std::string, std::string> files;
  files["stats.csv"] = stats_csv_header() + stats_csv_row(report.topic, report.stats);
  files["fragmentation.csv"] = fragmentation_csv(report);
  files["representation.csv"] = representation_csv(report);

  std::string frag_hist = histogram_csv_header();
  std::string rep_hist = histogram_csv_header();
  for (const auto& vr : report.variants) {
    frag_hist += histogram_csv_rows(vr.fragmentation_hist, vr.variant, "fragmentation");
    rep_hist += histogram_csv_rows(vr.representation_hist, vr.variant, "representation");
  }
  files["fragmentation_hist.csv"] = std::move(frag_hist);
  files["representation_hist.csv"] = std::move(rep_hist);
  files["dyadic.json"] = dyadic_json(report.dyadic) + "\n";
  files["diagnostics.json"] = diagnostics_json(report);
  return files;
}

void write_files_atomically(const std::filesystem::path& dir,
                            const std::map<std::string, std::string>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string suffix = ".tmp-" + std::to_string(::getpid());

  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  try {
    for (const auto& [name, contents] : files) {
      fs::path tmp = dir / ("." + name + suffix);
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << contents;
      out.close();
      if (!out) throw Error(ErrorKind::io, "failed writing " + tmp.string());
    }
    std::size_t i = 0;
    for (const auto& [name, contents] : files) fs::rename(temps[i++], dir / name);
  } catch (...) {
    cleanup();
    throw;
  }
}

std::string error_json(std::string_view kind, std::string_view message) {
  ojson obj = {{"error", kind}, {"message", message}};
  return obj.dump();
}

int cmd_analyze(const RunConfig& config) {
  return guarded([&] {
    validate(config);
    Corpus corpus = load_corpus(config.tweets_path, config.labels_path, config.topic);
    emit_ingest_summary(corpus);
    AnalysisReport report = analyze(corpus, config);
    write_files_atomically(config.output_dir, render_reports(report));
    log().debug("wrote reports for {} conversations to {}", report.trees.size(),
                config.output_dir.string());
  });
}

int cmd_stats(const RunConfig& config) {
  return guarded([&] {
    validate(config);
    Corpus corpus = load_corpus(config.tweets_path, config.labels_path, config.topic);
    emit_ingest_summary(corpus);
    PipelineDiagnostics diag;
    auto trees = prepare_trees(corpus, config, diag);
    write_files_atomically(config.output_dir,
                           {{"stats.csv", stats_csv_header() +
                                              stats_csv_row(config.topic, corpus_stats(trees))}});
  });
}

int cmd_synth(const std::filesystem::path& config_path, const std::filesystem::path& out_path) {
  return guarded([&] {
    auto cfg = synth::load_config(config_path);
    auto tweets = synth::generate(cfg);

    std::ostringstream body;
    synth::write_jsonl(body, tweets);
    auto dir = out_path.parent_path().empty() ? std::filesystem::path(".") : out_path.parent_path();
    write_files_atomically(dir, {{out_path.filename().string(), body.str()}});

    std::array<std::size_t, kNumLabels> counts{};
    std::size_t roots = 0;
    for (const auto& t : tweets) {
      ++counts[index_of(t.label)];
      if (!t.parent_id) ++roots;
    }
    ojson shares = ojson::object();
    for (Label l : kAllLabels) {
      shares[std::string(to_string(l))] =
          tweets.empty() ? 0.0
                         : static_cast<double>(counts[index_of(l)]) /
                               static_cast<double>(tweets.size());
    }
    ojson summary = {{"n_tweets", tweets.size()},
                     {"n_conversations", roots},
                     {"label_shares", std::move(shares)}};
    std::cout << summary.dump() << '\n';
  });
}

}  // namespace vdk
