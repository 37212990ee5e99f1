#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chainforge {

struct CorpusOptions {
  std::uint64_t seed = 0;
  std::vector<std::size_t> circle_sizes{12, 24, 48};
  std::vector<std::size_t> torus_sizes{3, 4, 5, 6};
  std::size_t random_metrics = 4;
};

struct CorpusFile {
  std::string name;
  std::string kind;
  /// "euclidean" or "unit" for meshes, empty otherwise
  std::string edge_metric;
  std::string bytes;
};

/// Deterministic instance set; identical bytes for identical options.
std::vector<CorpusFile> corpus_files(const CorpusOptions& options);

/// Writes every file plus manifest.json (names, kinds, SHA-256) into dir.
std::vector<CorpusFile> write_corpus(const CorpusOptions& options, const std::string& dir);

}  // namespace chainforge
