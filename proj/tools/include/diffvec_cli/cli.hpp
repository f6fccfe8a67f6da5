#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffvec/embedding_store.hpp"
#include "diffvec/spectral_clustering.hpp"

namespace diffvec::cli {

struct RunConfig {
  std::string command;  // "embed-inspect", "build-svd", "cluster", ...

  std::filesystem::path embeddings;
  std::filesystem::path triples;
  std::filesystem::path freq;
  std::filesystem::path annotations;
  std::filesystem::path corpus;
  std::filesystem::path model;
  std::filesystem::path model_out;
  std::filesystem::path out;

  EmbeddingFormat format = EmbeddingFormat::text;
  bool lowercase = false;
  bool normalize = true;
  std::optional<double> scale_std;
  std::uint64_t seed = 1;
  std::vector<std::string> warnings;

  // cluster / baseline
  std::vector<std::size_t> k_values = {10, 20, 30, 40, 50, 60, 70, 80};
  double dev_fraction = 0.15;
  std::size_t subsample_cap = 4000;
  std::size_t restarts = 10;
  std::size_t clusters = 50;
  Similarity measure = Similarity::rbf;
  double cluster_gamma = 1.0;

  // classifiers
  std::size_t folds = 10;
  double C = 1.0;
  double gamma = 0.0;
  bool with_negatives = false;
  double train_fraction = 2.0 / 3.0;
  bool stratify = true;
  std::size_t lexicon_size = 500;
  double random_ratio = 1.0;
  std::vector<std::size_t> multipliers = {0, 1, 2, 3, 4, 5};
  double test_word_fraction = 1.0 / 3.0;

  // build-svd
  std::size_t dim = 300;
  std::size_t window = 2;
  double cds = 0.75;
  double shift = 1.0;
  double eig_weight = 0.5;
  std::uint64_t min_count = 5;
  std::size_t max_vocab = 0;
  EmbeddingFormat out_format = EmbeddingFormat::text;

  // synth
  std::size_t synth_relations = 9;
  std::size_t synth_classes = 6;
  std::size_t synth_dim = 50;
  std::size_t synth_pairs = 60;
  double synth_word_noise = 0.5;
  double synth_pair_noise = 0.05;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  std::optional<RunConfig> config;  // empty when help was requested
  std::string help;
};

// Throws UsageError for unknown flags, missing required flags, malformed
// values and paths that do not resolve. `env_seed` is the DIFFVEC_SEED value.
ParseResult parse_args(const std::vector<std::string>& args, const std::optional<std::string>& env_seed = {});

// Full help text: every subcommand with its flags.
std::string help_text();

// Executes a parsed command. Returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses "lo:hi:step" or a comma-separated list.
std::vector<std::size_t> parse_range(const std::string& spec);

}  // namespace diffvec::cli
