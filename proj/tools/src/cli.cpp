#include "diffvec_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "diffvec/error.hpp"
#include "diffvec/experiments.hpp"
#include "diffvec/ppmi_svd.hpp"
#include "diffvec/relation_dataset.hpp"
#include "diffvec/report.hpp"
#include "diffvec/synthetic.hpp"

namespace diffvec::cli {

namespace {

using nlohmann::json;

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty())
    throw UsageError("--seed: '" + text + "' is not an unsigned 64-bit integer");
  return v;
}

const CLI::Validator kWritableTarget(
    [](std::string& path) -> std::string {
      const auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent))
        return "directory " + parent.string() + " does not exist";
      if (std::filesystem::is_directory(path)) return path + " is a directory";
      return {};
    },
    "PATH");

const CLI::Validator kCreatableDir(
    [](std::string& path) -> std::string {
      const auto parent = std::filesystem::path(path).parent_path();
      if (!parent.empty() && !std::filesystem::is_directory(parent))
        return "directory " + parent.string() + " does not exist";
      if (std::filesystem::exists(path) && !std::filesystem::is_directory(path)) return path + " is not a directory";
      return {};
    },
    "DIR");

struct Parsed {
  RunConfig cfg;
  std::vector<std::string> seeds;
  std::string format = "text";
  std::string out_format = "text";
  std::string measure = "rbf";
  std::string k_sweep;
  std::string multipliers;
  bool no_normalize = false;
  bool no_stratify = false;
  double scale_std = 0.0;
};

void add_seed(CLI::App* sub, Parsed& p) {
  sub->add_option("--seed", p.seeds, "Random seed (unsigned 64-bit; default $DIFFVEC_SEED, else 1)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->allow_extra_args(false);
}

void add_embedding_flags(CLI::App* sub, Parsed& p, bool required = true) {
  auto* e = sub->add_option("--embeddings", p.cfg.embeddings, "Embedding file")->check(CLI::ExistingFile);
  if (required) e->required();
  sub->add_option("--format", p.format, "Embedding file format")->check(CLI::IsMember({"text", "binary"}));
  sub->add_flag("--lowercase", p.cfg.lowercase, "Lowercase embedding and triple words");
  sub->add_flag("--no-normalize", p.no_normalize, "Keep raw vector lengths");
  sub->add_option("--scale-std", p.scale_std, "Rescale all cells to FACTOR / global std before normalising")
      ->check(CLI::PositiveNumber);
}

void add_triples(CLI::App* sub, Parsed& p) {
  sub->add_option("--triples", p.cfg.triples, "Relation triples TSV")->required()->check(CLI::ExistingFile);
}

void add_out(CLI::App* sub, Parsed& p, const std::string& what) {
  sub->add_option("--out", p.cfg.out, what)->required()->check(kWritableTarget);
}

void add_svm_flags(CLI::App* sub, Parsed& p, bool kernel) {
  sub->add_option("--C", p.cfg.C, "SVM regularisation")->check(CLI::PositiveNumber)->capture_default_str();
  if (kernel)
    sub->add_option("--gamma", p.cfg.gamma, "RBF width (default 1 / (dim * feature variance))")
        ->check(CLI::PositiveNumber);
}

void add_random_pair_flags(CLI::App* sub, Parsed& p) {
  sub->add_option("--freq", p.cfg.freq, "Word frequency TSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon-size", p.cfg.lexicon_size, "Seed lexicon size for random pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct App {
  CLI::App app{"Lexical relation learning with word-embedding difference vectors", "diffvec"};
  Parsed p;
  std::vector<std::pair<CLI::App*, std::string>> commands;

  App() {
    app.set_help_flag();
    app.set_help_all_flag("-h,--help", "Print help for every subcommand and exit");
    app.require_subcommand(1);
    app.fallthrough(false);
    app.get_formatter()->column_width(34);

    auto* embed = app.add_subcommand("embed", "Embedding utilities");
    embed->require_subcommand(1);
    auto* inspect = embed->add_subcommand("inspect", "Print dimension, vocabulary size and norm statistics");
    inspect->add_option("path", p.cfg.embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
    inspect->add_option("--format", p.format, "Embedding file format")->check(CLI::IsMember({"text", "binary"}));
    inspect->add_flag("--lowercase", p.cfg.lowercase, "Lowercase words while reading");
    inspect->add_option("--out", p.cfg.out, "Also write the statistics as JSON")->check(kWritableTarget);
    commands.emplace_back(inspect, "embed-inspect");

    auto* svd = app.add_subcommand("build-svd", "Train PPMI-SVD embeddings on a text corpus");
    svd->add_option("--corpus", p.cfg.corpus, "Plain-text corpus; blank lines separate segments")
        ->required()
        ->check(CLI::ExistingFile);
    svd->add_option("--dim", p.cfg.dim, "Embedding dimension")->check(CLI::PositiveNumber)->capture_default_str();
    svd->add_option("--window", p.cfg.window, "Symmetric context window")->check(CLI::PositiveNumber)->capture_default_str();
    svd->add_option("--cds", p.cfg.cds, "Context distribution smoothing exponent")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    svd->add_option("--shift", p.cfg.shift, "PMI shift k (log k subtracted)")->check(CLI::Range(1.0, 1e12))->capture_default_str();
    svd->add_option("--eig-weight", p.cfg.eig_weight, "Exponent applied to singular values")->capture_default_str();
    svd->add_option("--min-count", p.cfg.min_count, "Minimum word frequency")->capture_default_str();
    svd->add_option("--max-vocab", p.cfg.max_vocab, "Keep only the most frequent words (0 = all)")->capture_default_str();
    svd->add_option("--out-format", p.out_format, "Output format")->check(CLI::IsMember({"text", "binary"}));
    add_out(svd, p, "Output embedding file");
    commands.emplace_back(svd, "build-svd");

    auto* cl = app.add_subcommand("cluster", "Spectral clustering of DiffVecs with a dev-tuned similarity");
    add_embedding_flags(cl, p);
    add_triples(cl, p);
    cl->add_option("--k-sweep", p.k_sweep, "Cluster counts as LO:HI:STEP or a comma list (default 10:80:10)");
    cl->add_option("--dev-frac", p.cfg.dev_fraction, "Fraction held out for tuning")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cl->add_option("--subsample-cap", p.cfg.subsample_cap, "Largest affinity matrix order")->capture_default_str();
    cl->add_option("--restarts", p.cfg.restarts, "k-means restarts")->check(CLI::PositiveNumber)->capture_default_str();
    add_out(cl, p, "Report JSON");
    add_seed(cl, p);
    commands.emplace_back(cl, "cluster");

    auto* closed = app.add_subcommand("classify-closed", "Closed-world cross-validated linear SVM");
    add_embedding_flags(closed, p);
    add_triples(closed, p);
    closed->add_option("--folds", p.cfg.folds, "Cross-validation folds")->capture_default_str();
    add_svm_flags(closed, p, false);
    closed->add_option("--model-out", p.cfg.model_out, "Also train on all data and save the model")
        ->check(kWritableTarget);
    add_out(closed, p, "Report JSON");
    add_seed(closed, p);
    commands.emplace_back(closed, "classify-closed");

    auto* open = app.add_subcommand("classify-open", "Open-world binary RBF SVMs against random pairs");
    add_embedding_flags(open, p);
    add_triples(open, p);
    add_random_pair_flags(open, p);
    open->add_flag("--neg", p.cfg.with_negatives, "Also train with opposite and shuffled negatives and compare");
    open->add_option("--annotations", p.cfg.annotations, "Random pairs validated as relation instances (TSV)")
        ->check(CLI::ExistingFile);
    open->add_option("--train-frac", p.cfg.train_fraction, "Training share of the gold pairs")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    open->add_flag("--no-stratify", p.no_stratify, "Split without stratifying by relation");
    open->add_option("--random-ratio", p.cfg.random_ratio, "Random pairs per held-out gold pair")->capture_default_str();
    add_svm_flags(open, p, true);
    add_out(open, p, "Report JSON");
    add_seed(open, p);
    commands.emplace_back(open, "classify-open");

    auto* lex = app.add_subcommand("lexsplit-sweep", "Disjoint-vocabulary evaluation with growing random pair counts");
    add_embedding_flags(lex, p);
    add_triples(lex, p);
    add_random_pair_flags(lex, p);
    lex->add_option("--multipliers", p.multipliers, "Random pair multipliers as LO:HI:STEP or a comma list (default 0:5:1)");
    lex->add_option("--test-word-frac", p.cfg.test_word_fraction, "Share of the vocabulary reserved for testing")
        ->check(CLI::Range(0.0, 1.0));
    add_svm_flags(lex, p, true);
    add_out(lex, p, "Report JSON");
    add_seed(lex, p);
    commands.emplace_back(lex, "lexsplit-sweep");

    auto* base = app.add_subcommand("baseline", "Cluster-majority baseline for the closed-world task");
    add_embedding_flags(base, p);
    add_triples(base, p);
    base->add_option("--clusters", p.cfg.clusters, "Number of clusters")->capture_default_str();
    base->add_option("--folds", p.cfg.folds, "Cross-validation folds")->capture_default_str();
    base->add_option("--measure", p.measure, "Similarity")->check(CLI::IsMember({"rbf", "cosine"}));
    base->add_option("--cluster-gamma", p.cfg.cluster_gamma, "RBF width for the affinity")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    base->add_option("--subsample-cap", p.cfg.subsample_cap, "Largest affinity matrix order")->capture_default_str();
    add_out(base, p, "Report JSON");
    add_seed(base, p);
    commands.emplace_back(base, "baseline");

    auto* pred = app.add_subcommand("predict", "Apply a saved model to word pairs");
    pred->add_option("--model", p.cfg.model, "Model JSON written by classify-closed")->required()->check(CLI::ExistingFile);
    add_embedding_flags(pred, p);
    add_triples(pred, p);
    add_out(pred, p, "Predictions JSON");
    commands.emplace_back(pred, "predict");

    auto* syn = app.add_subcommand("synth", "Write a synthetic embedding table, triples and frequency list");
    syn->add_option("--out", p.cfg.out, "Output directory")->required()->check(kCreatableDir);
    syn->add_option("--relations", p.cfg.synth_relations, "Relations")->capture_default_str();
    syn->add_option("--classes", p.cfg.synth_classes, "Word classes")->capture_default_str();
    syn->add_option("--dim", p.cfg.synth_dim, "Dimension")->capture_default_str();
    syn->add_option("--pairs", p.cfg.synth_pairs, "Pairs per relation")->capture_default_str();
    syn->add_option("--word-noise", p.cfg.synth_word_noise, "Word deviation from its class centroid")->capture_default_str();
    syn->add_option("--pair-noise", p.cfg.synth_pair_noise, "Per-pair deviation from the relation offset")
        ->capture_default_str();
    add_seed(syn, p);
    commands.emplace_back(syn, "synth");
  }
};

EmbeddingFormat format_of(const std::string& s) { return parse_embedding_format(s); }

}  // namespace

std::vector<std::size_t> parse_range(const std::string& spec) {
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
      throw UsageError("malformed range '" + spec + "'");
    return v;
  };
  std::vector<std::size_t> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = spec;
    for (std::size_t pos; (pos = rest.find(':')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      parts.push_back(rest.substr(0, pos));
    parts.push_back(rest);
    if (parts.size() != 3) throw UsageError("range '" + spec + "' must be LO:HI:STEP");
    const auto lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
    if (step == 0 || hi < lo) throw UsageError("range '" + spec + "' is empty");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  } else {
    std::string_view rest = spec;
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      out.push_back(number(rest.substr(0, pos)));
    out.push_back(number(rest));
  }
  return out;
}

std::string help_text() {
  App a;
  std::string text = a.app.help("", CLI::AppFormatMode::All);
  // Nested subcommands are not expanded by the formatter.
  auto* inspect = a.app.get_subcommand("embed")->get_subcommand("inspect");
  text += "\n" + inspect->help("diffvec embed", CLI::AppFormatMode::Normal);
  return text;
}

ParseResult parse_args(const std::vector<std::string>& args, const std::optional<std::string>& env_seed) {
  App a;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    a.app.parse(reversed);
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, help_text()};
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, help_text()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg = a.p.cfg;
  for (const auto& [sub, name] : a.commands)
    if (sub->parsed()) cfg.command = name;
  if (cfg.command.empty()) throw UsageError("a subcommand is required");

  auto& p = a.p;
  if (!p.seeds.empty()) {
    if (p.seeds.size() > 1)
      cfg.warnings.push_back("--seed given " + std::to_string(p.seeds.size()) + " times; using the last value " +
                             p.seeds.back());
    cfg.seed = parse_seed(p.seeds.back());
  } else if (env_seed && !env_seed->empty()) {
    try {
      cfg.seed = parse_seed(*env_seed);
    } catch (const UsageError&) {
      throw UsageError("DIFFVEC_SEED: '" + *env_seed + "' is not an unsigned 64-bit integer");
    }
  }
  cfg.format = format_of(p.format);
  cfg.out_format = format_of(p.out_format);
  cfg.normalize = !p.no_normalize;
  cfg.stratify = !p.no_stratify;
  if (p.scale_std > 0.0) cfg.scale_std = p.scale_std;
  cfg.measure = parse_similarity(p.measure);
  if (!p.k_sweep.empty()) cfg.k_values = parse_range(p.k_sweep);
  if (!p.multipliers.empty()) cfg.multipliers = parse_range(p.multipliers);
  for (std::size_t k : cfg.k_values)
    if (k < 2) throw UsageError("--k-sweep: every k must be at least 2");
  if (cfg.folds < 2) throw UsageError("--folds: at least 2 folds are required");
  if (cfg.random_ratio < 0.0) throw UsageError("--random-ratio: must be non-negative");
  if (cfg.command == "build-svd" && cfg.cds <= 0.0) throw UsageError("--cds: must lie in (0, 1]");
  return {std::move(cfg), {}};
}

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<RelationTriple> read_triples(const RunConfig& cfg, const std::filesystem::path& path) {
  auto triples = load_triples(path);
  if (cfg.lowercase)
    for (auto& t : triples) {
      t.word1 = lower(t.word1);
      t.word2 = lower(t.word2);
    }
  return triples;
}

EmbeddingTable read_table(const RunConfig& cfg, std::optional<std::set<std::string>> restrict_to, json& inputs,
                          std::ostream& err) {
  LoadOptions opt;
  opt.format = cfg.format;
  opt.lowercase = cfg.lowercase;
  opt.restrict_to = std::move(restrict_to);
  auto loaded = load_embeddings(cfg.embeddings, opt);
  if (loaded.duplicate_words) err << "warning: " << loaded.duplicate_words << " duplicate words ignored\n";
  EmbeddingTable table = std::move(loaded.table);
  if (cfg.scale_std) table = scale_by_global_std(table, *cfg.scale_std);
  if (cfg.normalize) table = normalize_unit(table);
  inputs["embeddings"] = cfg.embeddings.string();
  inputs["format"] = std::string(to_string(cfg.format));
  inputs["lowercase"] = cfg.lowercase;
  inputs["normalize"] = cfg.normalize;
  if (cfg.scale_std) inputs["scale_std"] = *cfg.scale_std;
  return table;
}

std::set<std::string> words_of(std::span<const RelationTriple> triples) {
  std::set<std::string> w;
  for (const auto& t : triples) {
    w.insert(t.word1);
    w.insert(t.word2);
  }
  return w;
}

void emit(EvalReport report, const RunConfig& cfg, json inputs, std::ostream& out, std::ostream& err) {
  report.config["inputs"] = std::move(inputs);
  for (const auto& w : cfg.warnings) report.warnings.push_back(w);
  write_report(report, cfg.out);
  out << "wrote " << cfg.out.string() << "\n";
  for (const auto& s : report.series) {
    auto csv = cfg.out;
    csv.replace_extension();
    csv += "." + s.name + ".csv";
    write_csv(s, csv);
    out << "wrote " << csv.string() << "\n";
  }
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
}

int run_inspect(const RunConfig& cfg, std::ostream& out) {
  LoadOptions opt;
  opt.format = cfg.format;
  opt.lowercase = cfg.lowercase;
  const auto loaded = load_embeddings(cfg.embeddings, opt);
  const auto stats = norm_statistics(loaded.table);
  std::ostringstream text;
  text << "words " << loaded.table.size() << "\n"
       << "dim " << loaded.table.dim() << "\n"
       << "duplicates " << loaded.duplicate_words << "\n"
       << "norm min " << stats.min << " max " << stats.max << " mean " << stats.mean << " std " << stats.stddev << "\n";
  out << text.str();
  if (!cfg.out.empty()) {
    json j = {{"kind", "embedding-stats"},
              {"version", kReportVersion},
              {"path", cfg.embeddings.string()},
              {"format", std::string(to_string(cfg.format))},
              {"words", loaded.table.size()},
              {"dim", loaded.table.dim()},
              {"duplicates", loaded.duplicate_words},
              {"norm", {{"min", stats.min}, {"max", stats.max}, {"mean", stats.mean}, {"std", stats.stddev}}}};
    write_file_atomic(cfg.out, j.dump(2) + "\n");
  }
  return 0;
}

int run_build_svd(const RunConfig& cfg, std::ostream& out) {
  std::ifstream in(cfg.corpus, std::ios::binary);
  if (!in) throw Error("cannot read " + cfg.corpus.string());
  const auto corpus = preprocess_corpus(in, cfg.min_count, cfg.max_vocab);
  const auto counts = build_cooccurrence(corpus, cfg.window);
  const auto ppmi = compute_ppmi(counts, cfg.cds, cfg.shift);
  const auto emb = truncated_svd_embed(ppmi, counts.vocab, cfg.dim, cfg.eig_weight);
  auto tmp = cfg.out;
  tmp += ".tmp";
  write_embeddings(emb.table, tmp, cfg.out_format);
  std::filesystem::rename(tmp, cfg.out);
  out << "wrote " << cfg.out.string() << " (" << emb.table.size() << " words, dim " << emb.table.dim() << ")\n";
  if (emb.rank_deficit) out << "note: " << emb.rank_deficit << " trailing dimensions have zero singular value\n";
  return 0;
}

int run_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::ifstream in(cfg.model, std::ios::binary);
  if (!in) throw Error("cannot read " + cfg.model.string());
  json mj;
  try {
    in >> mj;
  } catch (const json::exception& e) {
    throw ParseError(cfg.model.string(), 0, e.what());
  }
  const auto triples = read_triples(cfg, cfg.triples);
  json inputs;
  const auto table = read_table(cfg, words_of(triples), inputs, err);
  const std::string kind = mj.value("kind", "");
  json preds = json::array();
  std::size_t skipped = 0;
  if (kind == "linear-ovr-svm") {
    const auto model = linear_model_from_json(mj);
    if (model.dim() != table.dim()) throw Error("model dimension does not match the embeddings");
    for (const auto& t : triples) {
      if (!table.contains(t.word1) || !table.contains(t.word2)) {
        ++skipped;
        continue;
      }
      const auto d = make_diffvecs(std::span<const RelationTriple>(&t, 1), table);
      const auto scores = model.scores(d[0].vector);
      const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
      preds.push_back({{"word1", t.word1}, {"word2", t.word2}, {"gold", t.relation},
                       {"predicted", model.classes()[best]}, {"score", scores[best]}});
    }
  } else if (kind == "rbf-binary-svm") {
    const auto model = kernel_model_from_json(mj);
    const std::string positive = mj.value("positive_label", "positive");
    if (model.dim() != table.dim()) throw Error("model dimension does not match the embeddings");
    for (const auto& t : triples) {
      if (!table.contains(t.word1) || !table.contains(t.word2)) {
        ++skipped;
        continue;
      }
      const auto d = make_diffvecs(std::span<const RelationTriple>(&t, 1), table);
      const double f = model.decision(d[0].vector);
      preds.push_back({{"word1", t.word1}, {"word2", t.word2}, {"gold", t.relation},
                       {"predicted", f > 0.0 ? positive : std::string("other")}, {"score", f}});
    }
  } else {
    throw Error(cfg.model.string() + ": unknown model kind '" + kind + "'");
  }
  inputs["model"] = cfg.model.string();
  inputs["triples"] = cfg.triples.string();
  json j = {{"kind", "predictions"},      {"version", kReportVersion}, {"model_kind", kind},
            {"inputs", inputs},           {"skipped_oov", skipped},    {"predictions", preds},
            {"warnings", cfg.warnings}};
  write_file_atomic(cfg.out, j.dump(2) + "\n");
  out << "wrote " << cfg.out.string() << "\n";
  if (skipped) err << "warning: " << skipped << " pairs skipped (out of vocabulary)\n";
  return 0;
}

int run_synth(const RunConfig& cfg, std::ostream& out) {
  SyntheticWorldOptions o;
  o.relations = cfg.synth_relations;
  o.classes = cfg.synth_classes;
  o.dim = cfg.synth_dim;
  o.pairs_per_relation = cfg.synth_pairs;
  o.word_noise = cfg.synth_word_noise;
  o.pair_noise = cfg.synth_pair_noise;
  o.seed = cfg.seed;
  const auto world = make_synthetic_world(o);
  std::filesystem::create_directories(cfg.out);
  write_embeddings(world.table, cfg.out / "embeddings.txt", EmbeddingFormat::text);
  write_triples(world.triples, cfg.out / "triples.tsv");
  write_frequency_list(world.frequencies, cfg.out / "freq.tsv");
  out << "wrote " << (cfg.out / "embeddings.txt").string() << ", " << (cfg.out / "triples.tsv").string() << ", "
      << (cfg.out / "freq.tsv").string() << "\n";
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "embed-inspect") return run_inspect(cfg, out);
  if (cfg.command == "build-svd") return run_build_svd(cfg, out);
  if (cfg.command == "predict") return run_predict(cfg, out, err);
  if (cfg.command == "synth") return run_synth(cfg, out);

  auto triples = read_triples(cfg, cfg.triples);
  if (cfg.command != "cluster") triples = restrict_to_inventory(triples, RelationInventory::classification());
  if (triples.empty()) throw Error(cfg.triples.string() + ": no triples for the requested relations");
  auto words = words_of(triples);
  FrequencyList freq;
  std::vector<RelationTriple> annotations;
  if (!cfg.freq.empty()) {
    freq = load_frequency_list(cfg.freq);
    if (cfg.lowercase) {
      std::vector<std::pair<std::string, std::uint64_t>> merged;
      std::map<std::string, std::uint64_t> sums;
      std::vector<std::string> order;
      for (const auto& [w, c] : freq.entries()) {
        auto lw = lower(w);
        if (!sums.count(lw)) order.push_back(lw);
        sums[lw] += c;
      }
      for (const auto& w : order) merged.emplace_back(w, sums[w]);
      freq = FrequencyList(std::move(merged));
    }
    for (const auto& [w, c] : freq.entries()) words.insert(w);
  }
  if (!cfg.annotations.empty()) annotations = read_triples(cfg, cfg.annotations);

  json inputs;
  const auto table = read_table(cfg, words, inputs, err);
  inputs["triples"] = cfg.triples.string();
  if (!cfg.freq.empty()) inputs["freq"] = cfg.freq.string();
  if (!cfg.annotations.empty()) inputs["annotations"] = cfg.annotations.string();

  if (cfg.command == "cluster") {
    ClusteringOptions o;
    o.k_values = cfg.k_values;
    o.dev_fraction = cfg.dev_fraction;
    o.base.subsample_cap = cfg.subsample_cap;
    o.base.restarts = cfg.restarts;
    o.seed = cfg.seed;
    emit(run_clustering_experiment(table, triples, o), cfg, inputs, out, err);
  } else if (cfg.command == "classify-closed") {
    ClosedWorldOptions o;
    o.folds = cfg.folds;
    o.C = cfg.C;
    o.seed = cfg.seed;
    emit(run_closed_world(table, triples, o), cfg, inputs, out, err);
    if (!cfg.model_out.empty()) {
      const auto model = train_closed_world_model(table, triples, o);
      write_file_atomic(cfg.model_out, to_json(model, table.source_id()).dump(2) + "\n");
      out << "wrote " << cfg.model_out.string() << "\n";
    }
  } else if (cfg.command == "classify-open") {
    OpenWorldOptions o;
    o.train_fraction = cfg.train_fraction;
    o.stratified = cfg.stratify;
    o.C = cfg.C;
    o.gamma = cfg.gamma;
    o.lexicon_size = cfg.lexicon_size;
    o.random_ratio = cfg.random_ratio;
    o.seed = cfg.seed;
    emit(run_open_world(table, triples, freq, annotations, cfg.with_negatives, o), cfg, inputs, out, err);
  } else if (cfg.command == "lexsplit-sweep") {
    LexicalOptions o;
    o.multipliers = cfg.multipliers;
    o.test_word_fraction = cfg.test_word_fraction;
    o.C = cfg.C;
    o.gamma = cfg.gamma;
    o.lexicon_size = cfg.lexicon_size;
    o.seed = cfg.seed;
    emit(run_lexical_memorisation(table, triples, freq, o), cfg, inputs, out, err);
  } else if (cfg.command == "baseline") {
    BaselineOptions o;
    o.clusters = cfg.clusters;
    o.folds = cfg.folds;
    o.measure = cfg.measure;
    o.gamma = cfg.cluster_gamma;
    o.subsample_cap = cfg.subsample_cap;
    o.seed = cfg.seed;
    emit(run_baseline_cluster_majority(table, triples, o), cfg, inputs, out, err);
  } else {
    throw Error("unknown command " + cfg.command);
  }
  return 0;
}

}  // namespace diffvec::cli
