#include "diffvec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diffvec/cross_validation.hpp"
#include "diffvec/error.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {

namespace {

using nlohmann::json;

struct Prepared {
  std::vector<RelationTriple> triples;
  std::vector<DiffVecInstance> instances;
};

Prepared prepare(const EmbeddingTable& table, std::span<const RelationTriple> triples, EvalReport& report) {
  const std::set<std::string> vocab(table.words().begin(), table.words().end());
  auto filtered = dedupe_and_filter(triples, vocab);
  report.counts["input_triples"] = static_cast<std::int64_t>(triples.size());
  report.counts["dropped_oov"] = static_cast<std::int64_t>(filtered.dropped_oov);
  report.counts["dropped_duplicate"] = static_cast<std::int64_t>(filtered.dropped_duplicate);
  report.counts["dropped_conflict"] = static_cast<std::int64_t>(filtered.dropped_conflict);
  report.counts["identical_forms"] = static_cast<std::int64_t>(filtered.identical_forms);
  Prepared p;
  p.triples = std::move(filtered.triples);
  p.instances = make_diffvecs(p.triples, table);
  report.counts["instances"] = static_cast<std::int64_t>(p.instances.size());
  if (p.instances.empty()) throw Error("no relation instances left after vocabulary filtering");
  return p;
}

json base_config(const EmbeddingTable& table, std::uint64_t seed) {
  return {{"seed", seed},
          {"embedding_source", table.source_id()},
          {"embedding_dim", table.dim()},
          {"embedding_words", table.size()},
          {"normalized", table.normalized()}};
}

std::vector<std::string> sorted_labels(std::span<const DiffVecInstance> instances) {
  std::set<std::string> s;
  for (const auto& i : instances) s.insert(i.label);
  return {s.begin(), s.end()};
}

std::vector<DiffVecInstance> pick(std::span<const DiffVecInstance> all, std::span<const std::size_t> idx) {
  std::vector<DiffVecInstance> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

Matrix stack(const std::vector<const DiffVecInstance*>& rows, std::size_t dim) {
  Matrix m(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i]->vector.begin(), rows[i]->vector.end(), m.row(i).begin());
  return m;
}

VariantReport variant_from(const std::string& name, const CrossValidationResult& r) {
  VariantReport v;
  v.name = name;
  v.per_relation = r.per_class;
  pool_micro(v);
  return v;
}

std::vector<DiffVecInstance> random_instances(const std::vector<RelationTriple>& pairs, const EmbeddingTable& table) {
  return make_diffvecs(pairs, table, Provenance::random);
}

// Binary RBF classifiers, one per relation, for the "orig" and "neg" variants.
struct RelationClassifier {
  std::string relation;
  KernelModel model;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t synthesized = 0;
};

std::vector<RelationClassifier> train_relation_classifiers(std::span<const DiffVecInstance> train,
                                                           const std::vector<std::string>& relations,
                                                           const EmbeddingTable& table, bool with_negatives,
                                                           double C, double gamma, std::uint64_t seed,
                                                           std::vector<std::string>& warnings) {
  std::vector<RelationClassifier> out;
  for (const auto& r : relations) {
    std::vector<const DiffVecInstance*> pos, neg;
    std::vector<DiffVecInstance> own;
    for (const auto& inst : train) {
      if (inst.label == r) {
        pos.push_back(&inst);
        own.push_back(inst);
      } else {
        neg.push_back(&inst);
      }
    }
    RelationClassifier rc;
    rc.relation = r;
    NegativeSamples synth;
    if (with_negatives && !own.empty()) {
      synth = synth_negatives(own, table, Prng::split(seed, "negatives:" + r).next());
      for (const auto& w : synth.warnings) warnings.push_back(r + ": " + w);
      for (const auto& inst : synth.instances) neg.push_back(&inst);
      rc.synthesized = synth.instances.size();
    }
    if (pos.empty() || neg.empty()) {
      warnings.push_back("relation '" + r + "' has no training " + (pos.empty() ? "positives" : "negatives") +
                         "; it predicts nothing");
      out.push_back(std::move(rc));
      continue;
    }
    std::vector<const DiffVecInstance*> rows = pos;
    rows.insert(rows.end(), neg.begin(), neg.end());
    std::vector<int> y(rows.size(), -1);
    std::fill(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(pos.size()), 1);
    KernelSvmOptions opt;
    opt.C = C;
    opt.gamma = gamma;
    rc.model = train_binary_rbf(stack(rows, table.dim()), y, opt);
    if (!rc.model.converged) warnings.push_back("relation '" + r + "': SMO stopped at the iteration limit");
    rc.positives = pos.size();
    rc.negatives = neg.size();
    out.push_back(std::move(rc));
  }
  return out;
}

// positive[i] for every test instance.
std::vector<bool> predict_positive(const RelationClassifier& rc, std::span<const DiffVecInstance> test) {
  std::vector<bool> out(test.size(), false);
  if (rc.positives == 0 || rc.negatives == 0) return out;
  for (std::size_t i = 0; i < test.size(); ++i) out[i] = rc.model.decision(test[i].vector) > 0.0;
  return out;
}

json series_cell(double v) { return v; }

}  // namespace

std::vector<RelationTriple> restrict_to_inventory(std::span<const RelationTriple> triples,
                                                  const RelationInventory& inventory) {
  std::vector<RelationTriple> out;
  for (const auto& t : triples)
    if (auto canon = inventory.resolve(t.relation)) out.push_back({*canon, t.word1, t.word2});
  return out;
}

std::map<std::string, double> relative_recall(const std::map<std::string, std::set<WordPair>>& positives,
                                              const std::set<WordPair>& correct) {
  if (positives.empty()) throw Error("relative_recall: no models given");
  std::set<WordPair> pool;
  for (const auto& [model, pos] : positives)
    for (const auto& p : pos)
      if (correct.count(p)) pool.insert(p);
  std::map<std::string, double> out;
  for (const auto& [model, pos] : positives) {
    if (pool.empty()) {
      out[model] = 1.0;
      continue;
    }
    std::size_t hit = 0;
    for (const auto& p : pos)
      if (correct.count(p)) ++hit;
    out[model] = static_cast<double>(hit) / static_cast<double>(pool.size());
  }
  return out;
}

EvalReport run_clustering_experiment(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                     const ClusteringOptions& options) {
  EvalReport report;
  report.experiment = "clustering";
  auto data = prepare(table, triples, report);

  // Zero difference vectors (identical word forms) have no direction.
  std::vector<DiffVecInstance> instances;
  for (auto& inst : data.instances)
    if (l2_norm(inst.vector) > 0.0) instances.push_back(std::move(inst));
  if (instances.size() != data.instances.size()) {
    report.counts["zero_vectors"] = static_cast<std::int64_t>(data.instances.size() - instances.size());
    report.warnings.push_back("dropped " + std::to_string(data.instances.size() - instances.size()) +
                              " zero difference vectors");
  }

  const auto labels = labels_of(instances);
  const auto split = split_holdout(labels, options.dev_fraction, Prng::split(options.seed, "dev-split").next(), false);
  const auto dev = pick(instances, split.dev);
  const auto main = pick(instances, split.main);
  report.counts["dev"] = static_cast<std::int64_t>(dev.size());
  report.counts["main"] = static_cast<std::int64_t>(main.size());

  ClusterConfig base = options.base;
  base.seed = options.seed;
  auto grid = options.grid.empty() ? default_grid(options.k_values, base) : options.grid;
  std::vector<ClusterConfig> usable;
  for (auto c : grid) {
    if (c.k > dev.size() || c.k > c.subsample_cap) continue;
    c.seed = options.seed;
    usable.push_back(c);
  }
  if (usable.size() < grid.size())
    report.warnings.push_back(std::to_string(grid.size() - usable.size()) +
                              " grid configurations skipped: k exceeds the dev set size");
  if (usable.empty()) throw Error("clustering: dev set too small for every k in the grid");
  const auto tuned = tune(dev, usable);

  std::vector<std::size_t> ks;
  for (std::size_t k : options.k_values)
    if (k >= 2 && k <= main.size() && k <= base.subsample_cap) ks.push_back(k);
  if (ks.empty()) throw Error("clustering: main set too small for every k");
  const auto sweep = sweep_k(main, ks, tuned.best);

  ClusterConfig best_on_main = tuned.best;
  if (best_on_main.k > main.size()) best_on_main.k = ks.back();
  const auto assignment = cluster(std::span<const DiffVecInstance>(main), best_on_main);
  const auto main_labels = labels_of(main);
  report.relation_entropy = relation_entropy(main_labels, assignment.cluster);
  const auto score = v_measure(main_labels, assignment.cluster);
  for (const auto& w : assignment.warnings) report.warnings.push_back(w);

  Series s{"v_measure_by_k", {"k", "homogeneity", "completeness", "v_measure"}, {}};
  for (const auto& ks_ : sweep)
    s.rows.push_back({json(ks_.k), series_cell(ks_.score.homogeneity), series_cell(ks_.score.completeness),
                      series_cell(ks_.score.v)});
  report.series.push_back(std::move(s));

  Series g{"dev_grid", {"k", "measure", "gamma", "v_measure"}, {}};
  for (const auto& [c, v] : tuned.scores)
    g.rows.push_back({json(c.k), json(std::string(to_string(c.measure))), series_cell(c.gamma), series_cell(v.v)});
  report.series.push_back(std::move(g));

  report.scalars["dev_v_measure"] = tuned.best_score.v;
  report.scalars["v_measure"] = score.v;
  report.scalars["homogeneity"] = score.homogeneity;
  report.scalars["completeness"] = score.completeness;

  report.config = base_config(table, options.seed);
  report.config["dev_fraction"] = options.dev_fraction;
  report.config["k_values"] = options.k_values;
  report.config["subsample_cap"] = base.subsample_cap;
  report.config["restarts"] = base.restarts;
  report.config["grid_size"] = usable.size();
  report.config["chosen"] = {{"k", best_on_main.k},
                             {"measure", std::string(to_string(best_on_main.measure))},
                             {"gamma", best_on_main.gamma}};
  for (const auto& w : split.warnings) report.warnings.push_back(w);
  return report;
}

EvalReport run_closed_world(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                            const ClosedWorldOptions& options) {
  EvalReport report;
  report.experiment = "closed-world";
  auto data = prepare(table, triples, report);
  const Matrix x = to_matrix(data.instances);
  const auto labels = labels_of(data.instances);
  LinearSvmOptions svm;
  svm.C = options.C;
  svm.seed = Prng::split(options.seed, "svm").next();
  const auto cv = cross_validate(labels, options.folds, linear_svm_predictor(x, labels, svm), options.seed);
  report.variants.push_back(variant_from("linear-svm", cv));
  report.warnings = cv.warnings;
  report.config = base_config(table, options.seed);
  report.config["folds"] = options.folds;
  report.config["C"] = options.C;
  return report;
}

LinearModel train_closed_world_model(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                     const ClosedWorldOptions& options) {
  EvalReport scratch;
  auto data = prepare(table, triples, scratch);
  LinearSvmOptions svm;
  svm.C = options.C;
  svm.seed = Prng::split(options.seed, "svm").next();
  return train_linear_multiclass(to_matrix(data.instances), labels_of(data.instances), svm);
}

EvalReport run_baseline_cluster_majority(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                         const BaselineOptions& options) {
  EvalReport report;
  report.experiment = "baseline";
  auto data = prepare(table, triples, report);
  const auto labels = labels_of(data.instances);
  const auto relations = sorted_labels(data.instances);
  if (options.clusters < relations.size())
    throw Error("baseline: " + std::to_string(options.clusters) + " clusters for " +
                std::to_string(relations.size()) + " relations");

  ClusterConfig cfg;
  cfg.k = options.clusters;
  cfg.measure = options.measure;
  cfg.gamma = options.gamma;
  cfg.subsample_cap = options.subsample_cap;
  cfg.restarts = options.restarts;
  cfg.seed = Prng::split(options.seed, "baseline-clusters").next();
  Matrix x = to_matrix(data.instances);
  if (cfg.measure == Similarity::cosine)
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (l2_norm(x.row(i)) == 0.0) throw Error("baseline: cosine similarity undefined for zero difference vectors");
  const auto assignment = cluster(x, cfg);
  for (const auto& w : assignment.warnings) report.warnings.push_back(w);
  const auto& cl = assignment.cluster;

  auto predictor = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
    std::map<std::string, std::size_t> overall;
    std::vector<std::map<std::string, std::size_t>> per_cluster(cfg.k);
    for (std::size_t i : train) {
      ++overall[labels[i]];
      ++per_cluster[static_cast<std::size_t>(cl[i])][labels[i]];
    }
    // Most frequent relation; ties to the lexicographically first.
    auto frequency_rank = [&](const std::string& a, const std::string& b) {
      const auto fa = overall.count(a) ? overall.at(a) : 0, fb = overall.count(b) ? overall.at(b) : 0;
      return fa != fb ? fa > fb : a < b;
    };
    std::string fallback;
    for (const auto& [label, n] : overall)
      if (fallback.empty() || frequency_rank(label, fallback)) fallback = label;
    std::vector<std::string> majority(cfg.k, fallback);
    for (std::size_t c = 0; c < cfg.k; ++c) {
      std::size_t best_n = 0;
      std::vector<std::string> tied;
      for (const auto& [label, n] : per_cluster[c]) {
        if (n > best_n) {
          best_n = n;
          tied = {label};
        } else if (n == best_n) {
          tied.push_back(label);
        }
      }
      if (!tied.empty()) majority[c] = *std::min_element(tied.begin(), tied.end(), frequency_rank);
    }
    std::vector<std::string> out;
    for (std::size_t i : test) out.push_back(majority[static_cast<std::size_t>(cl[i])]);
    return out;
  };
  const auto cv = cross_validate(labels, options.folds, predictor, options.seed);
  report.variants.push_back(variant_from("cluster-majority", cv));
  for (const auto& w : cv.warnings) report.warnings.push_back(w);
  report.config = base_config(table, options.seed);
  report.config["clusters"] = options.clusters;
  report.config["folds"] = options.folds;
  report.config["measure"] = std::string(to_string(options.measure));
  report.config["gamma"] = options.gamma;
  report.config["subsample_cap"] = options.subsample_cap;
  return report;
}

EvalReport run_open_world(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                          const FrequencyList& freq, std::span<const RelationTriple> annotations, bool with_negatives,
                          const OpenWorldOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0))
    throw Error("open world: train fraction must lie in (0, 1)");
  if (options.random_ratio < 0.0) throw Error("open world: random ratio must be non-negative");
  EvalReport report;
  report.experiment = with_negatives ? "open-world-neg" : "open-world";
  auto data = prepare(table, triples, report);
  const auto labels = labels_of(data.instances);
  const auto relations = sorted_labels(data.instances);
  const auto split = split_holdout(labels, 1.0 - options.train_fraction,
                                   Prng::split(options.seed, "open-split").next(), options.stratified);
  for (const auto& w : split.warnings) report.warnings.push_back(w);
  const auto train = pick(data.instances, split.main);
  auto test = pick(data.instances, split.dev);
  if (train.empty() || test.empty()) throw Error("open world: train or test split is empty");
  const std::size_t gold_test = test.size();

  std::set<WordPair> gold_pairs;
  for (const auto& t : data.triples) gold_pairs.insert({t.word1, t.word2});
  const auto lexicon_freq = freq.filtered([&](const std::string& w) { return table.contains(w); });
  const auto n_random = static_cast<std::size_t>(std::llround(options.random_ratio * static_cast<double>(gold_test)));
  std::size_t lexicon = options.lexicon_size;
  if (lexicon > lexicon_freq.size()) {
    report.warnings.push_back("seed lexicon reduced to the " + std::to_string(lexicon_freq.size()) +
                              " frequency-list words with embeddings");
    lexicon = lexicon_freq.size();
  }
  if (n_random > 0) {
    const auto pairs = gen_random_pairs(lexicon_freq, lexicon, n_random, gold_pairs,
                                        Prng::split(options.seed, "random-pairs").next());
    auto rnd = random_instances(pairs, table);
    test.insert(test.end(), std::make_move_iterator(rnd.begin()), std::make_move_iterator(rnd.end()));
  }

  std::map<WordPair, std::set<std::string>> annotated;
  for (const auto& a : annotations) annotated[{a.word1, a.word2}].insert(a.relation);
  auto correct_for = [&](const DiffVecInstance& inst, const std::string& r) {
    if (inst.provenance == Provenance::gold) return inst.label == r;
    auto it = annotated.find(inst.pair);
    return it != annotated.end() && it->second.count(r) > 0;
  };

  std::vector<std::string> variant_names = {"orig"};
  if (with_negatives) variant_names.push_back("neg");
  const double gamma = options.gamma > 0.0 ? options.gamma : default_gamma(to_matrix(train));

  // positives[variant][relation] over test indices
  std::vector<std::vector<std::vector<bool>>> positives;
  std::int64_t synthesized = 0;
  for (const auto& name : variant_names) {
    const bool neg = name == "neg";
    auto models = train_relation_classifiers(train, relations, table, neg, options.C, gamma, options.seed,
                                             report.warnings);
    std::vector<std::vector<bool>> per;
    for (const auto& m : models) {
      per.push_back(predict_positive(m, test));
      if (neg) synthesized += static_cast<std::int64_t>(m.synthesized);
    }
    positives.push_back(std::move(per));
  }

  std::vector<VariantReport> variants(variant_names.size());
  for (std::size_t v = 0; v < variants.size(); ++v) variants[v].name = variant_names[v];
  Series s{"open_world", {"variant", "relation", "precision", "relative_recall", "f1", "tp", "fp", "fn"}, {}};
  for (std::size_t r = 0; r < relations.size(); ++r) {
    const auto& rel = relations[r];
    std::set<WordPair> correct;
    std::map<std::string, std::set<WordPair>> found;
    for (std::size_t i = 0; i < test.size(); ++i)
      if (correct_for(test[i], rel)) correct.insert(test[i].pair);
    std::set<WordPair> held_out;
    for (std::size_t i = 0; i < gold_test; ++i)
      if (test[i].label == rel) held_out.insert(test[i].pair);
    found["gold"] = held_out;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      auto& f = found[variant_names[v]];
      for (std::size_t i = 0; i < test.size(); ++i)
        if (positives[v][r][i]) f.insert(test[i].pair);
    }
    const auto rr = relative_recall(found, correct);
    std::set<WordPair> pool;
    for (const auto& [name, f] : found)
      for (const auto& p : f)
        if (correct.count(p)) pool.insert(p);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const auto& f = found[variant_names[v]];
      ClassMetrics m;
      m.label = rel;
      for (const auto& p : f) (correct.count(p) ? m.tp : m.fp)++;
      m.fn = static_cast<std::int64_t>(pool.size()) - m.tp;
      variants[v].per_relation.push_back(m);
      variants[v].relative_recall[rel] = rr.at(variant_names[v]);
      s.rows.push_back({json(variant_names[v]), json(rel), series_cell(m.precision()),
                        series_cell(rr.at(variant_names[v])), series_cell(m.f1()), json(m.tp), json(m.fp),
                        json(m.fn)});
    }
  }
  for (auto& v : variants) {
    pool_micro(v);
    report.scalars[v.name + "_precision"] = v.micro.precision();
    report.scalars[v.name + "_recall"] = v.micro.recall();
    report.scalars[v.name + "_f1"] = v.micro.f1();
  }
  report.variants = std::move(variants);
  report.series.push_back(std::move(s));
  report.counts["train"] = static_cast<std::int64_t>(train.size());
  report.counts["test_gold"] = static_cast<std::int64_t>(gold_test);
  report.counts["test_random"] = static_cast<std::int64_t>(test.size() - gold_test);
  report.counts["annotations"] = static_cast<std::int64_t>(annotations.size());
  if (with_negatives) report.counts["synthesized_negatives"] = synthesized;

  report.config = base_config(table, options.seed);
  report.config["train_fraction"] = options.train_fraction;
  report.config["stratified"] = options.stratified;
  report.config["C"] = options.C;
  report.config["gamma"] = gamma;
  report.config["lexicon_size"] = lexicon;
  report.config["random_ratio"] = options.random_ratio;
  report.config["annotation_policy"] = "strict";
  return report;
}

EvalReport run_lexical_memorisation(const EmbeddingTable& table, std::span<const RelationTriple> triples,
                                    const FrequencyList& freq, const LexicalOptions& options) {
  if (options.multipliers.empty()) throw Error("lexical memorisation: no multipliers given");
  EvalReport report;
  report.experiment = "lexical-memorisation";
  auto data = prepare(table, triples, report);
  const auto split =
      lexical_split(data.triples, options.test_word_fraction, Prng::split(options.seed, "lexical-split").next());
  const auto train = make_diffvecs(split.train, table);
  const auto gold_test = make_diffvecs(split.test, table);
  report.counts["train"] = static_cast<std::int64_t>(train.size());
  report.counts["test_gold"] = static_cast<std::int64_t>(gold_test.size());
  report.counts["dropped_straddling"] = static_cast<std::int64_t>(split.dropped);
  report.counts["train_words"] = static_cast<std::int64_t>(split.train_words.size());
  report.counts["test_words"] = static_cast<std::int64_t>(split.test_words.size());

  std::set<std::string> relation_set;
  for (const auto& t : split.train) relation_set.insert(t.relation);
  for (const auto& t : split.test) relation_set.insert(t.relation);
  const std::vector<std::string> relations(relation_set.begin(), relation_set.end());

  std::set<WordPair> gold_pairs;
  for (const auto& t : data.triples) gold_pairs.insert({t.word1, t.word2});
  const auto max_m = *std::max_element(options.multipliers.begin(), options.multipliers.end());
  const auto test_freq = freq.filtered(
      [&](const std::string& w) { return table.contains(w) && split.train_words.count(w) == 0; });
  std::size_t lexicon = std::min(options.lexicon_size, test_freq.size());
  if (lexicon < options.lexicon_size)
    report.warnings.push_back("seed lexicon reduced to the " + std::to_string(lexicon) +
                              " frequency-list words outside the training vocabulary");
  std::vector<DiffVecInstance> random;
  if (max_m > 0) {
    const auto pairs = gen_random_pairs(test_freq, lexicon, max_m * gold_test.size(), gold_pairs,
                                        Prng::split(options.seed, "random-pairs").next());
    random = random_instances(pairs, table);
  }
  report.counts["random_pool"] = static_cast<std::int64_t>(random.size());

  const double gamma = options.gamma > 0.0 ? options.gamma : default_gamma(to_matrix(train));
  for (const std::string name : {"orig", "neg"}) {
    const bool neg = std::string(name) == "neg";
    auto models =
        train_relation_classifiers(train, relations, table, neg, options.C, gamma, options.seed, report.warnings);
    Series s{std::string("lexical_") + name, {"multiplier", "precision", "recall", "f1", "tp", "fp", "fn"}, {}};
    std::vector<std::vector<bool>> gold_pos, rand_pos;
    for (const auto& m : models) {
      gold_pos.push_back(predict_positive(m, gold_test));
      rand_pos.push_back(predict_positive(m, random));
    }
    for (std::size_t mult : options.multipliers) {
      const std::size_t n_random = mult * gold_test.size();
      VariantReport v;
      v.name = std::string(name) + "@" + std::to_string(mult);
      for (std::size_t r = 0; r < relations.size(); ++r) {
        ClassMetrics m;
        m.label = relations[r];
        for (std::size_t i = 0; i < gold_test.size(); ++i) {
          const bool is_r = gold_test[i].label == relations[r];
          if (gold_pos[r][i])
            (is_r ? m.tp : m.fp)++;
          else if (is_r)
            ++m.fn;
        }
        for (std::size_t i = 0; i < n_random; ++i)
          if (rand_pos[r][i]) ++m.fp;
        v.per_relation.push_back(m);
      }
      pool_micro(v);
      s.rows.push_back({json(mult), series_cell(v.micro.precision()), series_cell(v.micro.recall()),
                        series_cell(v.micro.f1()), json(v.micro.tp), json(v.micro.fp), json(v.micro.fn)});
      if (mult == max_m) report.scalars[std::string(name) + "_f1_at_max"] = v.micro.f1();
      report.variants.push_back(std::move(v));
    }
    report.series.push_back(std::move(s));
  }

  report.config = base_config(table, options.seed);
  report.config["multipliers"] = options.multipliers;
  report.config["test_word_fraction"] = options.test_word_fraction;
  report.config["C"] = options.C;
  report.config["gamma"] = gamma;
  report.config["lexicon_size"] = lexicon;
  report.config["annotation_policy"] = "strict";
  return report;
}

}  // namespace diffvec
