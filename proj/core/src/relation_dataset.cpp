#include "diffvec/relation_dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "diffvec/error.hpp"
#include "diffvec/prng.hpp"

namespace diffvec {
namespace {

std::string label_key(std::string_view label) {
  std::string key;
  for (char c : label) {
    if (c == '_' || c == '-') continue;
    key.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return key;
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

RelationInventory::RelationInventory(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (const auto& l : labels_) {
    std::string key = label_key(l);
    if (key.empty()) throw Error("RelationInventory: empty label");
    if (std::find(keys_.begin(), keys_.end(), key) != keys_.end())
      throw Error("RelationInventory: duplicate label '" + l + "'");
    keys_.push_back(std::move(key));
  }
}

const RelationInventory& RelationInventory::standard() {
  static const RelationInventory inv({"LexSem_Hyper", "LexSem_Mero", "LexSem_Attr", "LexSem_Cause", "LexSem_Space",
                                      "LexSem_Ref", "LexSem_Event", "Noun_SP", "Verb_3", "Verb_Past", "Verb_3Past",
                                      "LVC", "VerbNoun", "Prefix", "Noun_Coll"});
  return inv;
}

const RelationInventory& RelationInventory::classification() {
  static const RelationInventory inv({"LexSem_Hyper", "LexSem_Mero", "LexSem_Event", "Noun_SP", "Verb_3",
                                      "Verb_Past", "Verb_3Past", "Prefix", "Noun_Coll"});
  return inv;
}

std::optional<std::string> RelationInventory::resolve(std::string_view label) const {
  const std::string key = label_key(label);
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (keys_[i] == key) return labels_[i];
  return std::nullopt;
}

std::size_t RelationInventory::rank(std::string_view label) const {
  const std::string key = label_key(label);
  for (std::size_t i = 0; i < keys_.size(); ++i)
    if (keys_[i] == key) return i;
  return keys_.size();
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::gold: return "gold";
    case Provenance::opposite: return "opposite";
    case Provenance::shuffled: return "shuffled";
    case Provenance::random: return "random";
  }
  return "unknown";
}

Matrix to_matrix(std::span<const DiffVecInstance> instances) {
  if (instances.empty()) return {};
  Matrix m(instances.size(), instances.front().vector.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (instances[i].vector.size() != m.cols()) throw Error("to_matrix: inconsistent vector dimensions");
    std::copy(instances[i].vector.begin(), instances[i].vector.end(), m.row(i).begin());
  }
  return m;
}

std::vector<std::string> labels_of(std::span<const DiffVecInstance> instances) {
  std::vector<std::string> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(inst.label);
  return out;
}

std::vector<RelationTriple> parse_triples(std::istream& in, const std::string& source,
                                          const RelationInventory& inventory) {
  std::vector<RelationTriple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 3)
      throw ParseError(source, line_no, "expected 3 tab-separated columns, found " + std::to_string(cols.size()));
    if (cols[1].empty() || cols[2].empty()) throw ParseError(source, line_no, "empty word");
    std::string label;
    if (cols[0] == kRandomLabel || cols[0] == kNegativeLabel) {
      label = cols[0];
    } else if (auto canonical = inventory.resolve(cols[0])) {
      label = *canonical;
    } else {
      throw ParseError(source, line_no, "unknown relation label '" + cols[0] + "'");
    }
    out.push_back({std::move(label), std::move(cols[1]), std::move(cols[2])});
  }
  return out;
}

std::vector<RelationTriple> load_triples(const std::filesystem::path& path, const RelationInventory& inventory) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open triple file " + path.string());
  return parse_triples(in, path.string(), inventory);
}

void write_triples(std::span<const RelationTriple> triples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write triple file " + path.string());
  for (const auto& t : triples) out << t.relation << '\t' << t.word1 << '\t' << t.word2 << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

FilterResult dedupe_and_filter(std::span<const RelationTriple> triples, const std::set<std::string>& vocab,
                               const RelationInventory* priority) {
  FilterResult result;
  std::set<RelationTriple> seen;
  std::map<WordPair, std::size_t> pair_slot;  // pair -> index in result.triples
  std::vector<bool> keep;

  for (const auto& t : triples) {
    if (!vocab.contains(t.word1) || !vocab.contains(t.word2)) {
      ++result.dropped_oov;
      continue;
    }
    if (!seen.insert(t).second) {
      ++result.dropped_duplicate;
      continue;
    }
    WordPair pair{t.word1, t.word2};
    auto it = pair_slot.find(pair);
    if (it != pair_slot.end()) {
      ++result.dropped_conflict;
      if (priority && priority->rank(t.relation) < priority->rank(result.triples[it->second].relation))
        result.triples[it->second] = t;
      continue;
    }
    if (fold_case(t.word1) == fold_case(t.word2)) ++result.identical_forms;
    pair_slot.emplace(std::move(pair), result.triples.size());
    result.triples.push_back(t);
  }
  return result;
}

std::vector<DiffVecInstance> make_diffvecs(std::span<const RelationTriple> triples, const EmbeddingTable& table,
                                           Provenance provenance) {
  std::vector<DiffVecInstance> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    auto v1 = table.lookup(t.word1);
    auto v2 = table.lookup(t.word2);
    DiffVecInstance inst;
    inst.vector.resize(table.dim());
    for (std::size_t j = 0; j < table.dim(); ++j) inst.vector[j] = v2[j] - v1[j];
    inst.label = t.relation;
    inst.provenance = provenance;
    inst.pair = {t.word1, t.word2};
    out.push_back(std::move(inst));
  }
  return out;
}

HoldoutSplit split_holdout(std::span<const std::string> labels, double dev_fraction, std::uint64_t seed,
                           bool stratified) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) throw Error("split_holdout: dev_fraction must lie in (0, 1)");
  HoldoutSplit split;
  auto take = [&](std::vector<std::size_t>& group, Prng rng) {
    rng.shuffle(std::span(group));
    const auto n_dev = static_cast<std::size_t>(std::llround(static_cast<double>(group.size()) * dev_fraction));
    split.dev.insert(split.dev.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_dev));
    split.main.insert(split.main.end(), group.begin() + static_cast<std::ptrdiff_t>(n_dev), group.end());
  };

  if (!stratified) {
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), 0);
    take(all, Prng(seed));
  } else {
    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, fresh] = groups.try_emplace(labels[i]);
      if (fresh) order.push_back(labels[i]);
      it->second.push_back(i);
    }
    for (const auto& label : order) {
      auto& group = groups[label];
      if (group.size() < 2) {
        split.warnings.push_back("relation '" + label + "' has fewer than 2 instances; kept in main split");
        split.main.insert(split.main.end(), group.begin(), group.end());
        continue;
      }
      take(group, Prng::split(seed, label));
    }
  }
  std::sort(split.main.begin(), split.main.end());
  std::sort(split.dev.begin(), split.dev.end());
  return split;
}

LexicalSplit lexical_split(std::span<const RelationTriple> triples, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("lexical_split: test_fraction must lie in (0, 1)");
  std::set<std::string> vocab;
  for (const auto& t : triples) {
    vocab.insert(t.word1);
    vocab.insert(t.word2);
  }
  std::vector<std::string> words(vocab.begin(), vocab.end());
  Prng rng = Prng::split(seed, "lexical_split");
  rng.shuffle(std::span(words));
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(words.size()) * test_fraction));

  LexicalSplit split;
  split.test_words.insert(words.begin(), words.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train_words.insert(words.begin() + static_cast<std::ptrdiff_t>(n_test), words.end());
  for (const auto& t : triples) {
    const bool a = split.test_words.contains(t.word1);
    const bool b = split.test_words.contains(t.word2);
    if (a && b)
      split.test.push_back(t);
    else if (!a && !b)
      split.train.push_back(t);
    else
      ++split.dropped;
  }
  if (split.train.empty() || split.test.empty())
    throw Error("lexical_split: " + std::string(split.train.empty() ? "training" : "test") +
                " side is empty; try a different seed or test fraction");
  return split;
}

FrequencyList::FrequencyList(std::vector<std::pair<std::string, std::uint64_t>> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (const auto& [w, n] : entries_) {
    if (w.empty()) throw Error("FrequencyList: empty word");
    if (n == 0) throw Error("FrequencyList: non-positive frequency for '" + w + "'");
    if (!seen.insert(w).second) throw Error("FrequencyList: duplicate word '" + w + "'");
  }
}

FrequencyList load_frequency_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open frequency list " + path.string());
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2)
      throw ParseError(path.string(), line_no, "expected word<TAB>count, found " + std::to_string(cols.size()) +
                                                   " columns");
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), n);
    if (ec != std::errc() || ptr != cols[1].data() + cols[1].size() || n == 0)
      throw ParseError(path.string(), line_no, "count must be a positive integer");
    if (cols[0].empty()) throw ParseError(path.string(), line_no, "empty word");
    if (!seen.insert(cols[0]).second) throw ParseError(path.string(), line_no, "duplicate word '" + cols[0] + "'");
    entries.emplace_back(std::move(cols[0]), n);
  }
  return FrequencyList(std::move(entries));
}

void write_frequency_list(const FrequencyList& freq, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write frequency list " + path.string());
  for (const auto& [w, n] : freq.entries()) out << w << '\t' << n << '\n';
}

// Efraimidis-Spirakis weighted sampling without replacement: keep the
// lexicon_size largest keys log(u) / w.
std::vector<std::string> sample_lexicon(const FrequencyList& freq, std::size_t lexicon_size, std::uint64_t seed) {
  if (lexicon_size > freq.size())
    throw Error("sample_lexicon: lexicon size " + std::to_string(lexicon_size) + " exceeds frequency list size " +
                std::to_string(freq.size()));
  Prng rng = Prng::split(seed, "lexicon");
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(freq.size());
  for (std::size_t i = 0; i < freq.size(); ++i) {
    double u = 0.0;
    do {
      u = rng.uniform();
    } while (u == 0.0);
    keys.emplace_back(std::log(u) / static_cast<double>(freq.entries()[i].second), i);
  }
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(lexicon_size), keys.end(),
                    [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : a.second < b.second; });
  std::vector<std::string> lexicon;
  for (std::size_t i = 0; i < lexicon_size; ++i) lexicon.push_back(freq.entries()[keys[i].second].first);
  return lexicon;
}

std::vector<RelationTriple> gen_random_pairs(const FrequencyList& freq, std::size_t lexicon_size, std::size_t n,
                                             const std::set<WordPair>& exclude, std::uint64_t seed) {
  const auto lexicon = sample_lexicon(freq, lexicon_size, seed);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
  for (std::uint32_t a = 0; a < lexicon.size(); ++a)
    for (std::uint32_t b = 0; b < lexicon.size(); ++b)
      if (a != b && !exclude.contains({lexicon[a], lexicon[b]})) candidates.emplace_back(a, b);
  if (n > candidates.size())
    throw Error("gen_random_pairs: requested " + std::to_string(n) + " pairs but only " +
                std::to_string(candidates.size()) + " are available");

  Prng rng = Prng::split(seed, "pairs");
  std::vector<RelationTriple> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    out.push_back({std::string(kRandomLabel), lexicon[candidates[i].first], lexicon[candidates[i].second]});
  }
  return out;
}

NegativeSamples synth_negatives(std::span<const DiffVecInstance> gold, const EmbeddingTable& table,
                                std::uint64_t seed) {
  std::unordered_map<std::string, std::vector<std::string>> word2s;
  std::unordered_map<std::string, std::unordered_set<std::string>> word2_seen;
  std::set<std::tuple<std::string, std::string, std::string>> gold_pairs;
  for (const auto& g : gold) {
    if (word2_seen[g.label].insert(g.pair.second).second) word2s[g.label].push_back(g.pair.second);
    gold_pairs.emplace(g.label, g.pair.first, g.pair.second);
  }

  NegativeSamples out;
  std::set<std::string> warned;
  Prng rng = Prng::split(seed, "negatives");
  const std::size_t dim = table.dim();
  for (const auto& g : gold) {
    const auto& [w1, w2] = g.pair;
    auto v1 = table.lookup(w1);
    auto v2 = table.lookup(w2);

    DiffVecInstance opp;
    opp.vector.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) opp.vector[j] = v1[j] - v2[j];
    opp.label = std::string(kNegativeLabel);
    opp.provenance = Provenance::opposite;
    opp.pair = {w2, w1};
    out.instances.push_back(std::move(opp));
    ++out.opposite;

    std::vector<const std::string*> preferred, fallback;
    for (const auto& cand : word2s[g.label]) {
      if (cand == w2) continue;
      fallback.push_back(&cand);
      if (!gold_pairs.contains({g.label, w1, cand})) preferred.push_back(&cand);
    }
    const auto& pool = preferred.empty() ? fallback : preferred;
    if (pool.empty()) {
      ++out.skipped_shuffles;
      if (warned.insert(g.label).second)
        out.warnings.push_back("relation '" + g.label + "' has a single word2 value; shuffled samples skipped");
      continue;
    }
    const std::string& w2p = *pool[static_cast<std::size_t>(rng.below(pool.size()))];
    auto v2p = table.lookup(w2p);
    DiffVecInstance shuf;
    shuf.vector.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) shuf.vector[j] = v2p[j] - v1[j];
    shuf.label = std::string(kNegativeLabel);
    shuf.provenance = Provenance::shuffled;
    shuf.pair = {w1, w2p};
    out.instances.push_back(std::move(shuf));
    ++out.shuffled;
  }
  if (out.skipped_shuffles > 0)
    out.warnings.push_back("negative balance approximate: " + std::to_string(out.skipped_shuffles) +
                           " shuffled samples skipped");
  return out;
}

}  // namespace diffvec
