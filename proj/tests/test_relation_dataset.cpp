#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "diffvec/error.hpp"
#include "diffvec/relation_dataset.hpp"

using namespace diffvec;

namespace {

std::vector<RelationTriple> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_triples(in, "mem");
}

EmbeddingTable small_table() {
  return EmbeddingTable({"a", "b", "c", "d", "e"},
                        Matrix::from_rows({{1, 2}, {4, 6}, {0, 1}, {-1, 3}, {2, 2}}), false, "test");
}

DiffVecInstance gold(const EmbeddingTable& t, const std::string& rel, const std::string& w1, const std::string& w2) {
  std::vector<RelationTriple> one{{rel, w1, w2}};
  return make_diffvecs(one, t)[0];
}

}  // namespace

TEST_CASE("inventory lookup ignores case and separators") {
  const auto& inv = RelationInventory::standard();
  CHECK(inv.labels().size() == 15);
  CHECK(RelationInventory::classification().labels().size() == 9);
  CHECK(inv.resolve("verb3") == std::optional<std::string>("Verb_3"));
  CHECK(inv.resolve("VERB-3") == std::optional<std::string>("Verb_3"));
  CHECK(inv.resolve("NounColl") == std::optional<std::string>("Noun_Coll"));
  CHECK_FALSE(inv.contains("Synonym"));
  CHECK(inv.rank("LexSem_Hyper") == 0);
  CHECK(inv.rank("Synonym") == inv.labels().size());
}

TEST_CASE("triple lines parse into canonical triples") {
  auto t = parse("Verb_3\taccept\taccepts\n# comment\n\nNounColl\tarmy\tants\nrandom\tx\ty\n");
  REQUIRE(t.size() == 3);
  CHECK(t[0] == RelationTriple{"Verb_3", "accept", "accepts"});
  CHECK(t[1] == RelationTriple{"Noun_Coll", "army", "ants"});
  CHECK(t[2].relation == "random");
}

TEST_CASE("malformed triple lines are reported with their line number") {
  try {
    parse("Verb_3\taccept\taccepts\nVerb_3\tonly\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("Synonym\tbig\tlarge\n"), ParseError);
}

TEST_CASE("triple files round trip") {
  const auto path = std::filesystem::temp_directory_path() / "diffvec_triples_rt.tsv";
  const std::vector<RelationTriple> t{{"Verb_3", "accept", "accepts"}, {"Prefix", "do", "undo"}};
  write_triples(t, path);
  CHECK(load_triples(path) == t);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_triples(path), Error);
}

TEST_CASE("dedupe and filter") {
  const std::vector<RelationTriple> in{{"Verb_3", "a", "b"}, {"Verb_3", "a", "b"}, {"Prefix", "a", "zz"},
                                       {"Noun_SP", "a", "b"}, {"Noun_SP", "c", "c"}, {"Prefix", "c", "d"}};
  const auto r = dedupe_and_filter(in, {"a", "b", "c", "d"});
  CHECK(r.triples == std::vector<RelationTriple>{{"Verb_3", "a", "b"}, {"Noun_SP", "c", "c"}, {"Prefix", "c", "d"}});
  CHECK(r.dropped_duplicate == 1);
  CHECK(r.dropped_oov == 1);
  CHECK(r.dropped_conflict == 1);
  CHECK(r.identical_forms == 1);

  const RelationInventory prio({"Noun_SP", "Verb_3", "Prefix"});
  const auto p = dedupe_and_filter(in, {"a", "b", "c", "d"}, &prio);
  CHECK(std::count(p.triples.begin(), p.triples.end(), RelationTriple{"Noun_SP", "a", "b"}) == 1);
  CHECK(std::count(p.triples.begin(), p.triples.end(), RelationTriple{"Verb_3", "a", "b"}) == 0);
}

TEST_CASE("diffvecs are word2 minus word1") {
  const auto t = small_table();
  const std::vector<RelationTriple> tr{{"Verb_3", "a", "b"}, {"Verb_3", "b", "a"}, {"Verb_3", "c", "c"}};
  const auto d = make_diffvecs(tr, t);
  CHECK(d[0].vector == std::vector<double>{3, 4});
  CHECK(d[1].vector == std::vector<double>{-3, -4});
  CHECK(d[2].vector == std::vector<double>{0, 0});
  CHECK(d[0].provenance == Provenance::gold);
  CHECK(d[0].pair == WordPair{"a", "b"});
  const auto m = to_matrix(d);
  CHECK(m.rows() == 3);
  CHECK(m(1, 1) == -4);
  CHECK(labels_of(d) == std::vector<std::string>(3, "Verb_3"));
  const std::vector<RelationTriple> oov{{"Verb_3", "a", "nope"}};
  CHECK_THROWS_AS(make_diffvecs(oov, t), Error);
}

TEST_CASE("holdout split sizes, determinism and stratification") {
  std::vector<std::string> labels(100, "x");
  const auto s = split_holdout(labels, 0.15, 3, false);
  CHECK(s.main.size() == 85);
  CHECK(s.dev.size() == 15);
  const auto again = split_holdout(labels, 0.15, 3, false);
  CHECK(again.main == s.main);
  CHECK(again.dev == s.dev);

  const auto half = split_holdout(std::vector<std::string>(10, "r"), 0.5, 1, true);
  CHECK(half.main.size() == 5);
  CHECK(half.dev.size() == 5);

  std::vector<std::string> with_single{"a", "a", "a", "a", "lonely"};
  const auto w = split_holdout(with_single, 0.5, 1, true);
  CHECK(std::find(w.main.begin(), w.main.end(), 4u) != w.main.end());
  CHECK_FALSE(w.warnings.empty());
  CHECK_THROWS_AS(split_holdout(labels, 0.0, 1, true), Error);
  CHECK_THROWS_AS(split_holdout(labels, 1.0, 1, true), Error);
}

TEST_CASE("property: holdout splits are partitions with per-relation proportions within one") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 200;
    std::vector<std::string> labels(n);
    for (auto& l : labels) l = "r" + std::to_string(rng() % 6);
    const double frac = 0.05 + 0.9 * double(rng() % 1000) / 1000.0;
    const bool strat = trial % 2 == 0;
    const auto s = split_holdout(labels, frac, rng(), strat);
    std::vector<std::size_t> all = s.main;
    all.insert(all.end(), s.dev.begin(), s.dev.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    for (std::size_t i = 0; i < n; ++i) expect[i] = i;
    CHECK(all == expect);
    CHECK(std::is_sorted(s.main.begin(), s.main.end()));
    CHECK(std::is_sorted(s.dev.begin(), s.dev.end()));
    if (strat) {
      std::map<std::string, std::size_t> total, dev;
      for (const auto& l : labels) ++total[l];
      for (auto i : s.dev) ++dev[labels[i]];
      for (const auto& [l, t] : total) {
        if (t < 2) continue;
        CHECK(std::abs(double(dev[l]) - frac * double(t)) <= 1.0);
      }
    }
  }
}

TEST_CASE("property: lexical split keeps vocabularies disjoint and drops only straddlers") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RelationTriple> tr;
    const std::size_t words = 6 + rng() % 30;
    for (int i = 0; i < 60; ++i)
      tr.push_back({"Verb_3", "w" + std::to_string(rng() % words), "w" + std::to_string(rng() % words)});
    LexicalSplit s;
    try {
      s = lexical_split(tr, 0.4, rng());
    } catch (const Error&) {
      continue;
    }
    for (const auto& w : s.train_words) CHECK_FALSE(s.test_words.contains(w));
    CHECK(s.train.size() + s.test.size() + s.dropped == tr.size());
    for (const auto& t : s.train) CHECK((s.train_words.contains(t.word1) && s.train_words.contains(t.word2)));
    for (const auto& t : s.test) CHECK((s.test_words.contains(t.word1) && s.test_words.contains(t.word2)));
    std::size_t straddle = 0;
    for (const auto& t : tr) straddle += s.test_words.contains(t.word1) != s.test_words.contains(t.word2);
    CHECK(straddle == s.dropped);
  }
}

TEST_CASE("lexical split on two disjoint pairs") {
  const std::vector<RelationTriple> tr{{"r", "a", "b"}, {"r", "c", "d"}, {"r", "a", "c"}};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    LexicalSplit s;
    try {
      s = lexical_split(tr, 0.5, seed);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("seed") != std::string::npos);
      continue;
    }
    if (s.test_words == std::set<std::string>{"c", "d"}) {
      CHECK(s.train == std::vector<RelationTriple>{{"r", "a", "b"}});
      CHECK(s.test == std::vector<RelationTriple>{{"r", "c", "d"}});
      CHECK(s.dropped == 1);
    }
  }
  CHECK_THROWS_AS(lexical_split(tr, 1.0, 1), Error);
}

TEST_CASE("random pairs: exhaustive small case and exclusion") {
  const FrequencyList freq({{"a", 5}, {"b", 3}});
  auto p = gen_random_pairs(freq, 2, 2, {}, 4);
  REQUIRE(p.size() == 2);
  std::set<WordPair> got;
  for (const auto& t : p) {
    CHECK(t.relation == "random");
    got.insert({t.word1, t.word2});
  }
  CHECK(got == std::set<WordPair>{{"a", "b"}, {"b", "a"}});
  CHECK_THROWS_AS(gen_random_pairs(freq, 2, 3, {}, 4), Error);
  CHECK_THROWS_AS(gen_random_pairs(freq, 3, 1, {}, 4), Error);
  CHECK_THROWS_AS(gen_random_pairs(freq, 2, 2, {{"a", "b"}}, 4), Error);
}

TEST_CASE("property: random pairs avoid exclusions and self-pairs and are deterministic") {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (int i = 0; i < 40; ++i) entries.push_back({"w" + std::to_string(i), std::uint64_t(1 + i * 7)});
  const FrequencyList freq(entries);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::set<WordPair> exclude;
    for (int i = 0; i < 200; ++i) exclude.insert({"w" + std::to_string(rng() % 40), "w" + std::to_string(rng() % 40)});
    const auto seed = rng();
    const auto p = gen_random_pairs(freq, 20, 100, exclude, seed);
    CHECK(p.size() == 100);
    std::set<WordPair> seen;
    for (const auto& t : p) {
      CHECK(t.word1 != t.word2);
      CHECK_FALSE(exclude.contains({t.word1, t.word2}));
      CHECK(seen.insert({t.word1, t.word2}).second);
    }
    CHECK(gen_random_pairs(freq, 20, 100, exclude, seed) == p);
  }
}

TEST_CASE("lexicon sampling is proportional to frequency") {
  const FrequencyList freq({{"common", 99}, {"rare", 1}});
  int common = 0;
  const int runs = 10000;
  for (int s = 0; s < runs; ++s) common += sample_lexicon(freq, 1, std::uint64_t(s))[0] == "common";
  CHECK(std::abs(double(common) / runs - 0.99) <= 0.01);
}

TEST_CASE("frequency lists validate their entries") {
  CHECK_THROWS_AS(FrequencyList({{"a", 0}}), Error);
  CHECK_THROWS_AS(FrequencyList({{"a", 1}, {"a", 2}}), Error);
  const auto path = std::filesystem::temp_directory_path() / "diffvec_freq_rt.tsv";
  const FrequencyList f({{"a", 3}, {"b", 1}});
  write_frequency_list(f, path);
  CHECK(load_frequency_list(path).entries() == f.entries());
  std::ofstream(path) << "a\t0\n";
  CHECK_THROWS_AS(load_frequency_list(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("negative samples: negation, shuffling identity and balance") {
  const auto t = small_table();
  std::vector<DiffVecInstance> g;
  const std::vector<std::pair<std::string, std::string>> pairs{{"a", "b"}, {"c", "d"}, {"a", "e"}, {"c", "b"},
                                                               {"e", "d"}};
  for (int rep = 0; rep < 2; ++rep)
    for (const auto& [w1, w2] : pairs) g.push_back(gold(t, "Verb_3", w1, w2));
  const auto neg = synth_negatives(g, t, 9);
  CHECK(neg.instances.size() == 20);
  CHECK(neg.opposite == 10);
  CHECK(neg.shuffled == 10);
  CHECK(neg.warnings.empty());
  std::set<std::string> word2s;
  for (const auto& x : g) word2s.insert(x.pair.second);
  for (const auto& n : neg.instances) {
    CHECK(n.label == "negative");
    if (n.provenance == Provenance::opposite) {
      const auto src = gold(t, "Verb_3", n.pair.second, n.pair.first);
      for (std::size_t j = 0; j < 2; ++j) CHECK(n.vector[j] == -src.vector[j]);
    } else {
      CHECK(n.provenance == Provenance::shuffled);
      CHECK(word2s.contains(n.pair.second));
      CHECK(n.vector == gold(t, "Verb_3", n.pair.first, n.pair.second).vector);
    }
  }
  CHECK(synth_negatives(g, t, 9).instances.size() == neg.instances.size());
}

TEST_CASE("negative samples skip shuffles for single-word2 relations") {
  const auto t = small_table();
  std::vector<DiffVecInstance> g{gold(t, "Prefix", "a", "b"), gold(t, "Prefix", "c", "b")};
  const auto neg = synth_negatives(g, t, 1);
  CHECK(neg.opposite == 2);
  CHECK(neg.shuffled == 0);
  CHECK(neg.skipped_shuffles == 2);
  CHECK_FALSE(neg.warnings.empty());
}
