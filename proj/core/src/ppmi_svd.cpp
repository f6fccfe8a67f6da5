#include "diffvec/ppmi_svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "diffvec/error.hpp"
#include "diffvec/sym_eig.hpp"

namespace diffvec {

std::size_t Corpus::token_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

namespace {

// Non-ASCII bytes count as textual so UTF-8 words survive.
bool is_textual(std::string_view token) {
  return std::any_of(token.begin(), token.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
  });
}

}  // namespace

Corpus preprocess_corpus(std::istream& text, std::uint64_t min_count, std::size_t max_vocab) {
  std::vector<std::vector<std::string>> raw_segments(1);
  std::unordered_map<std::string, std::uint64_t> freq;
  std::string line;
  while (std::getline(text, line)) {
    std::istringstream ls(line);
    std::string token;
    bool any = false;
    while (ls >> token) {
      any = true;
      if (!is_textual(token)) continue;
      for (char& c : token)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      ++freq[token];
      raw_segments.back().push_back(std::move(token));
    }
    if (!any && !raw_segments.back().empty()) raw_segments.emplace_back();
  }

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, n] : freq)
    if (n >= min_count) kept.emplace_back(w, n);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (max_vocab > 0 && kept.size() > max_vocab) kept.resize(max_vocab);
  if (kept.empty()) throw Error("preprocess_corpus: no word reaches the frequency threshold");

  Corpus corpus;
  std::unordered_map<std::string, std::uint32_t> ids;
  for (auto& [w, n] : kept) {
    ids.emplace(w, static_cast<std::uint32_t>(corpus.vocab.size()));
    corpus.vocab.push_back(w);
    corpus.frequency.push_back(n);
  }
  for (const auto& seg : raw_segments) {
    std::vector<std::uint32_t> out;
    for (const auto& tok : seg) {
      auto it = ids.find(tok);
      if (it != ids.end()) out.push_back(it->second);
    }
    if (!out.empty()) corpus.segments.push_back(std::move(out));
  }
  return corpus;
}

Corpus preprocess_corpus(const std::string& text, std::uint64_t min_count, std::size_t max_vocab) {
  std::istringstream in(text);
  return preprocess_corpus(in, min_count, max_vocab);
}

std::uint64_t CooccurrenceCounts::count(std::uint32_t w, std::uint32_t c) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{w, c}, [](const auto& e, const auto& key) {
    return std::pair{e.word, e.context} < key;
  });
  return it != entries.end() && it->word == w && it->context == c ? it->count : 0;
}

namespace {

void finalize(CooccurrenceCounts& counts, const std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>& cells) {
  const std::size_t v = counts.vocab.size();
  counts.entries.clear();
  counts.word_totals.assign(v, 0);
  counts.context_totals.assign(v, 0);
  counts.total = 0;
  for (const auto& [key, n] : cells) {
    if (n == 0) continue;
    counts.entries.push_back({key.first, key.second, n});
    counts.word_totals[key.first] += n;
    counts.context_totals[key.second] += n;
    counts.total += n;
  }
}

}  // namespace

CooccurrenceCounts build_cooccurrence(const Corpus& corpus, std::size_t window) {
  if (window == 0) throw Error("build_cooccurrence: window must be at least 1");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cells;
  for (const auto& seg : corpus.segments) {
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const std::size_t hi = std::min(seg.size(), i + window + 1);
      for (std::size_t j = i + 1; j < hi; ++j) {
        ++cells[{seg[i], seg[j]}];
        ++cells[{seg[j], seg[i]}];
      }
    }
  }
  CooccurrenceCounts counts;
  counts.vocab = corpus.vocab;
  counts.window = window;
  finalize(counts, cells);
  return counts;
}

CooccurrenceCounts merge_counts(const CooccurrenceCounts& a, const CooccurrenceCounts& b) {
  if (a.vocab != b.vocab) throw Error("merge_counts: vocabularies differ");
  if (a.window != b.window) throw Error("merge_counts: windows differ");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cells;
  for (const auto& e : a.entries) cells[{e.word, e.context}] += e.count;
  for (const auto& e : b.entries) cells[{e.word, e.context}] += e.count;
  CooccurrenceCounts out;
  out.vocab = a.vocab;
  out.window = a.window;
  finalize(out, cells);
  return out;
}

double SparseMatrix::at(std::uint32_t row, std::uint32_t col) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), std::pair{row, col}, [](const auto& e, const auto& key) {
    return std::pair{e.row, e.col} < key;
  });
  return it != entries.end() && it->row == row && it->col == col ? it->value : 0.0;
}

Matrix SparseMatrix::to_dense() const {
  Matrix m(rows, cols);
  for (const auto& e : entries) m(e.row, e.col) = e.value;
  return m;
}

SparseMatrix compute_ppmi(const CooccurrenceCounts& counts, double cds, double shift) {
  if (!(cds > 0.0 && cds <= 1.0)) throw Error("compute_ppmi: cds must lie in (0, 1]");
  if (!(shift >= 1.0)) throw Error("compute_ppmi: shift must be at least 1");

  const std::size_t v = counts.vocab.size();
  std::vector<double> smoothed(v);
  double smoothed_total = 0.0;
  for (std::size_t c = 0; c < v; ++c) {
    smoothed[c] = std::pow(static_cast<double>(counts.context_totals[c]), cds);
    smoothed_total += smoothed[c];
  }

  SparseMatrix out;
  out.rows = v;
  out.cols = v;
  const double total = static_cast<double>(counts.total);
  const double log_shift = std::log(shift);
  for (const auto& e : counts.entries) {
    const double p_wc = static_cast<double>(e.count) / total;
    const double p_w = static_cast<double>(counts.word_totals[e.word]) / total;
    const double p_c = smoothed[e.context] / smoothed_total;
    const double value = std::log(p_wc / (p_w * p_c)) - log_shift;
    if (value > 0.0) out.entries.push_back({e.word, e.context, value});
  }
  return out;
}

SvdEmbedding truncated_svd_embed(const SparseMatrix& matrix, const std::vector<std::string>& row_words,
                                 std::size_t dim, double eig_weight) {
  if (row_words.size() != matrix.rows) throw Error("truncated_svd_embed: row label count mismatch");
  if (dim == 0 || dim > std::min(matrix.rows, matrix.cols))
    throw Error("truncated_svd_embed: dim must lie in [1, min(rows, cols)]");
  if (!(eig_weight >= 0.0 && eig_weight <= 1.0)) throw Error("truncated_svd_embed: eig_weight must lie in [0, 1]");

  const Matrix m = matrix.to_dense();
  const bool via_columns = m.cols() <= m.rows();
  const Matrix mt = m.transposed();
  const Matrix gram = via_columns ? multiply(mt, m) : multiply(m, mt);
  const EigenDecomposition eig = sym_eig(SymmetricMatrix(gram));
  const std::size_t n = eig.values.size();

  const double lambda_max = std::max(eig.values.back(), 0.0);
  const double lambda_tol =
      64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m.rows(), m.cols())) * lambda_max;

  SvdEmbedding out;
  Matrix u(m.rows(), dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const std::size_t src = n - 1 - j;
    const double lambda = eig.values[src];
    const bool zero = !(lambda > lambda_tol);
    const double sigma = zero ? 0.0 : std::sqrt(lambda);
    out.singular_values.push_back(sigma);
    if (zero) ++out.rank_deficit;

    if (via_columns) {
      if (!zero) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
          double s = 0.0;
          for (std::size_t k = 0; k < m.cols(); ++k) s += m(i, k) * eig.vectors(k, src);
          u(i, j) = s / sigma;
        }
      }
    } else {
      for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) = eig.vectors(i, src);
    }

    // Sign convention: largest-magnitude component positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < m.rows(); ++i)
      if (std::abs(u(i, j)) > std::abs(u(arg, j))) arg = i;
    if (u(arg, j) < 0.0)
      for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) = -u(i, j);
  }

  for (std::size_t j = 0; j < dim; ++j) {
    const double w = std::pow(out.singular_values[j], eig_weight);
    for (std::size_t i = 0; i < m.rows(); ++i) u(i, j) *= w;
  }
  out.table = EmbeddingTable(row_words, std::move(u), false, "ppmi-svd");
  return out;
}

}  // namespace diffvec
