#include "diffvec/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "diffvec/error.hpp"

namespace diffvec {

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "text" || name == "txt") return EmbeddingFormat::text;
  if (name == "binary" || name == "bin") return EmbeddingFormat::binary;
  throw Error("unknown embedding format '" + std::string(name) + "' (expected text or binary)");
}

std::string_view to_string(EmbeddingFormat format) {
  return format == EmbeddingFormat::text ? "text" : "binary";
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Matrix vectors, bool normalized,
                               std::string source_id)
    : words_(std::move(words)),
      vectors_(std::move(vectors)),
      normalized_(normalized),
      source_id_(std::move(source_id)) {
  if (words_.size() != vectors_.rows())
    throw Error("EmbeddingTable: " + std::to_string(words_.size()) + " words but " +
                std::to_string(vectors_.rows()) + " vectors");
  if (!words_.empty() && vectors_.cols() == 0) throw Error("EmbeddingTable: dimension must be positive");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw Error("EmbeddingTable: empty word at row " + std::to_string(i));
    if (!index_.emplace(words_[i], i).second)
      throw Error("EmbeddingTable: duplicate word '" + words_[i] + "'");
    for (double x : vectors_.row(i))
      if (!std::isfinite(x)) throw Error("EmbeddingTable: non-finite value for '" + words_[i] + "'");
    if (normalized_ && std::abs(l2_norm(vectors_.row(i)) - 1.0) > 1e-6)
      throw Error("EmbeddingTable: '" + words_[i] + "' is not unit length");
  }
}

bool EmbeddingTable::contains(std::string_view word) const { return index_of(word).has_value(); }

std::optional<std::size_t> EmbeddingTable::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> EmbeddingTable::lookup(std::string_view word) const {
  auto idx = index_of(word);
  if (!idx) throw Error("word not in embeddings: '" + std::string(word) + "'");
  return vectors_.row(*idx);
}

namespace {

std::string ascii_lower(std::string s) {
  for (char& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

// Accumulates rows while applying duplicate / restriction policy.
class RowSink {
 public:
  explicit RowSink(const LoadOptions& options) : options_(options) {}

  void set_dim(std::size_t dim) { dim_ = dim; }
  std::size_t dim() const { return dim_; }

  void add(std::string word, std::span<const double> values) {
    if (options_.lowercase) word = ascii_lower(std::move(word));
    if (options_.restrict_to && !options_.restrict_to->contains(word)) {
      ++skipped_;
      return;
    }
    if (!seen_.emplace(word, words_.size()).second) {
      ++duplicates_;
      return;
    }
    words_.push_back(std::move(word));
    data_.insert(data_.end(), values.begin(), values.end());
  }

  LoadResult finish(const std::string& source_id) {
    Matrix m(words_.size(), dim_);
    std::copy(data_.begin(), data_.end(), m.data().begin());
    LoadResult result;
    result.table = EmbeddingTable(std::move(words_), std::move(m), false, source_id);
    result.duplicate_words = duplicates_;
    result.skipped_words = skipped_;
    return result;
  }

 private:
  const LoadOptions& options_;
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> seen_;
  std::size_t duplicates_ = 0;
  std::size_t skipped_ = 0;
};

LoadResult load_text(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file " + path.string());
  const std::string source = path.string();

  RowSink sink(options);
  std::optional<std::size_t> declared_count;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  std::vector<double> values;
  bool first = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    if (first) {
      first = false;
      std::size_t count = 0, dim = 0;
      if (tokens.size() == 2 && parse_number(tokens[0], count) && parse_number(tokens[1], dim)) {
        if (dim == 0) throw ParseError(source, line_no, "malformed header: dimension must be positive");
        declared_count = count;
        sink.set_dim(dim);
        continue;
      }
    }

    if (sink.dim() == 0) {
      if (tokens.size() < 2) throw ParseError(source, line_no, "row has no vector components");
      sink.set_dim(tokens.size() - 1);
    }
    if (tokens.size() - 1 != sink.dim())
      throw ParseError(source, line_no,
                       "expected " + std::to_string(sink.dim()) + " components, found " +
                           std::to_string(tokens.size() - 1));
    values.resize(sink.dim());
    for (std::size_t j = 0; j < sink.dim(); ++j) {
      if (!parse_number(tokens[j + 1], values[j]))
        throw ParseError(source, line_no, "cannot parse component " + std::to_string(j + 1) + " '" +
                                              std::string(tokens[j + 1]) + "'");
      if (!std::isfinite(values[j]))
        throw ParseError(source, line_no, "non-finite component " + std::to_string(j + 1));
    }
    ++rows;
    sink.add(std::string(tokens[0]), values);
  }
  if (declared_count && *declared_count != rows)
    throw ParseError(source, 1,
                     "header declares " + std::to_string(*declared_count) + " words, file has " +
                         std::to_string(rows));
  if (rows == 0) throw ParseError(source, 0, "no embedding rows");
  return sink.finish(path.filename().string());
}

LoadResult load_binary(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embeddings file " + path.string());
  const std::string source = path.string();

  std::string header;
  if (!std::getline(in, header)) throw ParseError(source, 1, "missing header");
  auto tokens = split_ws(header);
  std::size_t count = 0, dim = 0;
  if (tokens.size() != 2 || !parse_number(tokens[0], count) || !parse_number(tokens[1], dim) || dim == 0)
    throw ParseError(source, 1, "malformed header '" + header + "'");

  RowSink sink(options);
  sink.set_dim(dim);
  std::vector<char> raw(dim * 4);
  std::vector<double> values(dim);
  for (std::size_t i = 0; i < count; ++i) {
    const auto offset = static_cast<long long>(in.tellg());
    std::string word;
    int c = 0;
    while ((c = in.get()) == '\n' || c == '\r') {
    }
    while (c != EOF && c != ' ') {
      word.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF)
      throw ParseError(source, 0, "truncated entry " + std::to_string(i) + " at byte offset " +
                                      std::to_string(offset));
    if (word.empty())
      throw ParseError(source, 0, "empty word at byte offset " + std::to_string(offset));
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size())))
      throw ParseError(source, 0, "truncated vector for '" + word + "' at byte offset " +
                                      std::to_string(offset));
    for (std::size_t j = 0; j < dim; ++j) {
      const auto* b = reinterpret_cast<const unsigned char*>(raw.data() + 4 * j);
      const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                                 (static_cast<std::uint32_t>(b[2]) << 16) |
                                 (static_cast<std::uint32_t>(b[3]) << 24);
      const float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f))
        throw ParseError(source, 0, "non-finite component for '" + word + "' at byte offset " +
                                        std::to_string(offset));
      values[j] = f;
    }
    sink.add(std::move(word), values);
  }
  return sink.finish(path.filename().string());
}

}  // namespace

LoadResult load_embeddings(const std::filesystem::path& path, const LoadOptions& options) {
  return options.format == EmbeddingFormat::text ? load_text(path, options) : load_binary(path, options);
}

void write_embeddings(const EmbeddingTable& table, const std::filesystem::path& path,
                      EmbeddingFormat format) {
  for (const auto& w : table.words())
    if (w.find_first_of(" \t\n\r") != std::string::npos)
      throw Error("write_embeddings: word contains whitespace: '" + w + "'");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embeddings file " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    if (format == EmbeddingFormat::text) {
      for (double x : table.row(i)) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
        out << ' ';
        out.write(buf, ptr - buf);
      }
      out << '\n';
    } else {
      out << ' ';
      for (double x : table.row(i)) {
        const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
        const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                               static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
        out.write(bytes, 4);
      }
    }
  }
  if (!out) throw Error("write failed for " + path.string());
}

EmbeddingTable normalize_unit(const EmbeddingTable& table) {
  Matrix m = table.vectors();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    const double norm = l2_norm(row);
    if (norm == 0.0) throw Error("normalize_unit: zero vector for '" + table.words()[i] + "'");
    for (double& x : row) x /= norm;
  }
  return EmbeddingTable(table.words(), std::move(m), true, table.source_id());
}

EmbeddingTable scale_by_global_std(const EmbeddingTable& table, double factor) {
  if (table.empty()) throw Error("scale_by_global_std: empty table");
  const auto cells = table.vectors().data();
  double mean = 0.0;
  for (double x : cells) mean += x;
  mean /= static_cast<double>(cells.size());
  double var = 0.0;
  for (double x : cells) var += (x - mean) * (x - mean);
  var /= static_cast<double>(cells.size());
  const double sigma = std::sqrt(var);
  if (!(sigma > 0.0)) throw Error("scale_by_global_std: standard deviation is zero");

  Matrix m = table.vectors();
  const double scale = factor / sigma;
  for (double& x : m.data()) x *= scale;
  return EmbeddingTable(table.words(), std::move(m), false, table.source_id());
}

std::set<std::string> vocab_intersection(std::span<const EmbeddingTable* const> tables) {
  if (tables.empty()) throw Error("vocab_intersection: no tables given");
  std::set<std::string> result(tables.front()->words().begin(), tables.front()->words().end());
  for (std::size_t t = 1; t < tables.size(); ++t)
    std::erase_if(result, [&](const std::string& w) { return !tables[t]->contains(w); });
  return result;
}

std::set<std::string> vocab_intersection(std::span<const EmbeddingTable> tables) {
  std::vector<const EmbeddingTable*> ptrs;
  for (const auto& t : tables) ptrs.push_back(&t);
  return vocab_intersection(std::span<const EmbeddingTable* const>(ptrs));
}

NormStats norm_statistics(const EmbeddingTable& table) {
  NormStats s;
  if (table.empty()) return s;
  std::vector<double> norms;
  norms.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) norms.push_back(l2_norm(table.row(i)));
  s.min = *std::min_element(norms.begin(), norms.end());
  s.max = *std::max_element(norms.begin(), norms.end());
  for (double n : norms) s.mean += n;
  s.mean /= static_cast<double>(norms.size());
  for (double n : norms) s.stddev += (n - s.mean) * (n - s.mean);
  s.stddev = std::sqrt(s.stddev / static_cast<double>(norms.size()));
  return s;
}

}  // namespace diffvec
