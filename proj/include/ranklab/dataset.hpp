#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ranklab {

inline constexpr int kMaxGrade = 4;
// Logged result lists are truncated to this many positions.
inline constexpr int kListTruncation = 10;

// One judged query-document pair: dense feature vector plus a 0..4 grade.
struct QueryDocument {
  std::string doc_id;
  std::vector<double> features;
  int grade = 0;
};

struct Query {
  std::string query_id;
  std::vector<QueryDocument> docs;
};

// Immutable collection of queries with a dataset-wide feature dimension.
// Queries and documents keep a stable order, so (query index, doc index)
// pairs are valid handles everywhere downstream.
class Dataset {
 public:
  Dataset() = default;

  // Validates: every query non-empty, unique query ids, unique doc ids per
  // query, grades in [0,4], features sized to feature_dim.
  static Dataset build(int feature_dim, std::vector<Query> queries);

  int feature_dim() const { return feature_dim_; }
  size_t num_queries() const { return queries_.size(); }
  bool empty() const { return queries_.empty(); }
  size_t num_pairs() const;

  const Query& query(size_t index) const { return queries_[index]; }
  const std::vector<Query>& queries() const { return queries_; }
  std::optional<size_t> find_query(const std::string& query_id) const;

 private:
  int feature_dim_ = 0;
  std::vector<Query> queries_;
  std::unordered_map<std::string, size_t> index_;
};

struct DatasetSplit {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Optional diagnostics from the synthetic generator: the hidden scorer's
// value for every document, aligned with the dataset layout.
struct SyntheticInfo {
  std::vector<std::vector<double>> hidden_scores;
};

// LETOR text format: `<grade> qid:<id> <fid>:<val> ...` per line, feature ids
// strictly increasing and 1-based, optional trailing `# comment`. Sparse
// features are densified to the maximum feature id seen in the file.
Dataset parse_letor(const std::vector<std::string>& lines);

// Inverse of parse_letor up to zero features (which LETOR omits).
std::string to_letor(const Dataset& dataset);

// Deterministic synthetic dataset with a learnable ranking signal: each query
// draws a latent topic, documents perturb it, and a fixed hidden scorer
// (linear plus a bounded nonlinearity) induces grades via score quantiles
// with proportions {0.50, 0.20, 0.15, 0.10, 0.05} for grades 0..4.
Dataset generate_synthetic_dataset(int num_queries, int docs_per_query, int feature_dim,
                                   uint64_t seed, SyntheticInfo* info = nullptr);

// Shuffles query ids by seed, then partitions: valid and test take
// floor(ratio * n) queries each, train takes the remainder.
DatasetSplit split_dataset(const Dataset& dataset, const std::array<double, 3>& ratios,
                           uint64_t seed);

// ceil(fraction * |queries|) whole queries, uniform without replacement.
Dataset annotation_subsample(const Dataset& dataset, double fraction, uint64_t seed);

}  // namespace ranklab
