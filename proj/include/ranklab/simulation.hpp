#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranklab/dataset.hpp"

namespace ranklab {

// One behavior cluster: all its sessions share the position-bias severity eta.
struct UserCluster {
  std::string user_id;
  double eta = 0.0;
};

// Cluster set ordered by decreasing eta (most position-biased first), plus the
// geometric ratio between consecutive clusters' session counts.
class UserPopulation {
 public:
  UserPopulation(std::vector<UserCluster> clusters, double session_ratio = 1.25);

  // Clusters named u1..uN for the given severities.
  static UserPopulation from_etas(const std::vector<double>& etas, double session_ratio = 1.25);

  size_t size() const { return clusters_.size(); }
  const UserCluster& cluster(size_t index) const { return clusters_[index]; }
  const std::vector<UserCluster>& clusters() const { return clusters_; }
  double session_ratio() const { return session_ratio_; }
  std::optional<size_t> find_user(const std::string& user_id) const;

 private:
  std::vector<UserCluster> clusters_;
  double session_ratio_;
};

// Reference eta schedules for 5, 10, or 20 clusters.
std::vector<double> default_eta_schedule(int num_clusters);

// Per-user multinomial over train queries, stored dense and aligned with the
// train dataset's query order.
struct UserQueryDistribution {
  std::vector<std::vector<double>> probs;       // [user][query]
  std::vector<std::vector<double>> cumulative;  // prefix sums for sampling
  size_t num_users() const { return probs.size(); }
};

// Position-based examination model: P(e=1 | position, user) = (1/position)^eta.
double examination_probability(int position, double eta);

// Grade-to-relevance-probability mapping with click noise epsilon:
// P(r=1) = epsilon + (1 - epsilon) * 0.25 * grade.
double relevance_probability(int grade, double epsilon);

// Random sparse multinomials: uniform weight per query, independently zeroed
// with probability `sparsity`, renormalized. A user whose draws all zero out
// is redrawn from its own stream.
UserQueryDistribution build_user_query_distribution(size_t num_train_queries,
                                                    const UserPopulation& population,
                                                    double sparsity, uint64_t seed);

// Session counts proportional to ratio^(|U|-i) for the i-th cluster
// (1-indexed, most biased first), largest-remainder rounded to sum to total.
std::vector<uint64_t> session_counts(uint64_t total_sessions, const UserPopulation& population);

struct Session {
  uint32_t query_index = 0;  // into the train dataset
  uint32_t user_index = 0;   // into the population
  std::vector<uint32_t> ranked_docs;  // doc indices within the query; position = index + 1
  std::vector<uint8_t> clicks;        // aligned with ranked_docs
};

struct ClickLog {
  std::vector<Session> sessions;
  size_t num_users = 0;
};

// Per train-query index: the logged list shown for that query (<= 10 docs).
using ProductionRankings = std::vector<std::vector<uint32_t>>;

// Simulates `total_sessions` sessions: each cluster gets its geometric share,
// draws queries i.i.d. from its multinomial, and each impression clicks iff
// an examination draw and a relevance draw both succeed. Every session's
// randomness comes from a stream derived from (seed, global session index),
// so output is bit-identical for any worker count.
ClickLog simulate_log(const Dataset& train, const ProductionRankings& rankings,
                      const UserPopulation& population, const UserQueryDistribution& uq_dist,
                      uint64_t total_sessions, double epsilon, uint64_t seed,
                      int num_threads = 1);

// Click-through rate for positions 1..10 over the whole log.
std::array<double, kListTruncation> position_ctr(const ClickLog& log);

// Line-delimited records {"query_id","user_id","ranked_doc_ids","clicks"}.
std::string click_log_to_jsonl(const ClickLog& log, const Dataset& train,
                               const UserPopulation& population);
ClickLog click_log_from_jsonl(const std::vector<std::string>& lines, const Dataset& train,
                              const UserPopulation& population);

std::string position_ctr_to_csv(const std::array<double, kListTruncation>& ctr);

}  // namespace ranklab
