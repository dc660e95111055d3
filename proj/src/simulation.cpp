#include "ranklab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ranklab/io_util.hpp"
#include "ranklab/rng.hpp"

namespace ranklab {

UserPopulation::UserPopulation(std::vector<UserCluster> clusters, double session_ratio)
    : clusters_(std::move(clusters)), session_ratio_(session_ratio) {
  if (clusters_.empty()) throw std::invalid_argument("population must have at least one cluster");
  if (session_ratio_ <= 1.0) throw std::invalid_argument("session_ratio must be > 1");
  for (size_t i = 0; i < clusters_.size(); ++i) {
    if (clusters_[i].eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
    if (i > 0 && clusters_[i].eta > clusters_[i - 1].eta)
      throw std::invalid_argument("clusters must be ordered by decreasing eta");
    for (size_t j = 0; j < i; ++j)
      if (clusters_[j].user_id == clusters_[i].user_id)
        throw std::invalid_argument("duplicate user id: " + clusters_[i].user_id);
  }
}

UserPopulation UserPopulation::from_etas(const std::vector<double>& etas, double session_ratio) {
  std::vector<UserCluster> clusters;
  clusters.reserve(etas.size());
  for (size_t i = 0; i < etas.size(); ++i)
    clusters.push_back({"u" + std::to_string(i + 1), etas[i]});
  return UserPopulation(std::move(clusters), session_ratio);
}

std::optional<size_t> UserPopulation::find_user(const std::string& user_id) const {
  for (size_t i = 0; i < clusters_.size(); ++i)
    if (clusters_[i].user_id == user_id) return i;
  return std::nullopt;
}

std::vector<double> default_eta_schedule(int num_clusters) {
  switch (num_clusters) {
    case 5:
      return {2.5, 2.0, 1.0, 0.8, 0.0};
    case 10:
      return {2.5, 2.0, 1.8, 1.5, 1.2, 1.0, 0.8, 0.5, 0.2, 0.0};
    case 20:
      return {2.5, 2.4, 2.2, 2.0, 1.9, 1.8, 1.6, 1.5, 1.4, 1.2,
              1.1, 1.0, 0.9, 0.8, 0.6, 0.5, 0.4, 0.2, 0.1, 0.0};
    default:
      throw std::invalid_argument("no default eta schedule for " +
                                  std::to_string(num_clusters) + " clusters (use 5, 10, or 20)");
  }
}

double examination_probability(int position, double eta) {
  if (position < 1) throw std::invalid_argument("position must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
  return std::pow(1.0 / static_cast<double>(position), eta);
}

double relevance_probability(int grade, double epsilon) {
  if (grade < 0 || grade > kMaxGrade) throw std::invalid_argument("grade must be in [0,4]");
  if (epsilon < 0.0 || epsilon >= 1.0) throw std::invalid_argument("epsilon must be in [0,1)");
  return epsilon + (1.0 - epsilon) * 0.25 * static_cast<double>(grade);
}

UserQueryDistribution build_user_query_distribution(size_t num_train_queries,
                                                    const UserPopulation& population,
                                                    double sparsity, uint64_t seed) {
  if (num_train_queries == 0) throw std::invalid_argument("need at least one train query");
  if (sparsity < 0.0 || sparsity >= 1.0) throw std::invalid_argument("sparsity must be in [0,1)");

  UserQueryDistribution out;
  out.probs.resize(population.size());
  out.cumulative.resize(population.size());
  for (size_t u = 0; u < population.size(); ++u) {
    Rng rng = Rng::for_stream(seed, u);
    std::vector<double>& p = out.probs[u];
    p.resize(num_train_queries);
    double total = 0.0;
    do {
      total = 0.0;
      for (size_t q = 0; q < num_train_queries; ++q) {
        double w = rng.uniform_pos();
        if (rng.uniform() < sparsity) w = 0.0;
        p[q] = w;
        total += w;
      }
    } while (total == 0.0);
    for (double& w : p) w /= total;

    std::vector<double>& cum = out.cumulative[u];
    cum.resize(num_train_queries);
    double acc = 0.0;
    for (size_t q = 0; q < num_train_queries; ++q) {
      acc += p[q];
      cum[q] = acc;
    }
    cum.back() = std::max(cum.back(), 1.0);  // guard against rounding in the sampler
  }
  return out;
}

std::vector<uint64_t> session_counts(uint64_t total_sessions, const UserPopulation& population) {
  const size_t n = population.size();
  if (total_sessions < n) throw std::invalid_argument("total_sessions must be >= cluster count");

  // weight_i = ratio^(n-1-i), so the first (most biased) cluster has the most.
  std::vector<double> weights(n);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    weights[i] = std::pow(population.session_ratio(), static_cast<double>(n - 1 - i));
    sum += weights[i];
  }

  std::vector<uint64_t> counts(n);
  std::vector<std::pair<double, size_t>> remainders(n);
  uint64_t assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const double exact = static_cast<double>(total_sessions) * weights[i] / sum;
    counts[i] = static_cast<uint64_t>(std::floor(exact));
    remainders[i] = {exact - std::floor(exact), i};
    assigned += counts[i];
  }
  // Largest remainder first; ties broken toward the more biased cluster.
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (uint64_t left = total_sessions - assigned, i = 0; left > 0; --left, ++i)
    ++counts[remainders[i % n].second];
  return counts;
}

ClickLog simulate_log(const Dataset& train, const ProductionRankings& rankings,
                      const UserPopulation& population, const UserQueryDistribution& uq_dist,
                      uint64_t total_sessions, double epsilon, uint64_t seed, int num_threads) {
  if (uq_dist.num_users() != population.size())
    throw std::invalid_argument("user-query distribution does not match population size");
  if (rankings.size() != train.num_queries())
    throw std::invalid_argument("production rankings do not match train dataset");
  if (epsilon < 0.0 || epsilon >= 1.0) throw std::invalid_argument("epsilon must be in [0,1)");

  // Every query with positive mass must have a non-empty logged list.
  for (size_t u = 0; u < population.size(); ++u)
    for (size_t q = 0; q < train.num_queries(); ++q)
      if (uq_dist.probs[u][q] > 0.0 && rankings[q].empty())
        throw std::runtime_error("query " + train.query(q).query_id +
                                 " has positive mass but no production ranking");

  const std::vector<uint64_t> counts = session_counts(total_sessions, population);
  std::vector<uint64_t> offsets(population.size() + 1, 0);
  for (size_t u = 0; u < population.size(); ++u) offsets[u + 1] = offsets[u] + counts[u];

  // Precompute per-user examination tables for positions 1..10.
  std::vector<std::array<double, kListTruncation>> exam(population.size());
  for (size_t u = 0; u < population.size(); ++u)
    for (int k = 1; k <= kListTruncation; ++k)
      exam[u][k - 1] = examination_probability(k, population.cluster(u).eta);

  ClickLog log;
  log.num_users = population.size();
  log.sessions.resize(total_sessions);

  auto simulate_range = [&](uint64_t begin, uint64_t end) {
    size_t user = 0;
    for (uint64_t s = begin; s < end; ++s) {
      while (s >= offsets[user + 1]) ++user;
      Rng rng = Rng::for_stream(seed, s);
      Session& session = log.sessions[s];
      session.user_index = static_cast<uint32_t>(user);
      session.query_index =
          static_cast<uint32_t>(rng.categorical(uq_dist.cumulative[user]));
      const std::vector<uint32_t>& list = rankings[session.query_index];
      const size_t len = std::min<size_t>(list.size(), kListTruncation);
      const Query& q = train.query(session.query_index);
      session.ranked_docs.assign(list.begin(), list.begin() + len);
      session.clicks.resize(len);
      for (size_t pos = 0; pos < len; ++pos) {
        const bool examined = rng.bernoulli(exam[user][pos]);
        const bool relevant =
            rng.bernoulli(relevance_probability(q.docs[list[pos]].grade, epsilon));
        session.clicks[pos] = static_cast<uint8_t>(examined && relevant);
      }
    }
  };

  if (num_threads <= 0) num_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (num_threads <= 1 || total_sessions < 1024) {
    simulate_range(0, total_sessions);
  } else {
    std::vector<std::thread> workers;
    const uint64_t chunk = (total_sessions + num_threads - 1) / num_threads;
    for (int t = 0; t < num_threads; ++t) {
      const uint64_t begin = chunk * t;
      const uint64_t end = std::min(total_sessions, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(simulate_range, begin, end);
    }
    for (std::thread& w : workers) w.join();
  }
  return log;
}

std::array<double, kListTruncation> position_ctr(const ClickLog& log) {
  if (log.sessions.empty()) throw std::invalid_argument("position_ctr: empty log");
  std::array<uint64_t, kListTruncation> impressions{}, clicks{};
  for (const Session& s : log.sessions) {
    for (size_t pos = 0; pos < s.ranked_docs.size(); ++pos) {
      ++impressions[pos];
      clicks[pos] += s.clicks[pos];
    }
  }
  std::array<double, kListTruncation> ctr{};
  for (int k = 0; k < kListTruncation; ++k)
    ctr[k] = impressions[k] == 0
                 ? 0.0
                 : static_cast<double>(clicks[k]) / static_cast<double>(impressions[k]);
  return ctr;
}

namespace {

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
}

}  // namespace

std::string click_log_to_jsonl(const ClickLog& log, const Dataset& train,
                               const UserPopulation& population) {
  std::string out;
  out.reserve(log.sessions.size() * 96);
  for (const Session& s : log.sessions) {
    const Query& q = train.query(s.query_index);
    out += "{\"query_id\":";
    append_json_string(out, q.query_id);
    out += ",\"user_id\":";
    append_json_string(out, population.cluster(s.user_index).user_id);
    out += ",\"ranked_doc_ids\":[";
    for (size_t i = 0; i < s.ranked_docs.size(); ++i) {
      if (i) out += ',';
      append_json_string(out, q.docs[s.ranked_docs[i]].doc_id);
    }
    out += "],\"clicks\":[";
    for (size_t i = 0; i < s.clicks.size(); ++i) {
      if (i) out += ',';
      out += s.clicks[i] ? '1' : '0';
    }
    out += "]}\n";
  }
  return out;
}

ClickLog click_log_from_jsonl(const std::vector<std::string>& lines, const Dataset& train,
                              const UserPopulation& population) {
  ClickLog log;
  log.num_users = population.size();
  log.sessions.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("click log line " + std::to_string(i + 1) + ": " + e.what());
    }
    Session s;
    const std::string query_id = j.at("query_id").get<std::string>();
    const std::string user_id = j.at("user_id").get<std::string>();
    auto qi = train.find_query(query_id);
    if (!qi) throw std::runtime_error("click log references unknown query " + query_id);
    auto ui = population.find_user(user_id);
    if (!ui) throw std::runtime_error("click log references unknown user " + user_id);
    s.query_index = static_cast<uint32_t>(*qi);
    s.user_index = static_cast<uint32_t>(*ui);
    const Query& q = train.query(*qi);
    for (const auto& doc_id : j.at("ranked_doc_ids")) {
      const std::string id = doc_id.get<std::string>();
      auto it = std::find_if(q.docs.begin(), q.docs.end(),
                             [&](const QueryDocument& d) { return d.doc_id == id; });
      if (it == q.docs.end())
        throw std::runtime_error("click log references unknown doc " + id + " in query " +
                                 query_id);
      s.ranked_docs.push_back(static_cast<uint32_t>(it - q.docs.begin()));
    }
    for (const auto& c : j.at("clicks")) s.clicks.push_back(c.get<int>() ? 1 : 0);
    if (s.clicks.size() != s.ranked_docs.size())
      throw std::runtime_error("click log line " + std::to_string(i + 1) +
                               ": clicks and ranked_doc_ids differ in length");
    log.sessions.push_back(std::move(s));
  }
  return log;
}

std::string position_ctr_to_csv(const std::array<double, kListTruncation>& ctr) {
  std::string out = "position,ctr\n";
  for (int k = 0; k < kListTruncation; ++k)
    out += std::to_string(k + 1) + "," + format_double(ctr[k]) + "\n";
  return out;
}

}  // namespace ranklab
