#include "ranklab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "ranklab/io_util.hpp"
#include "ranklab/rng.hpp"

namespace ranklab {

Dataset Dataset::build(int feature_dim, std::vector<Query> queries) {
  if (feature_dim < 0) throw std::invalid_argument("feature_dim must be nonnegative");
  Dataset out;
  out.feature_dim_ = feature_dim;
  out.queries_ = std::move(queries);
  out.index_.reserve(out.queries_.size());
  for (size_t qi = 0; qi < out.queries_.size(); ++qi) {
    const Query& q = out.queries_[qi];
    if (q.docs.empty())
      throw std::invalid_argument("query " + q.query_id + " has no candidate documents");
    if (!out.index_.emplace(q.query_id, qi).second)
      throw std::invalid_argument("duplicate query id: " + q.query_id);
    std::unordered_set<std::string> seen;
    for (const QueryDocument& d : q.docs) {
      if (!seen.insert(d.doc_id).second)
        throw std::invalid_argument("duplicate doc id " + d.doc_id + " in query " + q.query_id);
      if (static_cast<int>(d.features.size()) != feature_dim)
        throw std::invalid_argument("feature dimension mismatch in query " + q.query_id);
      if (d.grade < 0 || d.grade > kMaxGrade)
        throw std::invalid_argument("grade out of range in query " + q.query_id);
    }
  }
  return out;
}

size_t Dataset::num_pairs() const {
  size_t n = 0;
  for (const Query& q : queries_) n += q.docs.size();
  return n;
}

std::optional<size_t> Dataset::find_query(const std::string& query_id) const {
  auto it = index_.find(query_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

struct ParsedLine {
  int grade;
  std::string qid;
  std::vector<std::pair<int, double>> features;  // 1-based ids, strictly increasing
};

[[noreturn]] void parse_fail(size_t line_number, const std::string& what) {
  throw std::runtime_error("LETOR parse error at line " + std::to_string(line_number) + ": " +
                           what);
}

ParsedLine parse_letor_line(const std::string& line, size_t line_number) {
  std::string body = line;
  if (auto hash = body.find('#'); hash != std::string::npos) body.resize(hash);

  std::istringstream in(body);
  ParsedLine out;
  std::string tok;
  if (!(in >> tok)) parse_fail(line_number, "missing grade");
  try {
    size_t used = 0;
    out.grade = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    parse_fail(line_number, "grade is not an integer: '" + tok + "'");
  }
  if (out.grade < 0 || out.grade > kMaxGrade)
    throw std::runtime_error("LETOR validation error at line " + std::to_string(line_number) +
                             ": grade " + std::to_string(out.grade) + " outside [0,4]");

  if (!(in >> tok) || tok.rfind("qid:", 0) != 0 || tok.size() == 4)
    parse_fail(line_number, "expected qid:<id>");
  out.qid = tok.substr(4);

  int last_fid = 0;
  while (in >> tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
      parse_fail(line_number, "malformed feature token '" + tok + "'");
    int fid = 0;
    double val = 0.0;
    try {
      size_t used = 0;
      fid = std::stoi(tok.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument(tok);
      val = std::stod(tok.substr(colon + 1), &used);
      if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      parse_fail(line_number, "malformed feature token '" + tok + "'");
    }
    if (fid < 1) parse_fail(line_number, "feature id must be >= 1");
    if (fid <= last_fid) parse_fail(line_number, "feature ids must be strictly increasing");
    last_fid = fid;
    out.features.emplace_back(fid, val);
  }
  return out;
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Dataset parse_letor(const std::vector<std::string>& lines) {
  std::vector<ParsedLine> parsed;
  int max_fid = 0;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    parsed.push_back(parse_letor_line(lines[i], i + 1));
    if (!parsed.back().features.empty()) max_fid = std::max(max_fid, parsed.back().features.back().first);
  }
  if (parsed.empty()) return Dataset::build(0, {});

  std::vector<Query> queries;
  std::unordered_map<std::string, size_t> qindex;
  for (const ParsedLine& pl : parsed) {
    auto [it, inserted] = qindex.emplace(pl.qid, queries.size());
    if (inserted) queries.push_back(Query{pl.qid, {}});
    Query& q = queries[it->second];
    QueryDocument doc;
    doc.doc_id = "d" + std::to_string(q.docs.size());
    doc.grade = pl.grade;
    doc.features.assign(max_fid, 0.0);
    for (auto [fid, val] : pl.features) doc.features[fid - 1] = val;
    q.docs.push_back(std::move(doc));
  }
  return Dataset::build(max_fid, std::move(queries));
}

std::string to_letor(const Dataset& dataset) {
  std::string out;
  for (const Query& q : dataset.queries()) {
    for (const QueryDocument& d : q.docs) {
      out += std::to_string(d.grade);
      out += " qid:" + q.query_id;
      for (size_t f = 0; f < d.features.size(); ++f) {
        if (d.features[f] != 0.0) {
          out += ' ';
          out += std::to_string(f + 1);
          out += ':';
          out += format_double(d.features[f]);
        }
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

// Grade proportions for grades 0..4, skewed toward irrelevant as in typical
// graded LTR collections.
constexpr std::array<double, 5> kGradeProportions = {0.50, 0.20, 0.15, 0.10, 0.05};

}  // namespace

Dataset generate_synthetic_dataset(int num_queries, int docs_per_query, int feature_dim,
                                   uint64_t seed, SyntheticInfo* info) {
  if (num_queries < 1 || docs_per_query < 1)
    throw std::invalid_argument("num_queries and docs_per_query must be positive");
  if (docs_per_query < kListTruncation)
    throw std::invalid_argument("docs_per_query must be >= 10");
  if (feature_dim < 4) throw std::invalid_argument("feature_dim must be >= 4");

  Rng rng(seed);

  // Fixed hidden scorer: unit linear direction plus a bounded nonlinear bump.
  std::vector<double> w(feature_dim), v(feature_dim);
  auto unit_normal_vec = [&](std::vector<double>& dst) {
    double norm = 0.0;
    for (double& x : dst) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : dst) x /= norm;
  };
  unit_normal_vec(w);
  unit_normal_vec(v);
  auto hidden_score = [&](const std::vector<double>& x) {
    double lin = 0.0, nl = 0.0;
    for (int f = 0; f < feature_dim; ++f) {
      lin += w[f] * x[f];
      nl += v[f] * x[f];
    }
    return lin + 1.5 * std::tanh(2.0 * nl);
  };

  std::vector<Query> queries(num_queries);
  std::vector<std::vector<double>> scores(num_queries);
  std::vector<double> topic(feature_dim);
  for (int qi = 0; qi < num_queries; ++qi) {
    Query& q = queries[qi];
    q.query_id = "q" + std::to_string(qi);
    q.docs.resize(docs_per_query);
    scores[qi].resize(docs_per_query);
    for (double& t : topic) t = rng.normal();
    for (int di = 0; di < docs_per_query; ++di) {
      QueryDocument& d = q.docs[di];
      d.doc_id = "d" + std::to_string(di);
      d.features.resize(feature_dim);
      for (int f = 0; f < feature_dim; ++f) d.features[f] = 0.5 * topic[f] + rng.normal();
      scores[qi][di] = hidden_score(d.features);
    }
  }

  // Grades by global score quantiles so the marginals hit the target
  // proportions exactly up to rounding.
  const size_t total = static_cast<size_t>(num_queries) * docs_per_query;
  std::vector<std::pair<double, size_t>> order;
  order.reserve(total);
  for (int qi = 0; qi < num_queries; ++qi)
    for (int di = 0; di < docs_per_query; ++di)
      order.emplace_back(scores[qi][di], static_cast<size_t>(qi) * docs_per_query + di);
  std::sort(order.begin(), order.end());

  std::array<size_t, 4> cuts;
  double cum = 0.0;
  for (int g = 0; g < 4; ++g) {
    cum += kGradeProportions[g];
    cuts[g] = static_cast<size_t>(std::floor(cum * static_cast<double>(total)));
  }
  for (size_t rank = 0; rank < total; ++rank) {
    int grade = 4;
    for (int g = 0; g < 4; ++g) {
      if (rank < cuts[g]) {
        grade = g;
        break;
      }
    }
    const size_t flat = order[rank].second;
    queries[flat / docs_per_query].docs[flat % docs_per_query].grade = grade;
  }

  if (info) info->hidden_scores = std::move(scores);
  return Dataset::build(feature_dim, std::move(queries));
}

DatasetSplit split_dataset(const Dataset& dataset, const std::array<double, 3>& ratios,
                           uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("split_dataset: dataset is empty");
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0 || std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must be nonnegative and sum to 1");

  const size_t n = dataset.num_queries();
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);

  const size_t n_valid = static_cast<size_t>(std::floor(ratios[1] * static_cast<double>(n)));
  const size_t n_test = static_cast<size_t>(std::floor(ratios[2] * static_cast<double>(n)));
  const size_t n_train = n - n_valid - n_test;

  auto collect = [&](size_t begin, size_t count) {
    std::vector<size_t> idx(perm.begin() + begin, perm.begin() + begin + count);
    std::sort(idx.begin(), idx.end());  // keep original dataset order within each part
    std::vector<Query> qs;
    qs.reserve(count);
    for (size_t i : idx) qs.push_back(dataset.query(i));
    return Dataset::build(dataset.feature_dim(), std::move(qs));
  };

  DatasetSplit split;
  split.train = collect(0, n_train);
  split.valid = collect(n_train, n_valid);
  split.test = collect(n_train + n_valid, n_test);
  return split;
}

Dataset annotation_subsample(const Dataset& dataset, double fraction, uint64_t seed) {
  if (dataset.empty()) throw std::invalid_argument("annotation_subsample: dataset is empty");
  if (fraction <= 0.0 || fraction > 1.0)
    throw std::invalid_argument("annotation_subsample: fraction must be in (0,1]");
  const size_t n = dataset.num_queries();
  const size_t k = static_cast<size_t>(std::ceil(fraction * static_cast<double>(n)));

  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (size_t i = 0; i < k; ++i) std::swap(perm[i], perm[i + rng.uniform_int(n - i)]);
  std::vector<size_t> idx(perm.begin(), perm.begin() + k);
  std::sort(idx.begin(), idx.end());

  std::vector<Query> qs;
  qs.reserve(k);
  for (size_t i : idx) qs.push_back(dataset.query(i));
  return Dataset::build(dataset.feature_dim(), std::move(qs));
}

}  // namespace ranklab
