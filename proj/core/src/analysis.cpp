#include "lws/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

namespace lws {

std::vector<PatternRow> substitution_pattern_stats(const Dataset& poisoned,
                                                   int n) {
  if (n != 1 && n != 2) {
    throw std::invalid_argument("pattern stats: n must be 1 or 2");
  }
  using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;
  std::map<Key, int64_t> counts;
  for (const auto& ex : poisoned.examples) {
    const auto& subs = ex.substituted_positions;
    if (n == 1) {
      for (const auto& rec : subs) {
        ++counts[{{rec.original}, {rec.chosen}}];
      }
    } else {
      for (size_t a = 0; a < subs.size(); ++a) {
        for (size_t b = a + 1; b < subs.size(); ++b) {
          // position order keeps the pair key canonical
          const auto& first = subs[a].position <= subs[b].position ? subs[a] : subs[b];
          const auto& second = subs[a].position <= subs[b].position ? subs[b] : subs[a];
          ++counts[{{first.original, second.original},
                    {first.chosen, second.chosen}}];
        }
      }
    }
  }
  std::map<std::vector<std::string>, int64_t> row_totals;
  for (const auto& [key, count] : counts) row_totals[key.first] += count;

  std::vector<PatternRow> rows;
  rows.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    PatternRow row;
    row.original = key.first;
    row.substituted = key.second;
    row.count = count;
    row.row_fraction = double(count) / double(row_totals[key.first]);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const PatternRow& a, const PatternRow& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.original != b.original) return a.original < b.original;
    return a.substituted < b.substituted;
  });
  return rows;
}

std::vector<AsrBucketRow> asr_by_poison_count(const VictimModel& victim,
                                              const Vocab& vocab,
                                              const Dataset& poisoned_test,
                                              int target_label,
                                              int top_bucket) {
  if (top_bucket < 1) {
    throw std::invalid_argument("asr_by_poison_count: top_bucket must be >= 1");
  }
  std::map<int, std::pair<int64_t, int64_t>> buckets;  // bucket -> (n, hits)
  for (const auto& ex : poisoned_test.examples) {
    const int subs = static_cast<int>(ex.substituted_positions.size());
    if (subs < 1) continue;
    const int bucket = std::min(subs, top_bucket);
    auto& [n, hits] = buckets[bucket];
    ++n;
    if (victim.predict(vocab.encode(ex.tokens)) == target_label) ++hits;
  }
  std::vector<AsrBucketRow> rows;
  for (const auto& [bucket, stats] : buckets) {
    AsrBucketRow row;
    row.bucket = std::to_string(bucket);
    if (bucket == top_bucket) row.bucket += "+";
    row.n = stats.first;
    row.asr = double(stats.second) / double(stats.first);
    rows.push_back(std::move(row));
  }
  return rows;
}

double spearman_rank_correlation(std::span<const double> a,
                                 std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("spearman: need two equal-length series");
  }
  auto ranks = [](std::span<const double> v) {
    const size_t n = v.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](size_t i, size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (double(i) + double(j)) / 2.0 + 1.0;
      for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const size_t n = a.size();
  double ma = 0, mb = 0;
  for (size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= double(n);
  mb /= double(n);
  double cov = 0, va = 0, vb = 0;
  for (size_t i = 0; i < n; ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

void write_pattern_csv(std::span<const PatternRow> rows,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "original,substituted,count,row_fraction\n";
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ' ';
      s += v[i];
    }
    return s;
  };
  for (const auto& row : rows) {
    os << join(row.original) << ',' << join(row.substituted) << ','
       << row.count << ',' << row.row_fraction << "\n";
  }
}

void write_asr_buckets_csv(std::span<const AsrBucketRow> rows,
                           const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "poisoned_words,n,asr\n";
  for (const auto& row : rows) {
    os << row.bucket << ',' << row.n << ',' << row.asr << "\n";
  }
}

}  // namespace lws
