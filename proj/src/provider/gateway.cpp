#include "edgebook/provider/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "edgebook/core/text.hpp"

namespace edgebook::provider {
namespace {

class AdmissionSlot {
 public:
  explicit AdmissionSlot(Admission& a) : admission_(a) { admission_.acquire(); }
  ~AdmissionSlot() { admission_.release(); }
  AdmissionSlot(const AdmissionSlot&) = delete;
  AdmissionSlot& operator=(const AdmissionSlot&) = delete;

 private:
  Admission& admission_;
};

[[noreturn]] void rethrow_for_doc(const Error& e, const std::optional<std::string>& doc_id) {
  if (doc_id && !e.doc_id()) throw Error(e.code(), e.what(), *doc_id);
  throw e;
}

bool is_malformed(const Error& e) { return e.code() == ErrorCode::kMalformedResponse; }

std::optional<std::string> check_rule(const EdgeCaseRule& rule, const char* what) {
  if (is_blank(rule.case_description) || is_blank(rule.action)) {
    return std::string(what) + " needs a non-empty case_description and action";
  }
  return std::nullopt;
}

std::optional<std::string> check_annotation(const AnnotatorOutput& out,
                                            std::span<const int> label_values) {
  if (std::find(label_values.begin(), label_values.end(), out.label) == label_values.end()) {
    std::string allowed;
    for (int v : label_values) allowed += (allowed.empty() ? "" : ", ") + std::to_string(v);
    return "label " + std::to_string(out.label) + " is not one of [" + allowed + "]";
  }
  if (!std::isfinite(out.confidence) || out.confidence < 0.0 || out.confidence > 1.0) {
    return "confidence must be a probability in [0,1], got " + std::to_string(out.confidence);
  }
  if (out.edge_rule) return check_rule(*out.edge_rule, "edge_case");
  return std::nullopt;
}

std::optional<std::string> check_summary(const ClusterSummary& s) {
  if (is_blank(s.high_level_description)) return "high_level_description is empty";
  return check_rule(s.suggested_rule, "suggested rule");
}

}  // namespace

void Admission::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return free_ > 0; });
  --free_;
}

void Admission::release() {
  {
    std::lock_guard lock(mu_);
    ++free_;
  }
  cv_.notify_one();
}

MergeResult repair_merge_partition(const std::vector<EdgeCluster>& clusters,
                                   const std::vector<MergeGroup>& groups) {
  MergeResult result;
  std::unordered_map<std::string, const EdgeCluster*> by_id;
  for (const auto& c : clusters) by_id.emplace(c.cluster_id, &c);

  std::unordered_set<std::string> assigned;
  std::vector<MergeGroup> kept;
  for (const auto& g : groups) {
    MergeGroup clean{{}, g.high_level_description, g.suggested_rule};
    for (const auto& id : g.source_cluster_ids) {
      if (!by_id.count(id)) {
        result.violations.push_back("unknown cluster id " + id);
      } else if (!assigned.insert(id).second) {
        result.violations.push_back("cluster " + id + " assigned twice");
      } else {
        clean.source_cluster_ids.push_back(id);
      }
    }
    if (clean.source_cluster_ids.empty()) continue;
    if (check_summary({clean.high_level_description, clean.suggested_rule})) {
      const EdgeCluster& first = *by_id.at(clean.source_cluster_ids.front());
      result.violations.push_back("merged case without a usable rule; using cluster " +
                                  first.cluster_id + "'s");
      clean.high_level_description = first.high_level_description;
      clean.suggested_rule = first.suggested_rule;
    }
    kept.push_back(std::move(clean));
  }
  for (const auto& c : clusters) {
    if (assigned.count(c.cluster_id)) continue;
    result.violations.push_back("cluster " + c.cluster_id + " missing from merge output");
    kept.push_back({{c.cluster_id}, c.high_level_description, c.suggested_rule});
  }

  for (std::size_t i = 0; i < kept.size(); ++i) {
    MergedEdgeCase m;
    m.merged_id = "m" + std::to_string(i);
    m.source_cluster_ids = kept[i].source_cluster_ids;
    m.high_level_description = kept[i].high_level_description;
    m.suggested_rule = kept[i].suggested_rule;
    std::unordered_set<std::string> seen;
    for (const auto& id : m.source_cluster_ids) {
      for (const auto& doc : by_id.at(id)->member_doc_ids) {
        if (seen.insert(doc).second) m.member_doc_ids.push_back(doc);
      }
    }
    result.merged.push_back(std::move(m));
  }
  return result;
}

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions options)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      admission_(std::max(1, options_.max_parallel)) {
  if (!provider_) fail(ErrorCode::kInvalidArgument, "gateway needs a provider");
  if (options_.max_parallel < 1) fail(ErrorCode::kInvalidArgument, "max_parallel must be >= 1");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

template <typename Fn>
auto Gateway::with_retries(const Fn& fn, const std::optional<std::string>& doc_id) {
  auto backoff = options_.retry.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      AdmissionSlot slot(admission_);
      return fn();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kProviderUnavailable || attempt >= options_.retry.max_retries) {
        rethrow_for_doc(e, doc_id);
      }
    } catch (const std::exception& e) {
      rethrow_for_doc(Error(ErrorCode::kMalformedResponse, e.what()), doc_id);
    }
    options_.sleep(backoff);
    backoff = std::min(options_.retry.max_backoff,
                       std::chrono::milliseconds(static_cast<long long>(
                           static_cast<double>(backoff.count()) * options_.retry.multiplier)));
  }
}

template <typename Fn>
void Gateway::parallel_for(std::size_t n, const Fn& fn) {
  const std::size_t workers = std::min<std::size_t>(n, options_.max_parallel);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

AnnotatorOutput Gateway::annotate_one(std::string_view codebook_prompt, const Document& doc,
                                      std::span<const int> label_values) {
  const auto attempt = [&](const std::optional<std::string>& hint) {
    return with_retries([&] { return provider_->annotate(codebook_prompt, doc, hint); },
                        doc.doc_id);
  };
  std::optional<std::string> problem;
  try {
    AnnotatorOutput out = attempt(std::nullopt);
    problem = check_annotation(out, label_values);
    if (!problem) return out;
  } catch (const Error& e) {
    if (!is_malformed(e)) throw;
    problem = e.what();
  }
  try {
    AnnotatorOutput out = attempt(problem);
    if (auto again = check_annotation(out, label_values)) {
      throw Error(ErrorCode::kMalformedResponse, "after repair: " + *again, doc.doc_id);
    }
    return out;
  } catch (const Error& e) {
    if (!is_malformed(e)) throw;
    throw Error(ErrorCode::kMalformedResponse, e.what(), doc.doc_id);
  }
}

std::vector<AnnotationOutcome> Gateway::annotate_all(
    std::string_view codebook_prompt, std::span<const Document> docs,
    std::span<const int> label_values,
    const std::function<void(std::size_t, std::size_t)>& progress) {
  std::vector<AnnotationOutcome> out(docs.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  parallel_for(docs.size(), [&](std::size_t i) {
    try {
      out[i] = annotate_one(codebook_prompt, docs[i], label_values);
    } catch (const Error& e) {
      out[i] = AnnotationFailure{docs[i].doc_id, e.code(), e.what()};
    } catch (const std::exception& e) {
      out[i] = AnnotationFailure{docs[i].doc_id, ErrorCode::kMalformedResponse, e.what()};
    }
    const std::size_t finished = ++done;
    if (progress) {
      std::lock_guard lock(progress_mu);
      progress(finished, docs.size());
    }
  });
  return out;
}

ClusterSummary Gateway::summarize_cluster(const std::vector<EdgeCaseRule>& cluster_rules,
                                          std::string_view codebook_prompt) {
  if (cluster_rules.empty()) fail(ErrorCode::kInvalidArgument, "cluster has no rules");
  const auto attempt = [&](const std::optional<std::string>& hint) {
    return with_retries(
        [&] { return provider_->summarize(cluster_rules, codebook_prompt, hint); },
        std::nullopt);
  };
  std::optional<std::string> problem;
  try {
    ClusterSummary s = attempt(std::nullopt);
    problem = check_summary(s);
    if (!problem) return s;
  } catch (const Error& e) {
    if (!is_malformed(e)) throw;
    problem = e.what();
  }
  ClusterSummary s = attempt(problem);
  if (auto again = check_summary(s)) {
    fail(ErrorCode::kMalformedResponse, "cluster summary after repair: " + *again);
  }
  return s;
}

std::vector<ClusterSummary> Gateway::summarize_clusters(
    const std::vector<std::vector<EdgeCaseRule>>& clusters, std::string_view codebook_prompt) {
  std::vector<ClusterSummary> out(clusters.size());
  std::vector<std::exception_ptr> errors(clusters.size());
  parallel_for(clusters.size(), [&](std::size_t i) {
    try {
      out[i] = summarize_cluster(clusters[i], codebook_prompt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

MergeResult Gateway::merge_summaries(const std::vector<EdgeCluster>& clusters,
                                     std::string_view codebook_prompt) {
  if (clusters.empty()) fail(ErrorCode::kInvalidArgument, "nothing to merge");
  if (clusters.size() == 1) {
    return repair_merge_partition(clusters, {{{clusters[0].cluster_id},
                                              clusters[0].high_level_description,
                                              clusters[0].suggested_rule}});
  }
  const auto attempt = [&](const std::optional<std::string>& hint) {
    return with_retries([&] { return provider_->merge(clusters, codebook_prompt, hint); },
                        std::nullopt);
  };
  std::vector<MergeGroup> groups;
  try {
    groups = attempt(std::nullopt);
  } catch (const Error& e) {
    if (!is_malformed(e)) throw;
    groups = attempt(std::string(e.what()));
  }
  return repair_merge_partition(clusters, groups);
}

std::vector<Vector> Gateway::embed_texts(std::span<const std::string> texts) {
  if (texts.empty()) fail(ErrorCode::kEmptyInput, "no texts to embed");
  for (const auto& t : texts) {
    if (is_blank(t)) fail(ErrorCode::kInvalidArgument, "cannot embed an empty text");
  }
  const std::size_t batch = std::max<std::size_t>(1, provider_->embed_batch_size());
  const std::size_t n_batches = (texts.size() + batch - 1) / batch;
  std::vector<std::vector<Vector>> parts(n_batches);
  std::vector<std::exception_ptr> errors(n_batches);
  parallel_for(n_batches, [&](std::size_t b) {
    try {
      const auto first = texts.begin() + static_cast<std::ptrdiff_t>(b * batch);
      const auto last = texts.begin() +
                        static_cast<std::ptrdiff_t>(std::min(texts.size(), (b + 1) * batch));
      const std::vector<std::string> chunk(first, last);
      parts[b] = with_retries([&] { return provider_->embed(chunk); }, std::nullopt);
      if (parts[b].size() != chunk.size()) {
        fail(ErrorCode::kMalformedResponse, "embedding count does not match input count");
      }
    } catch (...) {
      errors[b] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Vector> out;
  out.reserve(texts.size());
  for (auto& part : parts) {
    for (auto& v : part) out.push_back(std::move(v));
  }
  const std::size_t dim = out.front().size();
  for (auto& v : out) {
    if (v.empty() || v.size() != dim) {
      fail(ErrorCode::kMalformedResponse, "embeddings have inconsistent dimensions");
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!std::isfinite(norm) || norm == 0.0) {
      fail(ErrorCode::kMalformedResponse, "embedding has zero or non-finite norm");
    }
    for (double& x : v) x /= norm;
  }
  return out;
}

}  // namespace edgebook::provider
