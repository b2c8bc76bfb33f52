#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgebook/core/types.hpp"

namespace edgebook::store {

struct IterationSummary {
  int iteration = 0;
  int codebook_version = 0;
  std::string created_at;
  std::size_t n_edge_items = 0;
  std::size_t n_merged = 0;
  std::optional<double> positive_f1;

  bool operator==(const IterationSummary&) const = default;
};

struct TaskRecord {
  std::string task_id;
  std::string created_at;
  // "sha256:<hex>" of corpus.jsonl; absent until a corpus is uploaded.
  std::optional<std::string> corpus_digest;
  std::size_t n_docs = 0;
  std::size_t n_gold = 0;
  std::vector<int> codebook_versions;
  std::vector<IterationSummary> iterations;

  bool operator==(const TaskRecord&) const = default;
};

// Held while an iteration job runs; at most one per task. Releases on
// destruction.
class TaskLease {
 public:
  virtual ~TaskLease() = default;
};

// Task-scoped storage. Everything written is immutable: codebooks gain new
// versions, iterations append. Errors are Error with the store codes
// (InvalidTaskId, TaskNotFound, DuplicateTask, CorpusAlreadySet, ...).
class Store {
 public:
  virtual ~Store() = default;

  // Stores codebook_v0 (its task_id must match, version must be 0).
  virtual TaskRecord create_task(const std::string& task_id, const Codebook& codebook_v0) = 0;
  virtual TaskRecord get_task(const std::string& task_id) = 0;
  virtual std::vector<std::string> list_tasks() = 0;

  // Returns the corpus digest.
  virtual std::string put_corpus(const std::string& task_id, const std::vector<Document>& docs) = 0;
  // Throws CorpusNotSet before upload.
  virtual std::vector<Document> get_corpus(const std::string& task_id) = 0;

  // The version must be latest + 1 and its parent must be stored.
  virtual void put_codebook(const Codebook& codebook) = 0;
  virtual Codebook get_codebook(const std::string& task_id, int version) = 0;
  virtual Codebook latest_codebook(const std::string& task_id) = 0;
  // All versions, ascending.
  virtual std::vector<Codebook> list_codebooks(const std::string& task_id) = 0;

  // record.iteration must equal the number of stored iterations; the
  // annotations must cover the stored corpus exactly once.
  virtual void put_iteration(const std::string& task_id, const IterationRecord& record) = 0;
  virtual IterationRecord get_iteration(const std::string& task_id, int iteration) = 0;
  virtual int iteration_count(const std::string& task_id) = 0;

  // Throws TaskBusy if another lease for the task is alive, in this process
  // or any other sharing the data directory.
  virtual std::unique_ptr<TaskLease> acquire_lease(const std::string& task_id) = 0;
};

struct FileStoreOptions {
  std::size_t write_chunk = 1 << 16;
  // Called after each chunk of a file is written, before it is published.
  // Fault-injection tests use it to stretch the write window.
  std::function<void(std::size_t written, std::size_t total)> after_chunk;
};

// Layout under root: <task>/task.json, corpus.jsonl, codebook_v{N}.json,
// iteration_{N}.json. Files are written to a dot-prefixed temporary, fsynced
// and then published with link(2), which fails instead of overwriting, so a
// reader never sees a partial file and history cannot be replaced. Leftover
// temporaries from a crash are ignored and removed on the next write.
class FileStore final : public Store {
 public:
  explicit FileStore(std::filesystem::path root, FileStoreOptions options = {});

  TaskRecord create_task(const std::string& task_id, const Codebook& codebook_v0) override;
  TaskRecord get_task(const std::string& task_id) override;
  std::vector<std::string> list_tasks() override;
  std::string put_corpus(const std::string& task_id, const std::vector<Document>& docs) override;
  std::vector<Document> get_corpus(const std::string& task_id) override;
  void put_codebook(const Codebook& codebook) override;
  Codebook get_codebook(const std::string& task_id, int version) override;
  Codebook latest_codebook(const std::string& task_id) override;
  std::vector<Codebook> list_codebooks(const std::string& task_id) override;
  void put_iteration(const std::string& task_id, const IterationRecord& record) override;
  IterationRecord get_iteration(const std::string& task_id, int iteration) override;
  int iteration_count(const std::string& task_id) override;
  std::unique_ptr<TaskLease> acquire_lease(const std::string& task_id) override;

  [[nodiscard]] const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path task_dir(const std::string& task_id) const;
  std::filesystem::path existing_task_dir(const std::string& task_id) const;
  void publish(const std::filesystem::path& dir, const std::string& name,
               const std::string& content);

  std::filesystem::path root_;
  FileStoreOptions options_;
};

// Reads CODETECT_DATA_DIR, defaulting to "./data".
[[nodiscard]] std::filesystem::path data_dir_from_env();

}  // namespace edgebook::store
