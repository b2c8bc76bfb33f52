#pragma once

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <random>
#include <string>
#include <thread>

#include "edgebook/core/errors.hpp"
#include "edgebook/store/store.hpp"

namespace edgebook::testing {

inline Codebook crash_codebook(const std::string& task_id) {
  Codebook cb;
  cb.task_id = task_id;
  cb.task_description = "crash test";
  cb.labels = {{0, "a", "first"}, {1, "b", "second"}};
  return cb;
}

inline std::vector<Document> crash_corpus(int n) {
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    docs.push_back({"d" + std::to_string(i), "document number " + std::to_string(i), i % 2});
  }
  return docs;
}

// A valid record large enough that writing it takes many chunks.
inline IterationRecord crash_record(const std::string& task_id, const std::vector<Document>& docs) {
  IterationRecord r;
  r.task_id = task_id;
  r.iteration = 0;
  r.codebook_version = 0;
  r.edge_threshold = 0.8;
  for (const auto& d : docs) {
    r.annotations.push_back({d.doc_id, 1, 0.9, std::string(400, 'r'), std::nullopt, 0});
    r.projection.push_back({d.doc_id, 0.5, -0.5, 0.1, 1});
  }
  r.created_at = "2024-01-01T00:00:00Z";
  r.provider_fingerprint = "crash";
  return r;
}

struct CrashTrial {
  bool killed_mid_write = false;  // a temporary file was left behind
  bool iteration_present = false;
  bool valid = false;  // the store reopened cleanly and the record, if any, is intact
  std::string error;
};

// Forks a child that writes iteration 0 with a deliberately slow write loop
// and SIGKILLs it after a random delay. The parent then reopens the store as
// a restarted process would.
inline CrashTrial run_crash_trial(const std::filesystem::path& root, std::uint64_t seed) {
  const std::string task = "crash";
  const auto docs = crash_corpus(200);
  const auto record = crash_record(task, docs);
  {
    store::FileStore s(root);
    s.create_task(task, crash_codebook(task));
    s.put_corpus(task, docs);
  }

  constexpr std::size_t kChunk = 2048;
  constexpr auto kPerChunk = std::chrono::microseconds(150);
  std::mt19937_64 rng(seed);
  // The write takes about 45 chunks * 150us. Delays run a bit past that so
  // some trials finish before the kill.
  std::uniform_int_distribution<int> delay_us(0, 12000);

  const pid_t child = ::fork();
  if (child == 0) {
    store::FileStoreOptions options;
    options.write_chunk = kChunk;
    options.after_chunk = [&](std::size_t, std::size_t) { std::this_thread::sleep_for(kPerChunk); };
    try {
      store::FileStore s(root, options);
      s.put_iteration(task, record);
    } catch (...) {
      ::_exit(2);
    }
    ::_exit(0);
  }
  std::this_thread::sleep_for(std::chrono::microseconds(delay_us(rng)));
  ::kill(child, SIGKILL);
  int status = 0;
  ::waitpid(child, &status, 0);

  CrashTrial out;
  for (const auto& e : std::filesystem::directory_iterator(root / task)) {
    if (e.path().filename().string().rfind(".tmp-", 0) == 0) out.killed_mid_write = true;
  }
  try {
    store::FileStore s(root);
    const auto rec = s.get_task(task);
    out.iteration_present = !rec.iterations.empty();
    if (out.iteration_present) {
      out.valid = s.get_iteration(task, 0) == record;
      if (!out.valid) out.error = "stored record differs from the one written";
    } else {
      // A restarted writer must be able to complete the interrupted write.
      s.put_iteration(task, record);
      out.valid = s.get_iteration(task, 0) == record;
    }
  } catch (const std::exception& e) {
    out.valid = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace edgebook::testing
