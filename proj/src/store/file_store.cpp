#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <unordered_set>

#include "edgebook/core/errors.hpp"
#include "edgebook/core/json_io.hpp"
#include "edgebook/core/text.hpp"
#include "edgebook/store/store.hpp"

namespace fs = std::filesystem;

namespace edgebook::store {
namespace {

constexpr const char* kTaskFile = "task.json";
constexpr const char* kCorpusFile = "corpus.jsonl";
constexpr const char* kWriteLock = ".write.lock";
constexpr const char* kJobLock = ".job.lock";
constexpr std::string_view kTempPrefix = ".tmp-";

[[noreturn]] void io_fail(const std::string& what) {
  fail(ErrorCode::kIo, what + ": " + std::strerror(errno));
}

std::string temp_name(std::string_view base) {
  static std::atomic<unsigned> counter{0};
  return std::string(kTempPrefix) + std::string(base) + "-" + std::to_string(::getpid()) + "-" +
         std::to_string(counter++);
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) io_fail("open " + dir.string());
  const int rc = ::fsync(fd);
  ::close(fd);
  if (rc != 0) io_fail("fsync " + dir.string());
}

class FdLock {
 public:
  // Blocking unless `try_only`; returns an unlocked object if try_only and
  // the lock is held elsewhere.
  FdLock(const fs::path& path, bool try_only) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) io_fail("open " + path.string());
    int rc;
    do {
      rc = ::flock(fd_, LOCK_EX | (try_only ? LOCK_NB : 0));
    } while (rc != 0 && errno == EINTR);
    if (rc != 0) {
      const bool busy = errno == EWOULDBLOCK;
      ::close(fd_);
      fd_ = -1;
      if (!busy) io_fail("flock " + path.string());
    }
  }
  ~FdLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  FdLock(const FdLock&) = delete;
  FdLock& operator=(const FdLock&) = delete;

  [[nodiscard]] bool held() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

class FileLease final : public TaskLease {
 public:
  explicit FileLease(std::unique_ptr<FdLock> lock) : lock_(std::move(lock)) {}

 private:
  std::unique_ptr<FdLock> lock_;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_fail("read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_stored(const fs::path& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kStoreCorrupted, path.string() + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T decode_stored(const fs::path& path) {
  const Json j = parse_stored(path);
  try {
    return j.get<T>();
  } catch (const Error& e) {
    throw Error(ErrorCode::kStoreCorrupted, path.string() + ": " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kStoreCorrupted, path.string() + ": " + e.what());
  }
}

// Sorted numbers N of files named <prefix>N.json.
std::vector<int> scan_numbered(const fs::path& dir, const std::string& prefix) {
  const std::regex pattern(prefix + "([0-9]{1,9})\\.json");
  std::vector<int> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (std::regex_match(name, m, pattern)) out.push_back(std::stoi(m[1].str()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string codebook_file(int v) { return "codebook_v" + std::to_string(v) + ".json"; }
std::string iteration_file(int n) { return "iteration_" + std::to_string(n) + ".json"; }

void remove_stale_temps(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().filename().string().rfind(kTempPrefix, 0) == 0) {
      std::error_code ec;
      fs::remove_all(entry.path(), ec);
    }
  }
}

std::vector<Document> parse_corpus(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<Document> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      docs.push_back(Json::parse(line).get<Document>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kStoreCorrupted, path.string() + ": " + e.what());
    }
  }
  return docs;
}

}  // namespace

FileStore::FileStore(fs::path root, FileStoreOptions options)
    : root_(std::move(root)), options_(std::move(options)) {
  if (options_.write_chunk == 0) fail(ErrorCode::kInvalidArgument, "write_chunk must be > 0");
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create data directory " + root_.string() + ": " + ec.message());
}

fs::path FileStore::task_dir(const std::string& task_id) const {
  if (!is_valid_task_id(task_id)) {
    fail(ErrorCode::kInvalidTaskId, "task id must match [A-Za-z0-9_-]{1,64}: '" + task_id + "'");
  }
  return root_ / task_id;
}

fs::path FileStore::existing_task_dir(const std::string& task_id) const {
  fs::path dir = task_dir(task_id);
  if (!fs::exists(dir / kTaskFile)) {
    fail(ErrorCode::kTaskNotFound, "no task '" + task_id + "'");
  }
  return dir;
}

void FileStore::publish(const fs::path& dir, const std::string& name, const std::string& content) {
  const fs::path tmp = dir / temp_name(name);
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("create " + tmp.string());
  std::size_t written = 0;
  while (written < content.size()) {
    const std::size_t chunk = std::min(options_.write_chunk, content.size() - written);
    const ssize_t n = ::write(fd, content.data() + written, chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      ::unlink(tmp.c_str());
      io_fail("write " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
    if (options_.after_chunk) options_.after_chunk(written, content.size());
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    ::unlink(tmp.c_str());
    io_fail("fsync " + tmp.string());
  }
  ::close(fd);

  const fs::path target = dir / name;
  if (::link(tmp.c_str(), target.c_str()) != 0) {
    const int err = errno;
    ::unlink(tmp.c_str());
    if (err == EEXIST) {
      fail(ErrorCode::kVersionExists, target.filename().string() + " already exists");
    }
    errno = err;
    io_fail("link " + target.string());
  }
  ::unlink(tmp.c_str());
  fsync_dir(dir);
}

TaskRecord FileStore::create_task(const std::string& task_id, const Codebook& codebook_v0) {
  const fs::path dir = task_dir(task_id);
  validate(codebook_v0);
  if (codebook_v0.task_id != task_id) {
    fail(ErrorCode::kInvalidArgument, "codebook task_id does not match the task");
  }
  if (codebook_v0.version != 0 || codebook_v0.parent_version) {
    fail(ErrorCode::kInvalidArgument, "the first codebook must be version 0 without a parent");
  }
  if (fs::exists(dir)) fail(ErrorCode::kDuplicateTask, "task '" + task_id + "' already exists");

  // Build the whole task directory under a temporary name, then rename it
  // into place: either the task exists with its first codebook or not at all.
  const fs::path staging = root_ / temp_name("task-" + task_id);
  fs::create_directory(staging);
  try {
    Json task = {{"schema_version", kSchemaVersion},
                 {"task_id", task_id},
                 {"created_at", utc_timestamp_now()}};
    publish(staging, kTaskFile, task.dump(2) + "\n");
    publish(staging, codebook_file(0), Json(codebook_v0).dump(2) + "\n");
    if (::rename(staging.c_str(), dir.c_str()) != 0) {
      const int err = errno;
      if (err == EEXIST || err == ENOTEMPTY) {
        fail(ErrorCode::kDuplicateTask, "task '" + task_id + "' already exists");
      }
      errno = err;
      io_fail("rename " + staging.string());
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  fsync_dir(root_);
  return get_task(task_id);
}

TaskRecord FileStore::get_task(const std::string& task_id) {
  const fs::path dir = existing_task_dir(task_id);
  const Json task = parse_stored(dir / kTaskFile);
  TaskRecord rec;
  try {
    rec.task_id = task.at("task_id").get<std::string>();
    rec.created_at = task.at("created_at").get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kStoreCorrupted, "task.json: " + std::string(e.what()));
  }
  if (fs::exists(dir / kCorpusFile)) {
    rec.corpus_digest = "sha256:" + sha256_hex(read_file(dir / kCorpusFile));
    const auto docs = parse_corpus(dir / kCorpusFile);
    rec.n_docs = docs.size();
    rec.n_gold = static_cast<std::size_t>(
        std::count_if(docs.begin(), docs.end(), [](const Document& d) { return d.gold_label; }));
  }
  rec.codebook_versions = scan_numbered(dir, "codebook_v");
  for (int n : scan_numbered(dir, "iteration_")) {
    const auto it = decode_stored<IterationRecord>(dir / iteration_file(n));
    IterationSummary s;
    s.iteration = it.iteration;
    s.codebook_version = it.codebook_version;
    s.created_at = it.created_at;
    for (const auto& c : it.clusters) s.n_edge_items += c.member_doc_ids.size();
    s.n_merged = it.merged.size();
    if (it.metrics) s.positive_f1 = it.metrics->positive_f1;
    rec.iterations.push_back(std::move(s));
  }
  return rec;
}

std::vector<std::string> FileStore::list_tasks() {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_directory() && is_valid_task_id(name) && fs::exists(entry.path() / kTaskFile)) {
      out.push_back(name);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string FileStore::put_corpus(const std::string& task_id, const std::vector<Document>& docs) {
  const fs::path dir = existing_task_dir(task_id);
  validate_corpus(docs);
  std::string content;
  for (const auto& d : docs) content += Json(d).dump() + "\n";

  FdLock lock(dir / kWriteLock, false);
  remove_stale_temps(dir);
  if (fs::exists(dir / kCorpusFile)) {
    fail(ErrorCode::kCorpusAlreadySet, "task '" + task_id + "' already has a corpus");
  }
  try {
    publish(dir, kCorpusFile, content);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kVersionExists) {
      fail(ErrorCode::kCorpusAlreadySet, "task '" + task_id + "' already has a corpus");
    }
    throw;
  }
  return "sha256:" + sha256_hex(content);
}

std::vector<Document> FileStore::get_corpus(const std::string& task_id) {
  const fs::path dir = existing_task_dir(task_id);
  if (!fs::exists(dir / kCorpusFile)) {
    fail(ErrorCode::kCorpusNotSet, "task '" + task_id + "' has no corpus yet");
  }
  return parse_corpus(dir / kCorpusFile);
}

void FileStore::put_codebook(const Codebook& codebook) {
  const fs::path dir = existing_task_dir(codebook.task_id);
  validate(codebook);

  FdLock lock(dir / kWriteLock, false);
  remove_stale_temps(dir);
  const auto versions = scan_numbered(dir, "codebook_v");
  const int latest = versions.empty() ? -1 : versions.back();
  if (codebook.version <= latest) {
    fail(ErrorCode::kVersionExists,
         "codebook version " + std::to_string(codebook.version) + " already exists");
  }
  if (codebook.version != latest + 1) {
    fail(ErrorCode::kInvalidArgument, "next codebook version must be " + std::to_string(latest + 1));
  }
  if (!codebook.parent_version ||
      !std::binary_search(versions.begin(), versions.end(), *codebook.parent_version)) {
    fail(ErrorCode::kVersionNotFound, "codebook parent version is not stored");
  }
  publish(dir, codebook_file(codebook.version), Json(codebook).dump(2) + "\n");
}

Codebook FileStore::get_codebook(const std::string& task_id, int version) {
  const fs::path dir = existing_task_dir(task_id);
  const fs::path path = dir / codebook_file(version);
  if (version < 0 || !fs::exists(path)) {
    fail(ErrorCode::kVersionNotFound, "task '" + task_id + "' has no codebook version " +
                                          std::to_string(version));
  }
  auto cb = decode_stored<Codebook>(path);
  if (cb.task_id != task_id || cb.version != version) {
    fail(ErrorCode::kStoreCorrupted, path.string() + " does not match its file name");
  }
  return cb;
}

Codebook FileStore::latest_codebook(const std::string& task_id) {
  const fs::path dir = existing_task_dir(task_id);
  const auto versions = scan_numbered(dir, "codebook_v");
  if (versions.empty()) fail(ErrorCode::kStoreCorrupted, "task '" + task_id + "' has no codebook");
  return get_codebook(task_id, versions.back());
}

std::vector<Codebook> FileStore::list_codebooks(const std::string& task_id) {
  const fs::path dir = existing_task_dir(task_id);
  std::vector<Codebook> out;
  for (int v : scan_numbered(dir, "codebook_v")) out.push_back(get_codebook(task_id, v));
  return out;
}

void FileStore::put_iteration(const std::string& task_id, const IterationRecord& record) {
  const fs::path dir = existing_task_dir(task_id);
  if (record.task_id != task_id) {
    fail(ErrorCode::kInvalidArgument, "iteration record belongs to another task");
  }
  validate(record);

  FdLock lock(dir / kWriteLock, false);
  remove_stale_temps(dir);
  const int count = static_cast<int>(scan_numbered(dir, "iteration_").size());
  if (record.iteration < count) {
    fail(ErrorCode::kVersionExists,
         "iteration " + std::to_string(record.iteration) + " already exists");
  }
  if (record.iteration != count) {
    fail(ErrorCode::kNonContiguousIteration,
         "next iteration must be " + std::to_string(count) + ", got " +
             std::to_string(record.iteration));
  }
  const Codebook cb = get_codebook(task_id, record.codebook_version);
  const auto corpus = get_corpus(task_id);
  if (record.annotations.size() != corpus.size()) {
    fail(ErrorCode::kInvalidArgument, "annotations must cover the corpus exactly once");
  }
  std::unordered_set<std::string> ids;
  for (const auto& d : corpus) ids.insert(d.doc_id);
  for (const auto& a : record.annotations) {
    if (!ids.count(a.doc_id)) {
      fail(ErrorCode::kInvalidArgument, "annotation for unknown document " + a.doc_id);
    }
    validate_against(a, cb);
  }
  publish(dir, iteration_file(record.iteration), Json(record).dump(2) + "\n");
}

IterationRecord FileStore::get_iteration(const std::string& task_id, int iteration) {
  const fs::path dir = existing_task_dir(task_id);
  const fs::path path = dir / iteration_file(iteration);
  if (iteration < 0 || !fs::exists(path)) {
    fail(ErrorCode::kIterationNotFound,
         "task '" + task_id + "' has no iteration " + std::to_string(iteration));
  }
  return decode_stored<IterationRecord>(path);
}

int FileStore::iteration_count(const std::string& task_id) {
  return static_cast<int>(scan_numbered(existing_task_dir(task_id), "iteration_").size());
}

std::unique_ptr<TaskLease> FileStore::acquire_lease(const std::string& task_id) {
  const fs::path dir = existing_task_dir(task_id);
  auto lock = std::make_unique<FdLock>(dir / kJobLock, true);
  if (!lock->held()) fail(ErrorCode::kTaskBusy, "task '" + task_id + "' already has a running job");
  return std::make_unique<FileLease>(std::move(lock));
}

fs::path data_dir_from_env() {
  const char* v = std::getenv("CODETECT_DATA_DIR");
  return (v != nullptr && *v != '\0') ? fs::path(v) : fs::path("data");
}

}  // namespace edgebook::store
