#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "edgebook/pipeline/pipeline.hpp"

namespace edgebook::api {

enum class JobState { kQueued, kRunning, kDone, kFailed };

[[nodiscard]] std::string job_state_name(JobState state);

// done => iteration set; failed => error set.
struct JobStatus {
  std::string job_id;
  std::string task_id;
  JobState state = JobState::kQueued;
  std::optional<int> iteration;
  std::optional<std::string> error;
  std::optional<std::string> error_code;
  double progress = 0.0;
  std::string stage;

  bool operator==(const JobStatus&) const = default;
};

// Background iteration jobs, at most one queued or running per task. Job
// state lives in memory only; the results themselves are in the store.
class JobManager {
 public:
  // Returns the iteration number the job produced.
  using Work = std::function<int(const pipeline::Progress&)>;

  explicit JobManager(int workers);
  // Lets queued and running jobs finish.
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  // Claims the task's slot (TaskBusy if taken), runs `prepare` on the
  // calling thread and queues `work`. If prepare throws, the slot is freed,
  // no job is recorded and the exception propagates.
  JobStatus submit(const std::string& task_id, const std::function<void()>& prepare, Work work);

  [[nodiscard]] std::optional<JobStatus> get(const std::string& job_id) const;
  // Jobs of one task, oldest first.
  [[nodiscard]] std::vector<JobStatus> list(const std::string& task_id) const;
  [[nodiscard]] std::optional<std::string> active_job(const std::string& task_id) const;

 private:
  void worker_loop();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::map<std::string, JobStatus> jobs_;
  std::map<std::string, Work> pending_work_;
  std::map<std::string, std::string> active_;  // task_id -> job_id
  std::deque<std::string> queue_;
  std::size_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::jthread> workers_;
};

}  // namespace edgebook::api
