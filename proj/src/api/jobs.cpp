#include "edgebook/api/jobs.hpp"

#include <algorithm>

#include "edgebook/core/errors.hpp"

namespace edgebook::api {

std::string job_state_name(JobState state) {
  switch (state) {
    case JobState::kQueued:
      return "queued";
    case JobState::kRunning:
      return "running";
    case JobState::kDone:
      return "done";
    case JobState::kFailed:
      return "failed";
  }
  return "failed";
}

JobManager::JobManager(int workers) {
  if (workers < 1) fail(ErrorCode::kInvalidArgument, "job workers must be >= 1");
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

JobManager::~JobManager() {
  {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && active_.empty(); });
    stopping_ = true;
  }
  cv_.notify_all();
  workers_.clear();
}

JobStatus JobManager::submit(const std::string& task_id, const std::function<void()>& prepare,
                             Work work) {
  std::string job_id;
  {
    std::lock_guard lock(mu_);
    if (stopping_) fail(ErrorCode::kTaskBusy, "the server is shutting down");
    if (const auto it = active_.find(task_id); it != active_.end()) {
      fail(ErrorCode::kTaskBusy, "task " + task_id + " already has job " + it->second);
    }
    job_id = "job-" + std::to_string(next_id_++);
    active_[task_id] = job_id;
  }
  try {
    if (prepare) prepare();
  } catch (...) {
    std::lock_guard lock(mu_);
    active_.erase(task_id);
    idle_cv_.notify_all();
    throw;
  }
  JobStatus status;
  status.job_id = job_id;
  status.task_id = task_id;
  status.stage = "queued";
  {
    std::lock_guard lock(mu_);
    jobs_[job_id] = status;
    pending_work_[job_id] = std::move(work);
    queue_.push_back(job_id);
  }
  cv_.notify_one();
  return status;
}

std::optional<JobStatus> JobManager::get(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::vector<JobStatus> JobManager::list(const std::string& task_id) const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<std::size_t, JobStatus>> found;
  for (const auto& [id, s] : jobs_) {
    if (s.task_id == task_id) found.emplace_back(std::stoul(id.substr(4)), s);
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<JobStatus> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

std::optional<std::string> JobManager::active_job(const std::string& task_id) const {
  std::lock_guard lock(mu_);
  const auto it = active_.find(task_id);
  if (it == active_.end()) return std::nullopt;
  return it->second;
}

void JobManager::worker_loop() {
  while (true) {
    std::string job_id;
    Work work;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job_id = queue_.front();
      queue_.pop_front();
      work = std::move(pending_work_.at(job_id));
      pending_work_.erase(job_id);
      jobs_[job_id].state = JobState::kRunning;
      jobs_[job_id].stage = "starting";
    }

    const auto progress = [&](double fraction, const std::string& stage) {
      std::lock_guard lock(mu_);
      auto& s = jobs_[job_id];
      s.progress = std::max(s.progress, fraction);
      s.stage = stage;
    };

    std::optional<int> iteration;
    std::string error, code;
    try {
      iteration = work(progress);
    } catch (const Error& e) {
      error = e.what();
      code = std::string(error_code_name(e.code()));
    } catch (const std::exception& e) {
      error = e.what();
      code = "Internal";
    }

    {
      std::lock_guard lock(mu_);
      auto& s = jobs_[job_id];
      if (iteration) {
        s.state = JobState::kDone;
        s.iteration = iteration;
        s.progress = 1.0;
        s.stage = "done";
      } else {
        s.state = JobState::kFailed;
        s.error = error;
        s.error_code = code;
        s.stage = "failed";
      }
      active_.erase(s.task_id);
    }
    idle_cv_.notify_all();
  }
}

}  // namespace edgebook::api
