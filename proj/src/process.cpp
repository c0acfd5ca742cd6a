#include <pthread.h>

#include <algorithm>
#include <chrono>

#include "edbc/runtime.hpp"

namespace edbc {

namespace {

// Deeply recursive user programs run on the process thread's native stack.
constexpr std::size_t kStackBytes = std::size_t{256} << 20;

struct ThreadStart {
  std::function<void()> body;
};

void* thread_main(void* arg) {
  std::unique_ptr<ThreadStart> start(static_cast<ThreadStart*>(arg));
  start->body();
  return nullptr;
}

pthread_t start_thread(std::function<void()> body) {
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStackBytes);
  pthread_t tid;
  auto* start = new ThreadStart{std::move(body)};
  int rc = pthread_create(&tid, &attr, thread_main, start);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    delete start;
    throw std::runtime_error("cannot start process thread");
  }
  return tid;
}

}  // namespace

// ---- Process --------------------------------------------------------------

Value Process::receive() {
  return receive_match([](const Value&) { return true; });
}

Value Process::receive_match(const std::function<bool(const Value&)>& pred) {
  std::unique_lock lk(rt_.mu_);
  while (true) {
    if (killed()) throw ProcessExit();
    for (auto it = mailbox_.begin(); it != mailbox_.end(); ++it) {
      if (pred(*it)) {
        Value v = std::move(*it);
        mailbox_.erase(it);
        return v;
      }
    }
    if (!blocked_) {
      blocked_ = true;
      --rt_.active_;
      rt_.state_cv_.notify_all();
    }
    cv_.wait(lk);
    if (blocked_) {
      // Woken by kill or by a message that did not match.
      blocked_ = false;
      ++rt_.active_;
    }
  }
}

void Process::wait_external_arrival(std::uint64_t seen) {
  std::unique_lock lk(rt_.mu_);
  while (external_ == seen) {
    if (killed()) throw ProcessExit();
    if (!blocked_) {
      blocked_ = true;
      --rt_.active_;
      rt_.state_cv_.notify_all();
    }
    cv_.wait(lk);
    if (blocked_) {
      blocked_ = false;
      ++rt_.active_;
    }
  }
}

std::uint64_t Process::external_arrivals() const {
  std::lock_guard lk(rt_.mu_);
  return external_;
}

void Process::requeue(Value msg) {
  std::lock_guard lk(rt_.mu_);
  mailbox_.push_back(std::move(msg));
}

std::size_t Process::mailbox_size() const {
  std::lock_guard lk(rt_.mu_);
  return mailbox_.size();
}

void Process::sleep_ms(std::int64_t ms) {
  auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
  std::unique_lock lk(rt_.mu_);
  while (!killed()) {
    if (cv_.wait_until(lk, until) == std::cv_status::timeout) break;
  }
  if (killed()) throw ProcessExit();
}

// ---- Runtime: processes ---------------------------------------------------

std::shared_ptr<Process> Runtime::get(Pid pid) const {
  std::lock_guard lk(mu_);
  auto it = procs_.find(pid.id);
  return it == procs_.end() ? nullptr : it->second;
}

Pid Runtime::spawn(std::function<Value(Process&)> body) {
  std::shared_ptr<Process> p;
  {
    std::lock_guard lk(mu_);
    if (shutting_down_) throw ProcessExit();
    Pid pid{next_pid_++};
    p = std::make_shared<Process>(*this, pid);
    procs_[pid.id] = p;
    ++active_;
  }
  pthread_t tid = start_thread([this, p, body = std::move(body)] {
    try {
      p->result_ = body(*p);
    } catch (...) {
      p->error_ = std::current_exception();
    }
    finish(*p);
  });
  std::lock_guard lk(mu_);
  threads_.push_back(tid);
  return p->pid();
}

void Runtime::finish(Process& p) {
  std::lock_guard lk(mu_);
  p.finished_ = true;
  if (!p.blocked_) --active_;
  p.blocked_ = false;
  for (Pid w : p.watchers_) {
    auto it = procs_.find(w.id);
    if (it == procs_.end() || it->second->finished_) continue;
    Process& target = *it->second;
    target.mailbox_.push_back(Value::tuple({Value::atom("$edbc_down"), Value::pid(p.pid())}));
    ++target.external_;
    if (target.blocked_) {
      target.blocked_ = false;
      ++active_;
    }
    target.cv_.notify_all();
  }
  p.watchers_.clear();
  state_cv_.notify_all();
}

Value Runtime::join(Pid pid) {
  auto p = get(pid);
  if (!p) throw RuntimeError("noproc", "no such process");
  std::unique_lock lk(mu_);
  state_cv_.wait(lk, [&] { return p->finished_; });
  if (p->error_) std::rethrow_exception(p->error_);
  return *p->result_;
}

std::optional<Value> Runtime::join_for(Pid pid, const Process& waiter, double ms) {
  auto p = get(pid);
  if (!p) throw RuntimeError("noproc", "no such process");
  auto until = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double, std::milli>(ms));
  std::unique_lock lk(mu_);
  if (!state_cv_.wait_until(lk, until, [&] { return p->finished_ || waiter.killed(); })) {
    return std::nullopt;
  }
  if (!p->finished_) throw ProcessExit();
  if (p->error_) std::rethrow_exception(p->error_);
  return *p->result_;
}

void Runtime::send(Pid to, Value msg) {
  std::lock_guard lk(mu_);
  auto it = procs_.find(to.id);
  if (it == procs_.end() || it->second->finished_) return;  // like Erlang: sends never fail
  Process& target = *it->second;
  target.mailbox_.push_back(std::move(msg));
  ++target.external_;
  if (target.blocked_) {
    target.blocked_ = false;
    ++active_;
  }
  target.cv_.notify_all();
}

bool Runtime::alive(Pid pid) const {
  std::lock_guard lk(mu_);
  auto it = procs_.find(pid.id);
  return it != procs_.end() && !it->second->finished_;
}

bool Runtime::watch(Pid target, Pid watcher) {
  std::lock_guard lk(mu_);
  auto it = procs_.find(target.id);
  if (it == procs_.end() || it->second->finished_) return false;
  auto& ws = it->second->watchers_;
  if (std::find(ws.begin(), ws.end(), watcher) == ws.end()) ws.push_back(watcher);
  return true;
}

std::exception_ptr Runtime::exit_reason(Pid pid) const {
  std::lock_guard lk(mu_);
  auto it = procs_.find(pid.id);
  if (it == procs_.end() || !it->second->finished_) return nullptr;
  return it->second->error_;
}

void Runtime::kill(Pid pid) {
  std::lock_guard lk(mu_);
  auto it = procs_.find(pid.id);
  if (it == procs_.end()) return;
  it->second->killed_ = true;
  it->second->cv_.notify_all();
  state_cv_.notify_all();
}

void Runtime::quiesce() {
  std::unique_lock lk(mu_);
  state_cv_.wait(lk, [&] { return active_ == 0; });
}

void Runtime::shutdown() {
  while (true) {
    std::vector<unsigned long> threads;
    {
      std::lock_guard lk(mu_);
      shutting_down_ = true;
      for (auto& [id, p] : procs_) {
        p->killed_ = true;
        p->cv_.notify_all();
      }
      state_cv_.notify_all();
      threads.swap(threads_);
    }
    if (threads.empty()) return;
    for (auto t : threads) pthread_join(t, nullptr);
  }
}

}  // namespace edbc
