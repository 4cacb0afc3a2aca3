#include "dms/community.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <tuple>

#include "dms/catalog.hpp"
#include "dms/error.hpp"
#include "dms/identity.hpp"

namespace dms::community {

namespace {

std::string make_id(const char* prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%08llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

void bump(std::uint64_t& counter, std::string_view id, std::string_view prefix) {
  if (!id.starts_with(prefix)) return;
  const auto n = std::strtoull(std::string(id.substr(prefix.size())).c_str(), nullptr, 10);
  if (n >= counter) counter = n + 1;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

}  // namespace

Community::Community(const catalog::Catalog& catalog, const identity::Identity& identity)
    : catalog_(catalog), identity_(identity) {}

Thread Community::create_thread(std::string_view token, std::string_view destination_id,
                                std::string_view title, Timestamp now) {
  const auto author = identity_.authenticate(token, now);
  if (blank(title)) fail(ErrorCode::Validation, "thread title must not be empty");
  if (!catalog_.contains(destination_id)) {
    fail(ErrorCode::NotFound, "no destination with id " + std::string(destination_id));
  }
  std::unique_lock lock(mu_);
  Thread t{make_id("th", next_thread_++), std::string(destination_id), std::string(title),
           author.id, now};
  threads_.emplace(t.id, t);
  return t;
}

Post Community::post_reply(std::string_view token, std::string_view thread_id,
                           std::string_view body, Timestamp now) {
  const auto author = identity_.authenticate(token, now);
  if (blank(body)) fail(ErrorCode::Validation, "post body must not be empty");
  std::unique_lock lock(mu_);
  if (!threads_.contains(thread_id)) {
    fail(ErrorCode::NotFound, "no thread with id " + std::string(thread_id));
  }
  Post p{make_id("p", next_post_++), std::string(thread_id), author.id, std::string(body), now};
  posts_.emplace(p.id, p);
  return p;
}

std::vector<ThreadWithPosts> Community::list_threads(std::string_view destination_id) const {
  if (!catalog_.contains(destination_id)) {
    fail(ErrorCode::NotFound, "no destination with id " + std::string(destination_id));
  }
  std::shared_lock lock(mu_);
  std::vector<ThreadWithPosts> out;
  for (const auto& [id, t] : threads_) {
    if (t.destination_id == destination_id) out.push_back({t, {}});
  }
  auto by_time = [](const auto& a, const auto& b) {
    return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
  };
  std::sort(out.begin(), out.end(),
            [&](const ThreadWithPosts& a, const ThreadWithPosts& b) { return by_time(a.thread, b.thread); });
  for (auto& view : out) {
    for (const auto& [id, p] : posts_) {
      if (p.thread_id == view.thread.id) view.posts.push_back(p);
    }
    std::sort(view.posts.begin(), view.posts.end(), by_time);
  }
  return out;
}

Post Community::delete_post(std::string_view token, std::string_view post_id, Timestamp now) {
  const auto actor = identity_.authenticate(token, now);
  std::unique_lock lock(mu_);
  auto it = posts_.find(post_id);
  if (it == posts_.end()) fail(ErrorCode::NotFound, "no post with id " + std::string(post_id));
  const auto& thread = threads_.at(it->second.thread_id);

  bool allowed = actor.role == identity::Role::Admin;
  if (!allowed && actor.role == identity::Role::SiteManager) {
    const auto dest = catalog_.get_destination(thread.destination_id);
    allowed = dest.manager_id == actor.id;
  }
  if (!allowed) fail(ErrorCode::Forbidden, "not permitted to moderate this thread");
  Post removed = it->second;
  posts_.erase(it);
  return removed;
}

Thread Community::get_thread(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = threads_.find(id);
  if (it == threads_.end()) fail(ErrorCode::NotFound, "no thread with id " + std::string(id));
  return it->second;
}

Post Community::get_post(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = posts_.find(id);
  if (it == posts_.end()) fail(ErrorCode::NotFound, "no post with id " + std::string(id));
  return it->second;
}

void Community::insert_thread(Thread thread) {
  if (!catalog_.contains(thread.destination_id)) {
    fail(ErrorCode::NotFound, "thread for unknown destination " + thread.destination_id);
  }
  std::unique_lock lock(mu_);
  bump(next_thread_, thread.id, "th-");
  std::string id = thread.id;
  if (!threads_.emplace(std::move(id), std::move(thread)).second) {
    fail(ErrorCode::DuplicateId, "thread already present");
  }
}

void Community::insert_post(Post post) {
  std::unique_lock lock(mu_);
  if (!threads_.contains(post.thread_id)) fail(ErrorCode::NotFound, "post for unknown thread");
  bump(next_post_, post.id, "p-");
  std::string id = post.id;
  if (!posts_.emplace(std::move(id), std::move(post)).second) {
    fail(ErrorCode::DuplicateId, "post already present");
  }
}

void Community::remove_post(std::string_view post_id) {
  std::unique_lock lock(mu_);
  auto it = posts_.find(post_id);
  if (it == posts_.end()) fail(ErrorCode::NotFound, "no post with id " + std::string(post_id));
  posts_.erase(it);
}

Community::State Community::export_state() const {
  std::shared_lock lock(mu_);
  State s;
  for (const auto& [id, t] : threads_) s.threads.push_back(t);
  for (const auto& [id, p] : posts_) s.posts.push_back(p);
  s.next_thread = next_thread_;
  s.next_post = next_post_;
  return s;
}

void Community::import_state(State state) {
  {
    std::unique_lock lock(mu_);
    threads_.clear();
    posts_.clear();
    next_thread_ = 1;
    next_post_ = 1;
  }
  try {
    for (auto& t : state.threads) insert_thread(std::move(t));
    for (auto& p : state.posts) insert_post(std::move(p));
  } catch (const Error& e) {
    fail(ErrorCode::CorruptSnapshot, e.what());
  }
  std::unique_lock lock(mu_);
  next_thread_ = std::max(next_thread_, state.next_thread);
  next_post_ = std::max(next_post_, state.next_post);
}

void Community::check_invariants() const {
  std::shared_lock lock(mu_);
  for (const auto& [id, t] : threads_) {
    if (!catalog_.contains(t.destination_id)) fail(ErrorCode::Internal, "orphan thread " + id);
  }
  for (const auto& [id, p] : posts_) {
    if (!threads_.contains(p.thread_id)) fail(ErrorCode::Internal, "orphan post " + id);
  }
}

}  // namespace dms::community
