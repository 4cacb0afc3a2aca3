#pragma once

#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dms/time.hpp"

namespace dms::catalog {
class Catalog;
}
namespace dms::identity {
class Identity;
struct UserAccount;
}

namespace dms::community {

struct Thread {
  std::string id;
  std::string destination_id;
  std::string title;
  std::string author_id;
  Timestamp created_at;

  friend bool operator==(const Thread&, const Thread&) = default;
};

struct Post {
  std::string id;
  std::string thread_id;
  std::string author_id;
  std::string body;
  Timestamp created_at;

  friend bool operator==(const Post&, const Post&) = default;
};

struct ThreadWithPosts {
  Thread thread;
  std::vector<Post> posts;  // by (created_at, id)

  friend bool operator==(const ThreadWithPosts&, const ThreadWithPosts&) = default;
};

/// Destination-anchored discussion threads between tourists and locals.
///
/// Authors are identified by session token and resolved through Identity;
/// destinations are checked against the Catalog.
class Community {
 public:
  Community(const catalog::Catalog& catalog, const identity::Identity& identity);
  Community(const Community&) = delete;
  Community& operator=(const Community&) = delete;

  /// Throws Unauthorized, NotFound (destination) or Validation (empty title).
  Thread create_thread(std::string_view token, std::string_view destination_id,
                       std::string_view title, Timestamp now);

  /// Throws Unauthorized, NotFound (thread) or Validation (empty body).
  Post post_reply(std::string_view token, std::string_view thread_id, std::string_view body,
                  Timestamp now);

  /// Threads of a destination by (created_at, id). Throws NotFound.
  [[nodiscard]] std::vector<ThreadWithPosts> list_threads(std::string_view destination_id) const;

  /// Moderation: admins may delete any post; site managers only posts in
  /// threads anchored to a destination they manage. Throws Unauthorized,
  /// Forbidden or NotFound.
  Post delete_post(std::string_view token, std::string_view post_id, Timestamp now);

  [[nodiscard]] Thread get_thread(std::string_view id) const;
  [[nodiscard]] Post get_post(std::string_view id) const;

  /// Journal replay.
  void insert_thread(Thread thread);
  void insert_post(Post post);
  void remove_post(std::string_view post_id);

  struct State {
    std::vector<Thread> threads;
    std::vector<Post> posts;
    std::uint64_t next_thread = 1;
    std::uint64_t next_post = 1;
  };
  [[nodiscard]] State export_state() const;
  void import_state(State state);

  /// Throws Internal on an orphan post or a thread whose destination is gone.
  void check_invariants() const;

 private:
  const catalog::Catalog& catalog_;
  const identity::Identity& identity_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Thread, std::less<>> threads_;
  std::map<std::string, Post, std::less<>> posts_;
  std::uint64_t next_thread_ = 1;
  std::uint64_t next_post_ = 1;
};

}  // namespace dms::community
