#include <gtest/gtest.h>

#include <random>

#include "dms/catalog.hpp"
#include "dms/community.hpp"
#include "dms/identity.hpp"
#include "support.hpp"

using namespace dms;
using namespace dms::community;
using dms::testing::code_of;

namespace {

Timestamp at(int s) { return Timestamp{std::chrono::seconds{1'700'000'000 + s}}; }

struct Fixture {
  catalog::Catalog cat;
  identity::Identity ids{std::make_shared<SeededRandom>(1), {std::chrono::seconds{1'000'000}, 1}};
  Community com{cat, ids};

  std::string user(const std::string& name, identity::Role role) {
    ids.register_user(name, "password1", role);
    return ids.login(name, "password1", at(0)).token;
  }
  void destination(const std::string& id, std::optional<std::string> manager = std::nullopt) {
    cat.add_destination({id, "Site " + id, catalog::Category::Cultural, "", {9, 7}, {}, "", manager});
  }
};

}  // namespace

TEST(Threads, CreateThenList) {
  Fixture f;
  f.destination("kuta");
  const auto tok = f.user("amina", identity::Role::Tourist);
  const auto t = f.com.create_thread(tok, "kuta", "Best time to visit?", at(1));
  const auto list = f.com.list_threads("kuta");
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].thread, t);
  EXPECT_TRUE(list[0].posts.empty());
}

TEST(Threads, Errors) {
  Fixture f;
  f.destination("kuta");
  const auto tok = f.user("amina", identity::Role::Tourist);
  EXPECT_EQ(code_of([&] { f.com.create_thread("bogus", "kuta", "x", at(1)); }), ErrorCode::Unauthorized);
  EXPECT_EQ(code_of([&] { f.com.create_thread(tok, "nowhere", "x", at(1)); }), ErrorCode::NotFound);
  EXPECT_EQ(code_of([&] { f.com.create_thread(tok, "kuta", "", at(1)); }), ErrorCode::Validation);
  EXPECT_EQ(code_of([&] { f.com.post_reply(tok, "th-missing", "hello", at(1)); }), ErrorCode::NotFound);
  EXPECT_EQ(code_of([&] { (void)f.com.list_threads("nowhere"); }), ErrorCode::NotFound);
}

TEST(Posts, InterleavedOrderEqualsCreationOrder) {
  Fixture f;
  f.destination("kuta");
  const auto a = f.user("amina", identity::Role::Tourist);
  const auto b = f.user("bello", identity::Role::Local);
  const auto t = f.com.create_thread(a, "kuta", "Guides?", at(1));
  std::vector<std::string> created;
  std::mt19937_64 rng(71);
  int clock = 1;
  for (int i = 0; i < 60; ++i) {
    clock += static_cast<int>(rng() % 2);  // equal timestamps happen too
    created.push_back(f.com.post_reply(i % 3 ? a : b, t.id, "msg " + std::to_string(i), at(clock)).id);
  }
  std::vector<std::string> listed;
  for (const auto& p : f.com.list_threads("kuta")[0].posts) listed.push_back(p.id);
  EXPECT_EQ(listed, created);
}

TEST(Moderation, Roles) {
  Fixture f;
  const auto mgr = f.user("manager", identity::Role::SiteManager);
  const auto mgr_id = f.ids.find_username("manager")->id;
  f.destination("mine", mgr_id);
  f.destination("theirs");
  const auto tourist = f.user("amina", identity::Role::Tourist);
  const auto admin = f.user("root", identity::Role::Admin);
  const auto t1 = f.com.create_thread(tourist, "mine", "a", at(1));
  const auto t2 = f.com.create_thread(tourist, "theirs", "b", at(1));
  const auto p1 = f.com.post_reply(tourist, t1.id, "x", at(2));
  const auto p2 = f.com.post_reply(tourist, t2.id, "y", at(2));
  const auto p3 = f.com.post_reply(tourist, t2.id, "z", at(2));

  EXPECT_EQ(code_of([&] { f.com.delete_post(tourist, p1.id, at(3)); }), ErrorCode::Forbidden);
  EXPECT_EQ(code_of([&] { f.com.delete_post(mgr, p2.id, at(3)); }), ErrorCode::Forbidden);
  EXPECT_EQ(f.com.delete_post(mgr, p1.id, at(3)), p1);
  EXPECT_EQ(f.com.delete_post(admin, p2.id, at(3)), p2);
  EXPECT_EQ(code_of([&] { f.com.delete_post(admin, p2.id, at(3)); }), ErrorCode::NotFound);
  EXPECT_EQ(f.com.list_threads("theirs")[0].posts, (std::vector<Post>{p3}));
}

TEST(Community, RandomizedReferentialIntegrity) {
  Fixture f;
  std::mt19937_64 rng(73);
  std::vector<std::string> tokens;
  for (int i = 0; i < 5; ++i) tokens.push_back(f.user("user" + std::to_string(i), identity::Role::Local));
  tokens.push_back(f.user("admin", identity::Role::Admin));
  for (int i = 0; i < 10; ++i) f.destination("d" + std::to_string(i));
  std::vector<std::string> threads, posts;
  std::map<std::string, std::string> post_thread;
  int clock = 0;
  for (int op = 0; op < 2000; ++op) {
    ++clock;
    const auto& tok = tokens[rng() % tokens.size()];
    const auto kind = rng() % 10;
    if (kind < 2 || threads.empty()) {
      const auto dest = rng() % 12;
      if (dest >= 10) {
        EXPECT_EQ(code_of([&] { f.com.create_thread(tok, "d" + std::to_string(dest), "t", at(clock)); }),
                  ErrorCode::NotFound);
        continue;
      }
      threads.push_back(f.com.create_thread(tok, "d" + std::to_string(dest), "t", at(clock)).id);
    } else if (kind < 8) {
      const auto& th = threads[rng() % threads.size()];
      const auto p = f.com.post_reply(tok, th, "body", at(clock));
      posts.push_back(p.id);
      post_thread[p.id] = th;
    } else if (!posts.empty()) {
      const auto& p = posts[rng() % posts.size()];
      const auto c = code_of([&] { f.com.delete_post(tokens.back(), p, at(clock)); });
      EXPECT_TRUE(c == ErrorCode::Internal || c == ErrorCode::NotFound);
      if (c == ErrorCode::Internal) post_thread.erase(p);
    }
  }
  f.com.check_invariants();
  std::size_t listed = 0;
  for (int i = 0; i < 10; ++i) {
    for (const auto& tw : f.com.list_threads("d" + std::to_string(i))) {
      for (const auto& p : tw.posts) {
        EXPECT_EQ(post_thread.at(p.id), tw.thread.id);
        EXPECT_TRUE(f.ids.has_user(p.author_id));
        ++listed;
      }
    }
  }
  EXPECT_EQ(listed, post_thread.size());
}
