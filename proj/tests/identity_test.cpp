#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "dms/identity.hpp"
#include "dms/json_codec.hpp"
#include "support.hpp"

using namespace dms;
using namespace dms::identity;
using dms::testing::code_of;
using namespace std::chrono_literals;

namespace {

Timestamp at(int s) { return Timestamp{std::chrono::seconds{1'700'000'000 + s}}; }

IdentityOptions fast() { return {std::chrono::seconds{3600}, 1000}; }

bool contains_any_substring(const std::string& hay, const std::string& password, std::size_t min_len) {
  for (std::size_t len = min_len; len <= password.size(); ++len) {
    for (std::size_t i = 0; i + len <= password.size(); ++i) {
      if (hay.find(password.substr(i, len)) != std::string::npos) return true;
    }
  }
  return false;
}

}  // namespace

TEST(Register, StoresNoPlaintext) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  const std::string password = "Gurara#Falls2024";
  const auto u = id.register_user("amina", password, Role::Tourist);
  EXPECT_EQ(u.username, "amina");
  EXPECT_EQ(u.id, "u-00000001");
  const auto stored = Json(id.get_user(u.id)).dump();
  EXPECT_FALSE(contains_any_substring(stored, password, 4)) << stored;
  const auto state = Json(id.export_state().users).dump();
  EXPECT_FALSE(contains_any_substring(state, password, 4));
}

TEST(Register, Errors) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  id.register_user("amina", "password1", Role::Tourist);
  EXPECT_EQ(code_of([&] { id.register_user("amina", "password2", Role::Local); }), ErrorCode::DuplicateUsername);
  EXPECT_EQ(code_of([&] { id.register_user("bola", "1234567", Role::Local); }), ErrorCode::WeakPassword);
  EXPECT_NO_THROW(id.register_user("bola", "12345678", Role::Local));
  EXPECT_EQ(code_of([&] { id.register_user("", "12345678", Role::Local); }), ErrorCode::Validation);
}

TEST(Register, SaltsDiffer) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  const auto a = id.register_user("a1", "same-password", Role::Tourist);
  const auto b = id.register_user("b1", "same-password", Role::Tourist);
  EXPECT_NE(a.credential.salt, b.credential.salt);
  EXPECT_NE(a.credential.digest, b.credential.digest);
}

TEST(Login, Flow) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  const auto u = id.register_user("amina", "password1", Role::Tourist);
  const auto s = id.login("amina", "password1", at(0));
  EXPECT_EQ(s.token.size(), 32u);
  EXPECT_EQ(s.expires_at, at(3600));
  EXPECT_EQ(id.authenticate(s.token, at(10)), u);
  EXPECT_EQ(code_of([&] { id.login("amina", "password2", at(0)); }), ErrorCode::InvalidCredentials);
  EXPECT_EQ(code_of([&] { id.login("nobody", "password1", at(0)); }), ErrorCode::InvalidCredentials);
}

TEST(Login, FailureMessagesIndistinguishable) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  id.register_user("amina", "password1", Role::Tourist);
  std::string wrong, unknown;
  try {
    id.login("amina", "bad-password", at(0));
  } catch (const Error& e) {
    wrong = e.what();
  }
  try {
    id.login("ghost", "bad-password", at(0));
  } catch (const Error& e) {
    unknown = e.what();
  }
  EXPECT_EQ(wrong, unknown);
}

TEST(Authenticate, ExpiryIsExclusive) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  id.register_user("amina", "password1", Role::Tourist);
  const auto s = id.login("amina", "password1", at(0));
  EXPECT_NO_THROW((void)id.authenticate(s.token, at(3599)));
  EXPECT_EQ(code_of([&] { (void)id.authenticate(s.token, at(3600)); }), ErrorCode::Unauthorized);
  EXPECT_EQ(code_of([&] { (void)id.authenticate("deadbeef", at(0)); }), ErrorCode::Unauthorized);
}

TEST(Logout, IdempotentAndRevokes) {
  Identity id(std::make_shared<SystemRandom>(), fast());
  id.register_user("amina", "password1", Role::Tourist);
  const auto s = id.login("amina", "password1", at(0));
  EXPECT_TRUE(id.logout(s.token));
  EXPECT_EQ(code_of([&] { (void)id.authenticate(s.token, at(1)); }), ErrorCode::Unauthorized);
  EXPECT_FALSE(id.logout(s.token));
  EXPECT_FALSE(id.logout("never-issued"));
}

TEST(Tokens, TenThousandDistinct) {
  Identity id(std::make_shared<SystemRandom>(), {std::chrono::seconds{3600}, 1});
  id.register_user("amina", "password1", Role::Tourist);
  std::set<std::string> seen;
  for (int i = 0; i < 10'000; ++i) seen.insert(id.login("amina", "password1", at(i)).token);
  EXPECT_EQ(seen.size(), 10'000u);
}

TEST(Password, HashAndVerify) {
  SystemRandom rng;
  const auto c = hash_password("correct horse", rng, 1000);
  EXPECT_EQ(c.iterations, 1000u);
  EXPECT_TRUE(verify_password("correct horse", c));
  EXPECT_FALSE(verify_password("correct horsE", c));
  EXPECT_FALSE(verify_password("", c));
}

TEST(Roles, ParseAndPrint) {
  for (auto r : {Role::Tourist, Role::Local, Role::SiteManager, Role::Admin}) {
    EXPECT_EQ(parse_role(to_string(r)), r);
  }
  EXPECT_EQ(code_of([] { (void)parse_role("Admin"); }), ErrorCode::Validation);
}

TEST(Identity, ConcurrentRegistrationsAreLinearizable) {
  Identity id(std::make_shared<SystemRandom>(), {std::chrono::seconds{3600}, 1});
  std::atomic<int> ok{0};
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t) {
    ts.emplace_back([&] {
      for (int i = 0; i < 50; ++i) {
        try {
          id.register_user("user" + std::to_string(i), "password1", Role::Tourist);
          ++ok;
        } catch (const Error&) {
        }
      }
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(ok.load(), 50);
  EXPECT_EQ(id.list_users().size(), 50u);
}

TEST(Identity, RandomizedRoundTrip) {
  std::mt19937_64 rng(67);
  Identity id(std::make_shared<SeededRandom>(5), {std::chrono::seconds{100}, 1});
  std::map<std::string, std::string> passwords;  // username -> password
  std::map<std::string, std::pair<std::string, int>> live;  // token -> (username, expires)
  int clock = 0;
  for (int op = 0; op < 1500; ++op) {
    clock += static_cast<int>(rng() % 5);
    const auto name = "user" + std::to_string(rng() % 40);
    switch (rng() % 4) {
      case 0: {
        const auto pw = "pw-" + std::to_string(rng() % 1000) + "-long";
        const auto c = code_of([&] { id.register_user(name, pw, Role::Local); });
        if (passwords.contains(name)) {
          EXPECT_EQ(c, ErrorCode::DuplicateUsername);
        } else {
          EXPECT_EQ(c, ErrorCode::Internal);
          passwords[name] = pw;
        }
        break;
      }
      case 1: {
        if (!passwords.contains(name)) {
          EXPECT_EQ(code_of([&] { id.login(name, "whatever-pw", at(clock)); }), ErrorCode::InvalidCredentials);
          break;
        }
        const auto s = id.login(name, passwords[name], at(clock));
        live[s.token] = {name, clock + 100};
        break;
      }
      case 2: {
        if (live.empty()) break;
        auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
        if (clock < it->second.second) {
          EXPECT_EQ(id.authenticate(it->first, at(clock)).username, it->second.first);
        } else {
          EXPECT_EQ(code_of([&] { (void)id.authenticate(it->first, at(clock)); }), ErrorCode::Unauthorized);
        }
        break;
      }
      default: {
        if (live.empty()) break;
        auto it = std::next(live.begin(), static_cast<long>(rng() % live.size()));
        id.logout(it->first);
        EXPECT_EQ(code_of([&] { (void)id.authenticate(it->first, at(clock)); }), ErrorCode::Unauthorized);
        live.erase(it);
      }
    }
  }
  Identity copy(std::make_shared<SeededRandom>(5), {std::chrono::seconds{100}, 1});
  copy.import_state(id.export_state());
  EXPECT_EQ(copy.list_users(), id.list_users());
  EXPECT_EQ(copy.list_sessions(), id.list_sessions());
}
