#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dms/random.hpp"
#include "dms/time.hpp"

namespace dms::identity {

enum class Role { Tourist, Local, SiteManager, Admin };

[[nodiscard]] std::string_view to_string(Role r) noexcept;
/// "tourist", "local", "site_manager", "admin"; throws Validation otherwise.
[[nodiscard]] Role parse_role(std::string_view text);

/// Salted PBKDF2-HMAC-SHA256 record. Never holds the password itself.
struct Credential {
  std::string salt;    // hex
  std::string digest;  // hex
  std::uint32_t iterations = 0;

  friend bool operator==(const Credential&, const Credential&) = default;
};

struct UserAccount {
  std::string id;
  std::string username;
  Credential credential;
  Role role = Role::Tourist;

  friend bool operator==(const UserAccount&, const UserAccount&) = default;
};

struct Session {
  std::string token;  // 128 random bits, hex
  std::string user_id;
  Timestamp issued_at;
  Timestamp expires_at;

  friend bool operator==(const Session&, const Session&) = default;
};

inline constexpr std::size_t kMinPasswordLength = 8;
inline constexpr std::uint32_t kDefaultHashIterations = 60'000;

[[nodiscard]] Credential hash_password(std::string_view password, RandomSource& rng,
                                       std::uint32_t iterations);
/// Constant-time comparison of the derived digest.
[[nodiscard]] bool verify_password(std::string_view password, const Credential& credential);

struct IdentityOptions {
  std::chrono::seconds session_ttl{24 * 3600};
  std::uint32_t hash_iterations = kDefaultHashIterations;
};

/// Accounts and bearer sessions.
class Identity {
 public:
  Identity(std::shared_ptr<RandomSource> rng, IdentityOptions options = {});
  Identity(const Identity&) = delete;
  Identity& operator=(const Identity&) = delete;

  /// Throws DuplicateUsername, WeakPassword or Validation (empty username).
  UserAccount register_user(std::string_view username, std::string_view password, Role role);

  /// Same InvalidCredentials error, after the same hashing work, whether the
  /// username is unknown or the password is wrong.
  Session login(std::string_view username, std::string_view password, Timestamp now);

  /// Throws Unauthorized unless the token is live: issued, not revoked and
  /// now < expires_at.
  [[nodiscard]] UserAccount authenticate(std::string_view token, Timestamp now) const;

  /// Idempotent; unknown tokens are ignored. Returns whether a session was revoked.
  bool logout(std::string_view token);

  /// Throws NotFound.
  [[nodiscard]] UserAccount get_user(std::string_view id) const;
  [[nodiscard]] std::optional<UserAccount> find_username(std::string_view username) const;
  [[nodiscard]] bool has_user(std::string_view id) const;
  [[nodiscard]] std::vector<UserAccount> list_users() const;
  [[nodiscard]] std::vector<Session> list_sessions() const;

  /// Journal replay: store records produced earlier by register_user/login.
  void insert_account(UserAccount account);
  void insert_session(Session session);

  struct State {
    std::vector<UserAccount> users;
    std::vector<Session> sessions;
    std::uint64_t next_user = 1;
  };
  [[nodiscard]] State export_state() const;
  void import_state(State state);

  [[nodiscard]] const IdentityOptions& options() const noexcept { return options_; }

 private:
  std::shared_ptr<RandomSource> rng_;
  IdentityOptions options_;
  Credential decoy_;  // hashed against when the username is unknown
  mutable std::shared_mutex mu_;
  std::map<std::string, UserAccount, std::less<>> users_;
  std::map<std::string, std::string, std::less<>> by_username_;
  std::map<std::string, Session, std::less<>> sessions_;
  std::uint64_t next_user_ = 1;
};

}  // namespace dms::identity
