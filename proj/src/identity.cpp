#include "dms/identity.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <mutex>

#include "dms/error.hpp"

namespace dms::identity {

std::string_view to_string(Role r) noexcept {
  switch (r) {
    case Role::Tourist: return "tourist";
    case Role::Local: return "local";
    case Role::SiteManager: return "site_manager";
    case Role::Admin: return "admin";
  }
  return "tourist";
}

Role parse_role(std::string_view text) {
  if (text == "tourist") return Role::Tourist;
  if (text == "local") return Role::Local;
  if (text == "site_manager") return Role::SiteManager;
  if (text == "admin") return Role::Admin;
  fail(ErrorCode::Validation, "role must be tourist, local, site_manager or admin");
}

namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kDigestBytes = 32;
constexpr std::size_t kTokenBytes = 16;

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) return {};
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return {};
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::array<std::uint8_t, kDigestBytes> derive(std::string_view password,
                                              std::span<const std::uint8_t> salt,
                                              std::uint32_t iterations) {
  std::array<std::uint8_t, kDigestBytes> out{};
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), static_cast<int>(iterations), EVP_sha256(),
                        static_cast<int>(out.size()), out.data()) != 1) {
    fail(ErrorCode::Internal, "password hashing failed");
  }
  return out;
}

}  // namespace

Credential hash_password(std::string_view password, RandomSource& rng, std::uint32_t iterations) {
  if (iterations == 0) fail(ErrorCode::Validation, "hash iterations must be positive");
  std::array<std::uint8_t, kSaltBytes> salt{};
  rng.fill(salt);
  const auto digest = derive(password, salt, iterations);
  return {to_hex(salt), to_hex(digest), iterations};
}

bool verify_password(std::string_view password, const Credential& credential) {
  const auto salt = from_hex(credential.salt);
  const auto expected = from_hex(credential.digest);
  if (salt.empty() || expected.size() != kDigestBytes || credential.iterations == 0) return false;
  const auto actual = derive(password, salt, credential.iterations);
  return CRYPTO_memcmp(actual.data(), expected.data(), kDigestBytes) == 0;
}

Identity::Identity(std::shared_ptr<RandomSource> rng, IdentityOptions options)
    : rng_(std::move(rng)), options_(options) {
  if (!rng_) fail(ErrorCode::Config, "identity needs a random source");
  if (options_.session_ttl.count() <= 0) fail(ErrorCode::Config, "session TTL must be positive");
  if (options_.hash_iterations == 0) fail(ErrorCode::Config, "hash iterations must be positive");
  SeededRandom decoy_rng(0);
  decoy_ = hash_password("decoy-password", decoy_rng, options_.hash_iterations);
}

UserAccount Identity::register_user(std::string_view username, std::string_view password, Role role) {
  if (username.empty()) fail(ErrorCode::Validation, "username must not be empty");
  if (password.size() < kMinPasswordLength) {
    fail(ErrorCode::WeakPassword,
         "password must be at least " + std::to_string(kMinPasswordLength) + " characters");
  }
  {
    std::shared_lock lock(mu_);
    if (by_username_.contains(username)) {
      fail(ErrorCode::DuplicateUsername, "username already taken: " + std::string(username));
    }
  }
  // Hash outside the lock; the uniqueness check is repeated below.
  auto credential = hash_password(password, *rng_, options_.hash_iterations);

  std::unique_lock lock(mu_);
  if (by_username_.contains(username)) {
    fail(ErrorCode::DuplicateUsername, "username already taken: " + std::string(username));
  }
  char id[32];
  std::snprintf(id, sizeof id, "u-%08llu", static_cast<unsigned long long>(next_user_++));
  UserAccount account{id, std::string(username), std::move(credential), role};
  by_username_.emplace(account.username, account.id);
  users_.emplace(account.id, account);
  return account;
}

Session Identity::login(std::string_view username, std::string_view password, Timestamp now) {
  std::optional<UserAccount> account = find_username(username);
  const bool ok = verify_password(password, account ? account->credential : decoy_);
  if (!account || !ok) fail(ErrorCode::InvalidCredentials, "invalid username or password");

  Session s{rng_->hex(kTokenBytes), account->id, now, now + options_.session_ttl};
  std::unique_lock lock(mu_);
  while (sessions_.contains(s.token)) s.token = rng_->hex(kTokenBytes);
  sessions_.emplace(s.token, s);
  return s;
}

UserAccount Identity::authenticate(std::string_view token, Timestamp now) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end() || !(now < it->second.expires_at)) {
    fail(ErrorCode::Unauthorized, "missing, expired or revoked session token");
  }
  auto user = users_.find(it->second.user_id);
  if (user == users_.end()) fail(ErrorCode::Unauthorized, "session user no longer exists");
  return user->second;
}

bool Identity::logout(std::string_view token) {
  std::unique_lock lock(mu_);
  auto it = sessions_.find(token);
  if (it == sessions_.end()) return false;
  sessions_.erase(it);
  return true;
}

UserAccount Identity::get_user(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = users_.find(id);
  if (it == users_.end()) fail(ErrorCode::NotFound, "no user with id " + std::string(id));
  return it->second;
}

std::optional<UserAccount> Identity::find_username(std::string_view username) const {
  std::shared_lock lock(mu_);
  auto it = by_username_.find(username);
  if (it == by_username_.end()) return std::nullopt;
  return users_.find(it->second)->second;
}

bool Identity::has_user(std::string_view id) const {
  std::shared_lock lock(mu_);
  return users_.find(id) != users_.end();
}

std::vector<UserAccount> Identity::list_users() const {
  std::shared_lock lock(mu_);
  std::vector<UserAccount> out;
  for (const auto& [id, u] : users_) out.push_back(u);
  return out;
}

std::vector<Session> Identity::list_sessions() const {
  std::shared_lock lock(mu_);
  std::vector<Session> out;
  for (const auto& [token, s] : sessions_) out.push_back(s);
  return out;
}

void Identity::insert_account(UserAccount account) {
  std::unique_lock lock(mu_);
  if (users_.contains(account.id) || by_username_.contains(account.username)) {
    fail(ErrorCode::DuplicateUsername, "account already present: " + account.username);
  }
  // Keep the id counter ahead of replayed ids.
  if (account.id.starts_with("u-")) {
    const auto n = std::strtoull(account.id.c_str() + 2, nullptr, 10);
    if (n >= next_user_) next_user_ = n + 1;
  }
  by_username_.emplace(account.username, account.id);
  users_.emplace(account.id, std::move(account));
}

void Identity::insert_session(Session session) {
  std::unique_lock lock(mu_);
  if (!users_.contains(session.user_id)) fail(ErrorCode::NotFound, "session for unknown user");
  std::string token = session.token;
  sessions_.insert_or_assign(std::move(token), std::move(session));
}

Identity::State Identity::export_state() const {
  std::shared_lock lock(mu_);
  State s;
  for (const auto& [id, u] : users_) s.users.push_back(u);
  for (const auto& [t, session] : sessions_) s.sessions.push_back(session);
  s.next_user = next_user_;
  return s;
}

void Identity::import_state(State state) {
  {
    std::unique_lock lock(mu_);
    users_.clear();
    by_username_.clear();
    sessions_.clear();
    next_user_ = 1;
  }
  try {
    for (auto& u : state.users) insert_account(std::move(u));
    for (auto& s : state.sessions) insert_session(std::move(s));
  } catch (const Error& e) {
    fail(ErrorCode::CorruptSnapshot, e.what());
  }
  std::unique_lock lock(mu_);
  next_user_ = std::max(next_user_, state.next_user);
}

}  // namespace dms::identity
