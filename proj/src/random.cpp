#include "dms/random.hpp"

#include <openssl/rand.h>

#include <vector>

#include "dms/error.hpp"

namespace dms {

std::string RandomSource::hex(std::size_t bytes) {
  std::vector<std::uint8_t> buf(bytes);
  fill(buf);
  return to_hex(buf);
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    fail(ErrorCode::Internal, "system random generator failed");
  }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::lock_guard lock(mu_);
  for (auto& b : out) b = static_cast<std::uint8_t>(engine_() >> 56);
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

}  // namespace dms
