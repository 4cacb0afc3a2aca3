#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <span>
#include <string>

namespace dms {

/// Source of unpredictable bytes for salts and session tokens.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  /// `bytes` random bytes, lower-case hex encoded.
  std::string hex(std::size_t bytes);
};

/// OpenSSL CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Reproducible stream for tests and backend comparisons. Not for production.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mutex mu_;
  std::mt19937_64 engine_;
};

[[nodiscard]] std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace dms
