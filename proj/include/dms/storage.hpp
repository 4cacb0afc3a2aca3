#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dms/json_codec.hpp"

namespace dms::storage {

enum class BackendKind { Memory, Disk };

[[nodiscard]] std::string_view to_string(BackendKind k) noexcept;
[[nodiscard]] BackendKind parse_backend(std::string_view text);

struct JournalEntry {
  std::uint64_t seq = 0;
  Json event;
};

/// What a backend hands back at startup: the newest snapshot, if any, and
/// every committed journal entry newer than it, in commit order.
struct Recovered {
  std::optional<Json> state;
  std::uint64_t snapshot_seq = 0;
  std::vector<JournalEntry> entries;
  std::uint64_t discarded_bytes = 0;  // torn tail dropped from the journal
};

/// Persistence contract shared by the memory and disk backends.
///
/// append() commits one event atomically: after a crash the event is either
/// fully present or absent. write_snapshot() persists a full state image
/// covering every entry up to `seq`; entries at or below it may be dropped.
class StorageBackend {
 public:
  virtual ~StorageBackend() = default;

  [[nodiscard]] virtual BackendKind kind() const noexcept = 0;
  virtual Recovered recover() = 0;
  virtual void append(const JournalEntry& entry) = 0;
  virtual void write_snapshot(std::uint64_t seq, const Json& state) = 0;
};

/// Volatile backend: nothing survives the process.
class MemoryBackend final : public StorageBackend {
 public:
  [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::Memory; }
  Recovered recover() override { return {}; }
  void append(const JournalEntry&) override {}
  void write_snapshot(std::uint64_t, const Json&) override {}
};

/// Append-only journal plus snapshot file in a data directory.
///
/// Journal record: u32 payload length, u32 CRC-32 of the payload (both
/// little-endian), then the payload, a compact JSON object {"seq", "event"}.
/// A short or checksum-failing tail is treated as a torn write and truncated
/// on recovery. Snapshots are written to a temporary file, fsynced and
/// renamed over the previous one before the journal is compacted.
class DiskBackend final : public StorageBackend {
 public:
  /// Creates the directory if needed; throws Io if it is not writable.
  explicit DiskBackend(std::filesystem::path dir, bool fsync = true);
  ~DiskBackend() override;
  DiskBackend(const DiskBackend&) = delete;
  DiskBackend& operator=(const DiskBackend&) = delete;

  [[nodiscard]] BackendKind kind() const noexcept override { return BackendKind::Disk; }
  Recovered recover() override;
  void append(const JournalEntry& entry) override;
  void write_snapshot(std::uint64_t seq, const Json& state) override;

  [[nodiscard]] std::filesystem::path journal_path() const { return dir_ / "journal.log"; }
  [[nodiscard]] std::filesystem::path snapshot_path() const { return dir_ / "snapshot.dms"; }

 private:
  void open_journal();

  std::filesystem::path dir_;
  bool fsync_;
  int journal_fd_ = -1;
};

[[nodiscard]] std::unique_ptr<StorageBackend> make_backend(BackendKind kind,
                                                           const std::filesystem::path& dir);

/// Snapshot artifact: header line "DMSSNAP 1 <seq> <length> <crc32 hex>"
/// followed by the JSON state document.
[[nodiscard]] std::string encode_snapshot(std::uint64_t seq, const Json& state);

struct DecodedSnapshot {
  std::uint64_t seq = 0;
  Json state;
};

/// Throws CorruptSnapshot on a bad header, length or checksum.
[[nodiscard]] DecodedSnapshot decode_snapshot(std::string_view bytes);

/// Frames one journal record.
[[nodiscard]] std::string encode_record(const JournalEntry& entry);

struct DecodedJournal {
  std::vector<JournalEntry> entries;
  std::uint64_t valid_bytes = 0;  // prefix made of intact records
};

/// Parses records until the end or the first torn/corrupt record.
[[nodiscard]] DecodedJournal decode_journal(std::string_view bytes);

[[nodiscard]] std::uint32_t crc32(std::string_view bytes) noexcept;

}  // namespace dms::storage
