#include "dms/storage.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "dms/error.hpp"
#include "dms/text.hpp"

namespace dms::storage {

std::string_view to_string(BackendKind k) noexcept {
  return k == BackendKind::Memory ? "memory" : "disk";
}

BackendKind parse_backend(std::string_view text) {
  if (text == "memory") return BackendKind::Memory;
  if (text == "disk") return BackendKind::Disk;
  fail(ErrorCode::Config, "storage backend must be memory or disk");
}

std::uint32_t crc32(std::string_view bytes) noexcept {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes a uInt length; feed large inputs in pieces.
  while (!bytes.empty()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), n);
    bytes.remove_prefix(n);
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  return v;
}

[[noreturn]] void io_fail(const std::string& what) {
  fail(ErrorCode::Io, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const std::string& what) {
  while (!bytes.empty()) {
    const auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail(what);
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::optional<std::string> read_if_exists(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(p)) return std::nullopt;
    fail(ErrorCode::Io, "cannot read " + p.string());
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void fsync_dir(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

std::string encode_record(const JournalEntry& entry) {
  const std::string payload = Json{{"seq", entry.seq}, {"event", entry.event}}.dump();
  std::string out;
  out.reserve(payload.size() + 8);
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  put_u32(out, crc32(payload));
  out += payload;
  return out;
}

DecodedJournal decode_journal(std::string_view bytes) {
  DecodedJournal out;
  std::size_t pos = 0;
  while (bytes.size() - pos >= 8) {
    const auto len = get_u32(bytes.substr(pos));
    const auto crc = get_u32(bytes.substr(pos + 4));
    if (bytes.size() - pos - 8 < len) break;
    const auto payload = bytes.substr(pos + 8, len);
    if (crc32(payload) != crc) break;
    auto doc = Json::parse(payload, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("seq") || !doc.contains("event") ||
        !doc["seq"].is_number_unsigned()) {
      break;
    }
    out.entries.push_back({doc["seq"].get<std::uint64_t>(), std::move(doc["event"])});
    pos += 8 + len;
  }
  out.valid_bytes = pos;
  return out;
}

std::string encode_snapshot(std::uint64_t seq, const Json& state) {
  const std::string body = state.dump();
  char header[96];
  std::snprintf(header, sizeof header, "DMSSNAP 1 %llu %zu %08x\n",
                static_cast<unsigned long long>(seq), body.size(), crc32(body));
  return header + body;
}

DecodedSnapshot decode_snapshot(std::string_view bytes) {
  auto corrupt = [](const std::string& why) { fail(ErrorCode::CorruptSnapshot, "snapshot " + why); };
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) corrupt("has no header");
  const std::string header(bytes.substr(0, nl));
  const auto body = bytes.substr(nl + 1);

  std::istringstream in(header);
  std::string magic, version, seq_text, len_text, crc_text;
  in >> magic >> version >> seq_text >> len_text >> crc_text;
  if (magic != "DMSSNAP" || version != "1") corrupt("has an unknown header");
  const auto seq = text::parse_int(seq_text);
  const auto len = text::parse_int(len_text);
  if (!seq || !len || *seq < 0 || *len < 0) corrupt("header is malformed");
  if (static_cast<std::uint64_t>(*len) != body.size()) corrupt("is truncated or has trailing bytes");
  char expected[16];
  std::snprintf(expected, sizeof expected, "%08x", crc32(body));
  if (crc_text != expected) corrupt("checksum mismatch");
  auto state = Json::parse(body, nullptr, false);
  if (state.is_discarded()) corrupt("body is not JSON");
  return {static_cast<std::uint64_t>(*seq), std::move(state)};
}

DiskBackend::DiskBackend(std::filesystem::path dir, bool fsync) : dir_(std::move(dir)), fsync_(fsync) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    fail(ErrorCode::Io, "cannot create data directory " + dir_.string());
  }
  if (::access(dir_.c_str(), W_OK) != 0) fail(ErrorCode::Io, "data directory not writable: " + dir_.string());
}

DiskBackend::~DiskBackend() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
}

void DiskBackend::open_journal() {
  if (journal_fd_ >= 0) return;
  journal_fd_ = ::open(journal_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (journal_fd_ < 0) io_fail("cannot open " + journal_path().string());
}

Recovered DiskBackend::recover() {
  Recovered r;
  if (auto snap = read_if_exists(snapshot_path())) {
    auto decoded = decode_snapshot(*snap);
    r.state = std::move(decoded.state);
    r.snapshot_seq = decoded.seq;
  }
  if (auto journal = read_if_exists(journal_path())) {
    auto decoded = decode_journal(*journal);
    r.discarded_bytes = journal->size() - decoded.valid_bytes;
    if (r.discarded_bytes > 0) {
      std::filesystem::resize_file(journal_path(), decoded.valid_bytes);
    }
    for (auto& e : decoded.entries) {
      if (e.seq > r.snapshot_seq) r.entries.push_back(std::move(e));
    }
  }
  open_journal();
  return r;
}

void DiskBackend::append(const JournalEntry& entry) {
  open_journal();
  const off_t before = ::lseek(journal_fd_, 0, SEEK_END);
  try {
    write_all(journal_fd_, encode_record(entry), "journal append");
    if (fsync_ && ::fdatasync(journal_fd_) != 0) io_fail("journal sync");
  } catch (...) {
    // Drop a partial record so later appends stay readable; if this fails
    // too, recovery cuts the torn tail.
    [[maybe_unused]] const int rc = before >= 0 ? ::ftruncate(journal_fd_, before) : 0;
    throw;
  }
}

void DiskBackend::write_snapshot(std::uint64_t seq, const Json& state) {
  const auto tmp = dir_ / "snapshot.dms.tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("cannot create " + tmp.string());
  try {
    write_all(fd, encode_snapshot(seq, state), "snapshot write");
    if (::fsync(fd) != 0) io_fail("snapshot sync");
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, snapshot_path(), ec);
  if (ec) fail(ErrorCode::Io, "cannot install snapshot: " + ec.message());
  fsync_dir(dir_);

  // Every journal entry is now covered by the snapshot.
  if (journal_fd_ >= 0) {
    ::close(journal_fd_);
    journal_fd_ = -1;
  }
  const int jfd = ::open(journal_path().c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (jfd < 0) io_fail("cannot compact journal");
  ::fsync(jfd);
  ::close(jfd);
  open_journal();
}

std::unique_ptr<StorageBackend> make_backend(BackendKind kind, const std::filesystem::path& dir) {
  if (kind == BackendKind::Memory) return std::make_unique<MemoryBackend>();
  return std::make_unique<DiskBackend>(dir);
}

}  // namespace dms::storage
