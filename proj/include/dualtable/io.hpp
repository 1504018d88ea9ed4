#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dualtable/bytes.hpp"

namespace dualtable {

namespace fs = std::filesystem;

// Plain snapshot of the byte counters; supports differencing.
struct ByteCounts {
  std::uint64_t master_read = 0;
  std::uint64_t master_written = 0;
  std::uint64_t attached_read = 0;
  std::uint64_t attached_written = 0;
  std::uint64_t attached_entries_read = 0;

  ByteCounts operator-(const ByteCounts& o) const {
    return {master_read - o.master_read, master_written - o.master_written,
            attached_read - o.attached_read, attached_written - o.attached_written,
            attached_entries_read - o.attached_entries_read};
  }
  ByteCounts operator+(const ByteCounts& o) const {
    return {master_read + o.master_read, master_written + o.master_written,
            attached_read + o.attached_read, attached_written + o.attached_written,
            attached_entries_read + o.attached_entries_read};
  }
  bool operator==(const ByteCounts&) const = default;
};

// Process-wide accounting of bytes moved through each store. Master counters
// are file bytes; attached counters are logical delta-entry bytes.
struct IoCounters {
  std::atomic<std::uint64_t> master_read{0};
  std::atomic<std::uint64_t> master_written{0};
  std::atomic<std::uint64_t> attached_read{0};
  std::atomic<std::uint64_t> attached_written{0};
  std::atomic<std::uint64_t> attached_entries_read{0};

  ByteCounts snapshot() const {
    return {master_read.load(), master_written.load(), attached_read.load(),
            attached_written.load(), attached_entries_read.load()};
  }
};

// Thrown by FaultInjector to emulate a process crash at an I/O step.
class SimulatedCrash : public std::exception {
 public:
  explicit SimulatedCrash(std::string site) : site_(std::move(site)) {}
  const char* what() const noexcept override { return site_.c_str(); }

 private:
  std::string site_;
};

// Counts I/O steps and, when armed, fails the Nth one. Every durable write
// path asks `fire(site)` before touching disk; a firing step may first write
// a torn prefix so recovery sees a half-written record.
class FaultInjector {
 public:
  void arm(std::uint64_t step) {
    armed_ = true;
    target_ = step;
    steps_ = 0;
    sites_.clear();
  }
  void disarm() { armed_ = false; }
  void reset_count() {
    steps_ = 0;
    sites_.clear();
  }

  bool fire(std::string_view site) {
    sites_.emplace_back(site);
    return armed_ && steps_++ == target_;
  }

  std::uint64_t steps_seen() const { return sites_.size(); }
  const std::vector<std::string>& sites() const { return sites_; }

 private:
  bool armed_ = false;
  std::uint64_t target_ = 0;
  std::uint64_t steps_ = 0;
  std::vector<std::string> sites_;
};

Bytes read_file(const fs::path& path);

// Create or truncate `path` and write `data`. On a fault the first half of
// the data is written and SimulatedCrash is thrown.
void write_file(const fs::path& path, std::span<const std::uint8_t> data,
                FaultInjector* fault = nullptr, std::string_view site = "file.write",
                bool sync = false);

// Write to `path`.tmp and rename over `path`. The rename is the commit point.
void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> data,
                       FaultInjector* fault = nullptr, std::string_view site = "file",
                       bool sync = false);

// Append-only file descriptor wrapper used by the delta journal.
class AppendFile {
 public:
  AppendFile() = default;
  explicit AppendFile(const fs::path& path);
  ~AppendFile();
  AppendFile(AppendFile&& other) noexcept;
  AppendFile& operator=(AppendFile&& other) noexcept;
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  void append(std::span<const std::uint8_t> data, FaultInjector* fault = nullptr,
              std::string_view site = "append");
  void truncate(std::uint64_t size);
  void sync();
  std::uint64_t size() const;
  bool is_open() const { return fd_ >= 0; }

 private:
  void close() noexcept;

  int fd_ = -1;
  fs::path path_;
};

}  // namespace dualtable
