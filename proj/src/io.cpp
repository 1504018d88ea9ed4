#include "dualtable/io.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "dualtable/error.hpp"

namespace dualtable {

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = 1U << 30;
  for (std::size_t off = 0; off < data.size(); off += kChunk) {
    auto n = std::min(kChunk, data.size() - off);
    crc = ::crc32(crc, data.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

[[noreturn]] void throw_errno(const std::string& what, const fs::path& path) {
  throw IoError(what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::uint8_t* data, std::size_t n, const fs::path& path) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw_errno("write", path);
    }
    data += w;
    n -= static_cast<std::size_t>(w);
  }
}

void sync_dir(const fs::path& dir) {
  int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

}  // namespace

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  Bytes data(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(size))) {
    throw IoError("cannot read " + path.string());
  }
  return data;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> data, FaultInjector* fault,
                std::string_view site, bool sync) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw_errno("open", path);
  try {
    if (fault != nullptr && fault->fire(site)) {
      write_all(fd, data.data(), data.size() / 2, path);
      ::close(fd);
      throw SimulatedCrash(std::string(site));
    }
    write_all(fd, data.data(), data.size(), path);
    if (sync && ::fsync(fd) != 0) throw_errno("fsync", path);
  } catch (const SimulatedCrash&) {
    throw;
  } catch (...) {
    ::close(fd);
    throw;
  }
  if (::close(fd) != 0) throw_errno("close", path);
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> data,
                       FaultInjector* fault, std::string_view site, bool sync) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, data, fault, std::string(site) + ".tmp", sync);
  if (fault != nullptr && fault->fire(std::string(site) + ".rename")) {
    throw SimulatedCrash(std::string(site) + ".rename");
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0) throw_errno("rename", tmp);
  if (sync) sync_dir(path.parent_path());
}

AppendFile::AppendFile(const fs::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw_errno("open", path);
}

AppendFile::~AppendFile() { close(); }

AppendFile::AppendFile(AppendFile&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), path_(std::move(other.path_)) {}

AppendFile& AppendFile::operator=(AppendFile&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = std::exchange(other.fd_, -1);
    path_ = std::move(other.path_);
  }
  return *this;
}

void AppendFile::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void AppendFile::append(std::span<const std::uint8_t> data, FaultInjector* fault,
                        std::string_view site) {
  if (fault != nullptr && fault->fire(site)) {
    write_all(fd_, data.data(), data.size() / 2, path_);
    throw SimulatedCrash(std::string(site));
  }
  write_all(fd_, data.data(), data.size(), path_);
}

void AppendFile::truncate(std::uint64_t size) {
  if (::ftruncate(fd_, static_cast<off_t>(size)) != 0) throw_errno("truncate", path_);
}

void AppendFile::sync() {
  if (::fdatasync(fd_) != 0) throw_errno("fdatasync", path_);
}

std::uint64_t AppendFile::size() const {
  struct stat st {};
  if (::fstat(fd_, &st) != 0) throw_errno("stat", path_);
  return static_cast<std::uint64_t>(st.st_size);
}

}  // namespace dualtable
