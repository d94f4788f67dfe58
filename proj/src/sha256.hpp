// Minimal SHA-256 (FIPS 180-4) for run-manifest content hashes. Not installed.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace kadtk::detail {

class Sha256 {
 public:
  Sha256() { reset(); }

  void reset();
  void update(const void* data, std::size_t len);
  /// Lowercase hex digest; finalizes the stream.
  std::string hex_digest();

 private:
  void process_block(const std::uint8_t* block);

  std::uint32_t state_[8];
  std::uint64_t total_ = 0;
  std::uint8_t buffer_[64];
  std::size_t buffered_ = 0;
};

std::string sha256_hex(const void* data, std::size_t len);

}  // namespace kadtk::detail
