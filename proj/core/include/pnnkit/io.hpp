#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnnkit/common.hpp"

namespace pnnkit {

// Little-endian binary readers/writers used by every on-disk container.
// Readers throw FormatError naming the byte offset on truncation.

void write_bytes(std::ostream& os, const void* p, std::size_t n);
void write_u8(std::ostream& os, std::uint8_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f32(std::ostream& os, float v);
void write_f64(std::ostream& os, double v);
void write_f32_array(std::ostream& os, const std::vector<double>& v);
void write_f64_array(std::ostream& os, const std::vector<double>& v);

class Reader {
 public:
  Reader(std::istream& is, std::string source);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  void expect_magic(const char magic[8]);
  std::vector<double> f32_array(std::size_t n);
  std::vector<double> f64_array(std::size_t n);
  std::uint64_t offset() const { return offset_; }
  const std::string& source() const { return source_; }
  [[noreturn]] void fail(const std::string& what) const;

 private:
  void read(void* p, std::size_t n);
  std::istream& is_;
  std::string source_;
  std::uint64_t offset_ = 0;
};

}  // namespace pnnkit
