#include "pnnkit/io.hpp"

#include <cstring>
#include <istream>
#include <ostream>

namespace pnnkit {
namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
  }
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u8(std::ostream& os, std::uint8_t v) { put_le(os, v); }
void write_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
void write_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }

void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_le(os, bits);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_le(os, bits);
}

void write_f32_array(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) write_f32(os, static_cast<float>(x));
}

void write_f64_array(std::ostream& os, const std::vector<double>& v) {
  for (double x : v) write_f64(os, x);
}

Reader::Reader(std::istream& is, std::string source)
    : is_(is), source_(std::move(source)) {}

void Reader::read(void* p, std::size_t n) {
  is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is_.gcount()) != n) {
    fail("unexpected end of file");
  }
  offset_ += n;
}

void Reader::fail(const std::string& what) const {
  throw FormatError(source_ + ": " + what + " at offset " +
                    std::to_string(offset_));
}

std::uint8_t Reader::u8() {
  unsigned char b;
  read(&b, 1);
  return b;
}

std::uint32_t Reader::u32() {
  unsigned char b[4];
  read(b, 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t Reader::u64() {
  unsigned char b[8];
  read(b, 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

float Reader::f32() {
  const std::uint32_t bits = u32();
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

double Reader::f64() {
  const std::uint64_t bits = u64();
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void Reader::expect_magic(const char magic[8]) {
  char buf[8];
  read(buf, 8);
  if (std::memcmp(buf, magic, 8) != 0) {
    std::string expected(magic, magic + 7);  // trailing NUL dropped for display
    throw FormatError(source_ + ": bad magic, expected \"" + expected + "\"");
  }
}

std::vector<double> Reader::f32_array(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f32();
  return out;
}

std::vector<double> Reader::f64_array(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f64();
  return out;
}

}  // namespace pnnkit
