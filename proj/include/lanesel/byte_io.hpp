#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>

namespace lanesel::detail {

// Big-endian cursor over a fixed buffer. Bounds are the caller's problem;
// every layout in this library is fixed-width and checked up front.
class ByteWriter {
 public:
  explicit ByteWriter(std::span<std::uint8_t> out) : out_(out) {}

  template <typename T>
    requires std::is_integral_v<T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto raw = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_[pos_ + i] = static_cast<std::uint8_t>(raw >> (8 * (sizeof(T) - 1 - i)));
    }
    pos_ += sizeof(T);
  }

  void put_bytes(std::span<const std::uint8_t> bytes) {
    for (auto b : bytes) out_[pos_++] = b;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<std::uint8_t> out_;
  std::size_t pos_ = 0;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
    requires std::is_integral_v<T>
  T get() {
    using U = std::make_unsigned_t<T>;
    U raw = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      raw = static_cast<U>((raw << 8) | in_[pos_ + i]);
    }
    pos_ += sizeof(T);
    return static_cast<T>(raw);
  }

  void get_bytes(std::span<std::uint8_t> out) {
    for (auto& b : out) b = in_[pos_++];
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace lanesel::detail
