#ifndef RBO_WIRE_HPP
#define RBO_WIRE_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rbo/schedule.hpp"

namespace rbo::wire {

// Frame layout, all integers big-endian:
//   magic 0xB1 | k (1) | slot (8) | index (8) | key (8) | payload_len (2) | payload
inline constexpr std::uint8_t kFrameMagic = 0xB1;
inline constexpr std::size_t kFrameHeaderSize = 28;
inline constexpr std::size_t kMaxPayload = 0xFFFF;

// Cycle file: "RBOC" | k (1) | n sorted keys (8 each)
inline constexpr std::string_view kCycleMagic = "RBOC";
inline constexpr std::size_t kCycleHeaderSize = 5;

enum class ErrorKind {
  kBadMagic,
  kTruncated,
  kTrailingBytes,
  kBitWidthOutOfRange,
  kSlotOutOfRange,
  kIndexMismatch,
  kPayloadTooLarge,
  kUnsortedKeys,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Decodes exactly one frame occupying the whole buffer.
Frame decode_frame(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_cycle(const BroadcastCycle& cycle);
BroadcastCycle decode_cycle(std::span<const std::uint8_t> bytes);

void write_cycle(std::ostream& out, const BroadcastCycle& cycle);
BroadcastCycle read_cycle(std::istream& in);

}  // namespace rbo::wire

#endif  // RBO_WIRE_HPP
