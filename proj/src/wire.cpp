#include "rbo/wire.hpp"

#include <algorithm>
#include <iostream>
#include <iterator>
#include <string>

namespace rbo::wire {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | bytes[pos + i];
  return v;
}

void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

BitWidth read_bit_width(std::uint8_t raw) {
  require(raw <= BitWidth::kMax, ErrorKind::kBitWidthOutOfRange,
          "k = " + std::to_string(raw) + " exceeds 62");
  return BitWidth(raw);
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kBadMagic: return "bad magic";
    case ErrorKind::kTruncated: return "truncated";
    case ErrorKind::kTrailingBytes: return "trailing bytes";
    case ErrorKind::kBitWidthOutOfRange: return "k out of range";
    case ErrorKind::kSlotOutOfRange: return "slot out of range";
    case ErrorKind::kIndexMismatch: return "index/slot mismatch";
    case ErrorKind::kPayloadTooLarge: return "payload too large";
    case ErrorKind::kUnsortedKeys: return "unsorted keys";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
  require(frame.payload.size() <= kMaxPayload, ErrorKind::kPayloadTooLarge,
          std::to_string(frame.payload.size()) + " bytes");
  require(frame.k.contains(frame.slot), ErrorKind::kSlotOutOfRange, "slot >= 2^k");
  require(reverse_bits(frame.slot, frame.k) == frame.index, ErrorKind::kIndexMismatch,
          "index is not the bit reversal of slot");

  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderSize + frame.payload.size());
  out.push_back(kFrameMagic);
  out.push_back(static_cast<std::uint8_t>(frame.k.value()));
  put_u64(out, frame.slot);
  put_u64(out, frame.index);
  put_u64(out, frame.key);
  out.push_back(static_cast<std::uint8_t>(frame.payload.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(frame.payload.size()));
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  require(!bytes.empty(), ErrorKind::kTruncated, "empty buffer");
  require(bytes[0] == kFrameMagic, ErrorKind::kBadMagic, "expected 0xB1");
  require(bytes.size() >= kFrameHeaderSize, ErrorKind::kTruncated,
          std::to_string(bytes.size()) + " bytes, header needs 28");

  Frame frame;
  frame.k = read_bit_width(bytes[1]);
  frame.slot = get_u64(bytes, 2);
  frame.index = get_u64(bytes, 10);
  frame.key = get_u64(bytes, 18);
  const std::size_t payload_len = (std::size_t{bytes[26]} << 8) | bytes[27];

  require(frame.k.contains(frame.slot), ErrorKind::kSlotOutOfRange,
          "slot " + std::to_string(frame.slot) + " >= 2^" + std::to_string(frame.k.value()));
  require(reverse_bits(frame.slot, frame.k) == frame.index, ErrorKind::kIndexMismatch,
          "index " + std::to_string(frame.index) + " for slot " + std::to_string(frame.slot));
  require(bytes.size() >= kFrameHeaderSize + payload_len, ErrorKind::kTruncated,
          "payload shorter than declared");
  require(bytes.size() == kFrameHeaderSize + payload_len, ErrorKind::kTrailingBytes,
          "bytes after payload");

  frame.payload.assign(bytes.begin() + kFrameHeaderSize, bytes.end());
  return frame;
}

std::vector<std::uint8_t> encode_cycle(const BroadcastCycle& cycle) {
  std::vector<std::uint8_t> out(kCycleMagic.begin(), kCycleMagic.end());
  out.reserve(kCycleHeaderSize + 8 * cycle.size());
  out.push_back(static_cast<std::uint8_t>(cycle.k().value()));
  for (const Key key : cycle.sorted_keys()) put_u64(out, key);
  return out;
}

BroadcastCycle decode_cycle(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min(bytes.size(), kCycleMagic.size());
  require(std::equal(bytes.begin(), bytes.begin() + magic_len, kCycleMagic.begin()),
          ErrorKind::kBadMagic, "expected RBOC");
  require(bytes.size() >= kCycleHeaderSize, ErrorKind::kTruncated, "cycle header");
  const BitWidth k = read_bit_width(bytes[4]);
  const std::uint64_t n = k.cycle_length();
  const std::size_t body = bytes.size() - kCycleHeaderSize;
  require(body / 8 >= n, ErrorKind::kTruncated,
          "expected " + std::to_string(n) + " keys");
  require(body == 8 * n, ErrorKind::kTrailingBytes, "bytes after last key");

  std::vector<Key> keys(n);
  for (std::uint64_t i = 0; i < n; ++i) keys[i] = get_u64(bytes, kCycleHeaderSize + 8 * i);
  require(std::is_sorted(keys.begin(), keys.end()), ErrorKind::kUnsortedKeys,
          "cycle keys not in ascending order");
  return BroadcastCycle(k, std::move(keys));
}

void write_cycle(std::ostream& out, const BroadcastCycle& cycle) {
  const auto bytes = encode_cycle(cycle);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

BroadcastCycle read_cycle(std::istream& in) {
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return decode_cycle(bytes);
}

}  // namespace rbo::wire
