#include "rbo/wire.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "rbo/random.hpp"

namespace rbo::wire {
namespace {

using Bytes = std::vector<std::uint8_t>;

Frame make_frame(unsigned bits, Slot slot, Key key, Bytes payload = {}) {
  Frame f;
  f.k = BitWidth(bits);
  f.slot = slot;
  f.index = oracle::rev(slot, bits);
  f.key = key;
  f.payload = std::move(payload);
  return f;
}

ErrorKind decode_error(const Bytes& bytes) {
  try {
    decode_frame(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode accepted corrupt bytes";
  return ErrorKind::kBadMagic;
}

TEST(EncodeFrame, GoldenBytes) {
  const Bytes golden{
      0xB1, 0x02,                                      // magic, k
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01,  // slot
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02,  // index
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1E,  // key
      0x00, 0x00,                                      // payload length
  };
  const auto f = build_cycle({10, 20, 30}).frame_at(1);
  EXPECT_EQ(encode_frame(f), golden);
  EXPECT_EQ(decode_frame(golden), f);
}

TEST(EncodeFrame, ZeroBitCycle) {
  const auto bytes = encode_frame(build_cycle({7}).frame_at(0));
  ASSERT_EQ(bytes.size(), kFrameHeaderSize);
  for (std::size_t i = 10; i < 18; ++i) EXPECT_EQ(bytes[i], 0);
  EXPECT_EQ(bytes[25], 7);
}

TEST(EncodeFrame, PayloadLengthIsBigEndian) {
  const auto bytes = encode_frame(make_frame(4, 3, 99, Bytes(0x0102, 0xAA)));
  EXPECT_EQ(bytes.size(), kFrameHeaderSize + 0x0102);
  EXPECT_EQ(bytes[26], 0x01);
  EXPECT_EQ(bytes[27], 0x02);
}

TEST(EncodeFrame, RejectsInvalidFrames) {
  EXPECT_THROW(encode_frame(make_frame(3, 1, 0, Bytes(kMaxPayload + 1))), Error);
  Frame bad = make_frame(3, 1, 0);
  bad.index = 1;
  EXPECT_THROW(encode_frame(bad), Error);
  bad = make_frame(3, 1, 0);
  bad.slot = 9;
  EXPECT_THROW(encode_frame(bad), Error);
}

TEST(DecodeFrame, RandomRoundTrips) {
  SplitMix64 rng(31337);
  for (int i = 0; i < 2000; ++i) {
    const auto bits = static_cast<unsigned>(rng.below(63));
    Bytes payload(rng.below(64));
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next());
    const Frame f = make_frame(bits, rng.next() & BitWidth(bits).mask(), rng.next(), payload);
    ASSERT_EQ(decode_frame(encode_frame(f)), f);
  }
}

TEST(DecodeFrame, CorruptionClasses) {
  const Bytes good = encode_frame(make_frame(5, 12, 1234, {1, 2, 3}));

  Bytes b = good;
  b[0] ^= 0xFF;
  EXPECT_EQ(decode_error(b), ErrorKind::kBadMagic);

  b = good;
  b[1] = 63;
  EXPECT_EQ(decode_error(b), ErrorKind::kBitWidthOutOfRange);

  b = good;
  b[9] ^= 0x01;  // slot 13
  EXPECT_EQ(decode_error(b), ErrorKind::kIndexMismatch);

  b = good;
  b[2] = 0x80;  // slot far above 2^5
  EXPECT_EQ(decode_error(b), ErrorKind::kSlotOutOfRange);

  b = good;
  b[17] ^= 0x04;
  EXPECT_EQ(decode_error(b), ErrorKind::kIndexMismatch);

  b = good;
  b[27] = 9;
  EXPECT_EQ(decode_error(b), ErrorKind::kTruncated);

  b = good;
  b[27] = 1;
  EXPECT_EQ(decode_error(b), ErrorKind::kTrailingBytes);

  EXPECT_EQ(decode_error(Bytes(good.begin(), good.begin() + 20)), ErrorKind::kTruncated);
  EXPECT_EQ(decode_error(Bytes(good.begin(), good.end() - 1)), ErrorKind::kTruncated);
  EXPECT_EQ(decode_error(Bytes{}), ErrorKind::kTruncated);
}

TEST(Cycle, RoundTripThroughStream) {
  const auto c = build_cycle({5, 1, 9, 3, 3});
  std::stringstream io;
  write_cycle(io, c);
  const auto back = read_cycle(io);
  EXPECT_EQ(back.k(), c.k());
  EXPECT_TRUE(std::ranges::equal(back.sorted_keys(), c.sorted_keys()));
  const auto bytes = encode_cycle(c);
  ASSERT_EQ(bytes.size(), kCycleHeaderSize + 8 * 8);
  EXPECT_EQ(bytes[0], 'R');
  EXPECT_EQ(bytes[4], 3);
  EXPECT_EQ(bytes[12], 1);
}

TEST(Cycle, RejectsCorruptFiles) {
  const Bytes good = encode_cycle(build_cycle({1, 2, 3, 4}));
  const auto kind = [](const Bytes& b) {
    try {
      decode_cycle(b);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kBadMagic;
  };
  Bytes b = good;
  b[0] = 'X';
  EXPECT_EQ(kind(b), ErrorKind::kBadMagic);
  b = good;
  b.pop_back();
  EXPECT_EQ(kind(b), ErrorKind::kTruncated);
  b = good;
  b.push_back(0);
  EXPECT_EQ(kind(b), ErrorKind::kTrailingBytes);
  b = good;
  b[4] = 70;
  EXPECT_EQ(kind(b), ErrorKind::kBitWidthOutOfRange);
  b = good;
  b[12] = 9;  // first key 9 > second key 2
  EXPECT_EQ(kind(b), ErrorKind::kUnsortedKeys);
}

}  // namespace
}  // namespace rbo::wire
