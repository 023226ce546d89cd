#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "fsqkd/protocol.hpp"

namespace fsqkd {

/// Classical-channel message schema, wire version 1.
///
/// Frame: u8 version | u8 type | u32 payload length | payload.
/// Integers are little-endian. Bit vectors are packed LSB-first.
inline constexpr std::uint8_t kWireVersion = 1;

enum class MessageType : std::uint8_t {
  index_list = 1,
  qber_sample = 2,
  parity = 3,
  pa_seed = 4,
  auth_tag = 5,
  basis_list = 6,
};

std::string_view to_string(MessageType type) noexcept;

/// Ticks on which Bob registered a single-detector click.
struct IndexList {
  std::vector<std::uint64_t> ticks;
  friend bool operator==(const IndexList&, const IndexList&) = default;
};

/// Bob's BB84 measurement bases for the listed ticks.
struct BasisList {
  std::vector<std::uint64_t> ticks;
  std::vector<std::uint8_t> bases;
  friend bool operator==(const BasisList&, const BasisList&) = default;
};

struct QberSample {
  std::vector<QberSampleEntry> entries;
  friend bool operator==(const QberSample& a, const QberSample& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
      if (a.entries[i].tick != b.entries[i].tick || a.entries[i].bit != b.entries[i].bit)
        return false;
    return true;
  }
};

struct BlockParity {
  std::uint32_t block_id = 0;
  std::vector<std::uint8_t> bits;  // row parities, then column parities
  friend bool operator==(const BlockParity&, const BlockParity&) = default;
};

/// All of Alice's block parities for one reconciliation pass.
struct Parity {
  std::uint32_t pass = 0;
  std::vector<BlockParity> blocks;

  std::uint64_t bit_count() const noexcept;
  friend bool operator==(const Parity&, const Parity&) = default;
};

struct PaSeed {
  std::uint64_t seed = 0;
  std::uint32_t target_length = 0;
  friend bool operator==(const PaSeed&, const PaSeed&) = default;
};

struct AuthTagMsg {
  std::uint64_t message_id = 0;
  std::uint64_t key_offset = 0;
  std::uint64_t tag = 0;
  friend bool operator==(const AuthTagMsg&, const AuthTagMsg&) = default;
};

using Message = std::variant<IndexList, QberSample, Parity, PaSeed, AuthTagMsg, BasisList>;

MessageType type_of(const Message& m) noexcept;

std::vector<std::uint8_t> serialize(const Message& m);

/// Parse one frame. Throws ProtocolError on malformed input or trailing bytes.
Message deserialize(std::span<const std::uint8_t> bytes);

/// Parse a concatenation of frames.
std::vector<Message> deserialize_stream(std::span<const std::uint8_t> bytes);

}  // namespace fsqkd
