#include "fsqkd/messages.hpp"

#include <cstring>

#include "fsqkd/errors.hpp"

namespace fsqkd {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void packed_bits(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i] & 1U) packed[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
    out_.insert(out_.end(), packed.begin(), packed.end());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::vector<std::uint8_t> packed_bits(std::size_t n) {
    const std::size_t bytes = (n + 7) / 8;
    need(bytes);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = (in_[pos_ + i / 8] >> (i % 8)) & 1U;
    // Unused high bits of the final byte must be zero so the encoding is canonical.
    if (n % 8 != 0 && (in_[pos_ + bytes - 1] >> (n % 8)) != 0)
      throw ProtocolError("non-canonical bit padding");
    pos_ += bytes;
    return bits;
  }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t position() const noexcept { return pos_; }

  // Guard against counts that cannot fit in the remaining payload.
  void expect_at_least(std::uint64_t items, std::size_t bytes_each) {
    if (items > remaining() / std::max<std::size_t>(bytes_each, 1))
      throw ProtocolError("message count exceeds payload");
  }

 private:
  void need(std::size_t n) {
    if (remaining() < n) throw ProtocolError("truncated message");
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_payload(Writer& w, const IndexList& m) {
  w.u32(static_cast<std::uint32_t>(m.ticks.size()));
  for (auto t : m.ticks) w.u64(t);
}
void write_payload(Writer& w, const BasisList& m) {
  if (m.bases.size() != m.ticks.size()) throw ProtocolError("basis list size mismatch");
  w.u32(static_cast<std::uint32_t>(m.ticks.size()));
  for (std::size_t i = 0; i < m.ticks.size(); ++i) {
    w.u64(m.ticks[i]);
    w.u8(m.bases[i]);
  }
}
void write_payload(Writer& w, const QberSample& m) {
  w.u32(static_cast<std::uint32_t>(m.entries.size()));
  for (const auto& e : m.entries) {
    w.u64(e.tick);
    w.u8(e.bit);
  }
}
void write_payload(Writer& w, const Parity& m) {
  w.u32(m.pass);
  w.u32(static_cast<std::uint32_t>(m.blocks.size()));
  for (const auto& b : m.blocks) {
    w.u32(b.block_id);
    w.u16(static_cast<std::uint16_t>(b.bits.size()));
    w.packed_bits(b.bits);
  }
}
void write_payload(Writer& w, const PaSeed& m) {
  w.u64(m.seed);
  w.u32(m.target_length);
}
void write_payload(Writer& w, const AuthTagMsg& m) {
  w.u64(m.message_id);
  w.u64(m.key_offset);
  w.u64(m.tag);
}

Message read_payload(MessageType type, Reader& r) {
  switch (type) {
    case MessageType::index_list: {
      IndexList m;
      const auto n = r.u32();
      r.expect_at_least(n, 8);
      m.ticks.resize(n);
      for (auto& t : m.ticks) t = r.u64();
      return m;
    }
    case MessageType::basis_list: {
      BasisList m;
      const auto n = r.u32();
      r.expect_at_least(n, 9);
      m.ticks.resize(n);
      m.bases.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        m.ticks[i] = r.u64();
        m.bases[i] = r.u8();
      }
      return m;
    }
    case MessageType::qber_sample: {
      QberSample m;
      const auto n = r.u32();
      r.expect_at_least(n, 9);
      m.entries.resize(n);
      for (auto& e : m.entries) {
        e.tick = r.u64();
        e.bit = r.u8();
        if (e.bit > 1) throw ProtocolError("QBER_SAMPLE bit must be 0 or 1");
      }
      return m;
    }
    case MessageType::parity: {
      Parity m;
      m.pass = r.u32();
      const auto n = r.u32();
      r.expect_at_least(n, 6);
      m.blocks.resize(n);
      for (auto& b : m.blocks) {
        b.block_id = r.u32();
        const auto nbits = r.u16();
        b.bits = r.packed_bits(nbits);
      }
      return m;
    }
    case MessageType::pa_seed: {
      PaSeed m;
      m.seed = r.u64();
      m.target_length = r.u32();
      return m;
    }
    case MessageType::auth_tag: {
      AuthTagMsg m;
      m.message_id = r.u64();
      m.key_offset = r.u64();
      m.tag = r.u64();
      return m;
    }
  }
  throw ProtocolError("unknown message type");
}

constexpr std::size_t kHeaderBytes = 6;

}  // namespace

std::string_view to_string(MessageType type) noexcept {
  switch (type) {
    case MessageType::index_list: return "INDEX_LIST";
    case MessageType::qber_sample: return "QBER_SAMPLE";
    case MessageType::parity: return "PARITY";
    case MessageType::pa_seed: return "PA_SEED";
    case MessageType::auth_tag: return "AUTH_TAG";
    case MessageType::basis_list: return "BASIS_LIST";
  }
  return "UNKNOWN";
}

std::uint64_t Parity::bit_count() const noexcept {
  std::uint64_t n = 0;
  for (const auto& b : blocks) n += b.bits.size();
  return n;
}

MessageType type_of(const Message& m) noexcept {
  struct V {
    MessageType operator()(const IndexList&) const { return MessageType::index_list; }
    MessageType operator()(const QberSample&) const { return MessageType::qber_sample; }
    MessageType operator()(const Parity&) const { return MessageType::parity; }
    MessageType operator()(const PaSeed&) const { return MessageType::pa_seed; }
    MessageType operator()(const AuthTagMsg&) const { return MessageType::auth_tag; }
    MessageType operator()(const BasisList&) const { return MessageType::basis_list; }
  };
  return std::visit(V{}, m);
}

std::vector<std::uint8_t> serialize(const Message& m) {
  Writer payload;
  std::visit([&](const auto& msg) { write_payload(payload, msg); }, m);
  auto body = payload.take();
  Writer frame;
  frame.u8(kWireVersion);
  frame.u8(static_cast<std::uint8_t>(type_of(m)));
  frame.u32(static_cast<std::uint32_t>(body.size()));
  auto out = frame.take();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

namespace {

Message parse_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  Reader header(bytes);
  const auto version = header.u8();
  if (version != kWireVersion) throw ProtocolError("unsupported wire version");
  const auto type = header.u8();
  if (type < 1 || type > 6) throw ProtocolError("unknown message type");
  const auto len = header.u32();
  if (bytes.size() - kHeaderBytes < len) throw ProtocolError("truncated message");
  Reader body(bytes.subspan(kHeaderBytes, len));
  Message m = read_payload(static_cast<MessageType>(type), body);
  if (body.remaining() != 0) throw ProtocolError("trailing bytes in message payload");
  consumed = kHeaderBytes + len;
  return m;
}

}  // namespace

Message deserialize(std::span<const std::uint8_t> bytes) {
  std::size_t consumed = 0;
  Message m = parse_frame(bytes, consumed);
  if (consumed != bytes.size()) throw ProtocolError("trailing bytes after message");
  return m;
}

std::vector<Message> deserialize_stream(std::span<const std::uint8_t> bytes) {
  std::vector<Message> out;
  while (!bytes.empty()) {
    std::size_t consumed = 0;
    out.push_back(parse_frame(bytes, consumed));
    bytes = bytes.subspan(consumed);
  }
  return out;
}

}  // namespace fsqkd
