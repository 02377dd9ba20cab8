// SPDX-License-Identifier: Apache-2.0
#include "qsl/wire.hpp"

#include <stdexcept>

namespace qsl {

namespace {

constexpr uint8_t kFormLongBit = 0x80;
constexpr uint8_t kFormShortByte = 0x40;
constexpr size_t kLongHeaderLen = 1 + 4 + 8 + 8 + 8 + 2;   // 31
constexpr size_t kShortHeaderLen = 1 + 8 + 8 + 2;          // 19
constexpr size_t kMaxHostname = 253;

bool hostname_ok(const std::string& h) {
  if (h.empty() || h.size() > kMaxHostname) return false;
  for (char c : h)
    if (uint8_t(c) < 0x21 || uint8_t(c) > 0x7e) return false;
  return true;
}

void xor_keystream(Bytes& data, ByteSpan ks) {
  for (size_t i = 0; i < data.size(); ++i) data[i] ^= ks[i];
}

}  // namespace

ConnectionId ConnectionId::from(ByteSpan s) {
  if (s.size() != kCidLen) throw std::invalid_argument("cid must be 8 bytes");
  ConnectionId c;
  std::memcpy(c.bytes.data(), s.data(), kCidLen);
  return c;
}

ConnectionId ConnectionId::random(std::mt19937_64& rng) {
  ConnectionId c;
  uint64_t v = rng();
  for (size_t i = 0; i < kCidLen; ++i) c.bytes[i] = uint8_t(v >> (56 - 8 * i));
  return c;
}

Bytes serialize_frames(const std::vector<Frame>& frames) {
  ByteWriter w;
  for (const Frame& f : frames) {
    std::visit(
        [&](const auto& fr) {
          using T = std::decay_t<decltype(fr)>;
          if constexpr (std::is_same_v<T, CryptoFrame>) {
            w.u8(kFrameCrypto);
            w.u64(fr.offset);
            w.u16(uint16_t(fr.data.size()));
            w.raw(fr.data);
          } else if constexpr (std::is_same_v<T, StreamFrame>) {
            w.u8(kFrameStream);
            w.u64(fr.stream_id);
            w.u64(fr.offset);
            w.u16(uint16_t(fr.data.size()));
            w.u8(fr.fin ? 1 : 0);
            w.raw(fr.data);
          } else if constexpr (std::is_same_v<T, AckFrame>) {
            w.u8(kFrameAck);
            w.u64(fr.largest_acked);
            w.u16(uint16_t(fr.acked.size()));
            for (uint64_t pn : fr.acked) w.u64(pn);
          } else if constexpr (std::is_same_v<T, PathChallengeFrame>) {
            w.u8(kFramePathChallenge);
            w.raw(fr.data.data(), fr.data.size());
          } else if constexpr (std::is_same_v<T, PathResponseFrame>) {
            w.u8(kFramePathResponse);
            w.raw(fr.data.data(), fr.data.size());
          } else if constexpr (std::is_same_v<T, HandshakeDoneFrame>) {
            w.u8(kFrameHandshakeDone);
          } else if constexpr (std::is_same_v<T, NewConnectionIdFrame>) {
            w.u8(kFrameNewConnectionId);
            w.u64(fr.seq);
            w.raw(fr.cid.bytes.data(), kCidLen);
          }
        },
        f);
  }
  return w.take();
}

namespace {

std::optional<std::vector<Frame>> parse_frames(ByteSpan payload) {
  ByteReader r(payload);
  std::vector<Frame> out;
  while (r.ok() && r.remaining() > 0) {
    uint8_t type = r.u8();
    switch (type) {
      case kFrameCrypto: {
        CryptoFrame f;
        f.offset = r.u64();
        uint16_t len = r.u16();
        f.data = r.bytes(len);
        out.emplace_back(std::move(f));
        break;
      }
      case kFrameStream: {
        StreamFrame f;
        f.stream_id = r.u64();
        f.offset = r.u64();
        uint16_t len = r.u16();
        uint8_t fin = r.u8();
        if (fin > 1) return std::nullopt;
        f.fin = fin == 1;
        f.data = r.bytes(len);
        out.emplace_back(std::move(f));
        break;
      }
      case kFrameAck: {
        AckFrame f;
        f.largest_acked = r.u64();
        uint16_t n = r.u16();
        if (r.remaining() < size_t(n) * 8) return std::nullopt;
        f.acked.reserve(n);
        for (uint16_t i = 0; i < n; ++i) f.acked.push_back(r.u64());
        out.emplace_back(std::move(f));
        break;
      }
      case kFramePathChallenge: {
        PathChallengeFrame f;
        if (!r.fill(f.data.data(), 8)) return std::nullopt;
        out.emplace_back(f);
        break;
      }
      case kFramePathResponse: {
        PathResponseFrame f;
        if (!r.fill(f.data.data(), 8)) return std::nullopt;
        out.emplace_back(f);
        break;
      }
      case kFrameHandshakeDone:
        out.emplace_back(HandshakeDoneFrame{});
        break;
      case kFrameNewConnectionId: {
        NewConnectionIdFrame f;
        f.seq = r.u64();
        if (!r.fill(f.cid.bytes.data(), kCidLen)) return std::nullopt;
        out.emplace_back(f);
        break;
      }
      default:
        return std::nullopt;
    }
    if (!r.ok()) return std::nullopt;
  }
  if (!r.done() || out.empty()) return std::nullopt;
  return out;
}

}  // namespace

Bytes encode_packet(const Packet& p, ByteSpan keystream) {
  if (p.frames.empty()) throw std::invalid_argument("packet payload empty");
  if (p.form == HeaderForm::LONG && p.version != 1)
    throw std::invalid_argument("version must be 1");
  Bytes payload = serialize_frames(p.frames);
  if (keystream.size() < payload.size())
    throw std::invalid_argument("keystream shorter than payload");
  size_t header_len =
      p.form == HeaderForm::LONG ? kLongHeaderLen : kShortHeaderLen;
  if (header_len + payload.size() > kMaxEncodedPacket)
    throw std::length_error("encoded packet exceeds 1250 bytes");
  xor_keystream(payload, keystream);

  ByteWriter w;
  if (p.form == HeaderForm::LONG) {
    w.u8(kFormLongBit | uint8_t(p.long_type));
    w.u32(p.version);
    w.raw(p.dcid.bytes.data(), kCidLen);
    w.raw(p.scid.bytes.data(), kCidLen);
  } else {
    w.u8(kFormShortByte);
    w.raw(p.dcid.bytes.data(), kCidLen);
  }
  w.u64(p.packet_number);
  w.u16(uint16_t(payload.size()));
  w.raw(payload);
  return w.take();
}

std::optional<PacketHeader> parse_packet_header(ByteSpan bytes) {
  if (bytes.empty() || bytes.size() > kMaxEncodedPacket) return std::nullopt;
  ByteReader r(bytes);
  PacketHeader h;
  uint8_t form = r.u8();
  if (form & kFormLongBit) {
    uint8_t type = form & 0x7f;
    if (type > 1) return std::nullopt;
    h.form = HeaderForm::LONG;
    h.long_type = LongType(type);
    h.version = r.u32();
    if (h.version != 1) return std::nullopt;
    r.fill(h.dcid.bytes.data(), kCidLen);
    r.fill(h.scid.bytes.data(), kCidLen);
    h.header_len = kLongHeaderLen;
  } else if (form == kFormShortByte) {
    h.form = HeaderForm::SHORT;
    r.fill(h.dcid.bytes.data(), kCidLen);
    h.header_len = kShortHeaderLen;
  } else {
    return std::nullopt;
  }
  h.packet_number = r.u64();
  h.payload_len = r.u16();
  if (!r.ok() || r.remaining() != h.payload_len) return std::nullopt;
  return h;
}

Packet DecodedPacket::to_packet() const {
  Packet p;
  p.form = header.form;
  p.long_type = header.long_type;
  p.version = header.version;
  p.dcid = header.dcid;
  p.scid = header.scid;
  p.packet_number = header.packet_number;
  p.frames = *frames;
  return p;
}

std::optional<DecodedPacket> decode_packet(ByteSpan bytes, ByteSpan keystream) {
  auto h = parse_packet_header(bytes);
  if (!h) return std::nullopt;
  DecodedPacket d;
  d.header = *h;
  if (keystream.size() < h->payload_len) return d;  // header-only view
  Bytes payload(bytes.begin() + h->header_len, bytes.end());
  xor_keystream(payload, keystream);
  d.frames = parse_frames(payload);
  return d;
}

// ---- handshake messages ----

namespace {
constexpr uint8_t kMsgClientHello = 0x01;
constexpr uint8_t kMsgServerHello = 0x02;
constexpr uint8_t kMsgFinished = 0x03;
}  // namespace

Bytes encode_handshake(const HandshakeMessage& m) {
  ByteWriter w;
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, ClientHello>) {
          if (!hostname_ok(msg.sni))
            throw std::invalid_argument("sni must be nonempty ASCII <= 253");
          w.u8(kMsgClientHello);
          w.u16(uint16_t(msg.sni.size()));
          w.raw(msg.sni.data(), msg.sni.size());
          w.raw(msg.client_random.data(), 8);
          w.u64(msg.client_dh_pub);
          w.u8(msg.disable_active_migration ? 1 : 0);
        } else if constexpr (std::is_same_v<T, ServerHello>) {
          w.u8(kMsgServerHello);
          w.raw(msg.server_random.data(), 8);
          w.u64(msg.server_dh_pub);
        } else if constexpr (std::is_same_v<T, Finished>) {
          w.u8(kMsgFinished);
          w.raw(msg.verify.data(), 8);
        }
      },
      m);
  return w.take();
}

std::optional<HandshakeMessage> decode_handshake(ByteSpan bytes) {
  ByteReader r(bytes);
  uint8_t tag = r.u8();
  switch (tag) {
    case kMsgClientHello: {
      ClientHello m;
      uint16_t len = r.u16();
      if (len == 0 || len > kMaxHostname) return std::nullopt;
      Bytes sni = r.bytes(len);
      m.sni.assign(sni.begin(), sni.end());
      if (!hostname_ok(m.sni)) return std::nullopt;
      r.fill(m.client_random.data(), 8);
      m.client_dh_pub = r.u64();
      uint8_t flag = r.u8();
      if (flag > 1) return std::nullopt;
      m.disable_active_migration = flag == 1;
      if (!r.done()) return std::nullopt;
      return m;
    }
    case kMsgServerHello: {
      ServerHello m;
      r.fill(m.server_random.data(), 8);
      m.server_dh_pub = r.u64();
      if (!r.done()) return std::nullopt;
      return m;
    }
    case kMsgFinished: {
      Finished m;
      r.fill(m.verify.data(), 8);
      if (!r.done()) return std::nullopt;
      return m;
    }
    default:
      return std::nullopt;
  }
}

// ---- DNS ----

Bytes encode_dns(const DnsMessage& m) {
  if (!hostname_ok(m.hostname))
    throw std::invalid_argument("hostname must be nonempty ASCII <= 253");
  ByteWriter w;
  w.u8(uint8_t(m.kind));
  w.u16(m.txid);
  w.u16(uint16_t(m.hostname.size()));
  w.raw(m.hostname.data(), m.hostname.size());
  if (m.kind == DnsKind::RESPONSE) w.u32(m.answer_addr);
  return w.take();
}

std::optional<DnsMessage> decode_dns(ByteSpan bytes) {
  ByteReader r(bytes);
  uint8_t kind = r.u8();
  if (kind != uint8_t(DnsKind::QUERY) && kind != uint8_t(DnsKind::RESPONSE))
    return std::nullopt;
  DnsMessage m;
  m.kind = DnsKind(kind);
  m.txid = r.u16();
  uint16_t len = r.u16();
  if (len == 0 || len > kMaxHostname) return std::nullopt;
  Bytes host = r.bytes(len);
  m.hostname.assign(host.begin(), host.end());
  if (!hostname_ok(m.hostname)) return std::nullopt;
  if (m.kind == DnsKind::RESPONSE) m.answer_addr = r.u32();
  if (!r.done()) return std::nullopt;
  return m;
}

// ---- tunnel ----

namespace {
constexpr uint16_t kInnerMagic = 0x6e64;
}

Bytes encode_inner(const InnerDatagram& d) {
  ByteWriter w;
  w.u16(kInnerMagic);
  w.u32(d.src);
  w.u32(d.dst);
  w.raw(d.payload);
  return w.take();
}

std::optional<InnerDatagram> decode_inner(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u16() != kInnerMagic) return std::nullopt;
  InnerDatagram d;
  d.src = r.u32();
  d.dst = r.u32();
  if (!r.ok() || d.src == 0 || d.dst == 0) return std::nullopt;
  d.payload = r.bytes(r.remaining());
  return d;
}

Bytes encode_tunnel(const TunnelDatagram& td) {
  ByteWriter w;
  w.u16(kTunnelMagic);
  w.u64(td.nonce);
  w.u16(uint16_t(td.opaque.size()));
  w.raw(td.opaque);
  return w.take();
}

std::optional<TunnelDatagram> decode_tunnel(ByteSpan bytes) {
  ByteReader r(bytes);
  if (r.u16() != kTunnelMagic) return std::nullopt;
  TunnelDatagram td;
  td.nonce = r.u64();
  uint16_t len = r.u16();
  if (!r.ok() || r.remaining() != len) return std::nullopt;
  td.opaque = r.bytes(len);
  return td;
}

TunnelDatagram tunnel_encap(ByteSpan inner, const TunnelKey& key,
                            uint64_t nonce, Addr proxy_addr) {
  TunnelDatagram td;
  td.proxy_addr = proxy_addr;
  td.nonce = nonce;
  td.opaque.assign(inner.begin(), inner.end());
  Bytes ks = tunnel_keystream(key, nonce, td.opaque.size());
  xor_keystream(td.opaque, ks);
  return td;
}

Bytes tunnel_decap(const TunnelDatagram& td, const TunnelKey& key) {
  Bytes out = td.opaque;
  Bytes ks = tunnel_keystream(key, td.nonce, out.size());
  xor_keystream(out, ks);
  return out;
}

// ---- keystreams ----

Bytes initial_keystream(const ConnectionId& dcid, size_t len) {
  static const char* label = "quicstep-lab-initial-v1";
  ByteWriter w;
  w.raw(label, std::strlen(label));
  w.raw(dcid.bytes.data(), kCidLen);
  return hash_keystream(w.peek(), len);
}

Bytes session_keystream(uint64_t shared, const std::array<uint8_t, 8>& client_random,
                        const std::array<uint8_t, 8>& server_random,
                        Direction dir, uint64_t packet_number, size_t len) {
  static const char* label = "qs-session-v1";
  ByteWriter w;
  w.raw(label, std::strlen(label));
  w.u64(shared);
  w.raw(client_random.data(), 8);
  w.raw(server_random.data(), 8);
  w.u8(uint8_t(dir));
  w.u64(packet_number);
  return hash_keystream(w.peek(), len);
}

Bytes tunnel_keystream(const TunnelKey& key, uint64_t nonce, size_t len) {
  ByteWriter w;
  w.raw(key.data(), key.size());
  w.u64(nonce);
  return hash_keystream(w.peek(), len);
}

// ---- summaries ----

WireSummary summarize(ByteSpan bytes) {
  WireSummary s;
  if (auto h = parse_packet_header(bytes)) {
    s.kind = h->form == HeaderForm::LONG ? WireSummary::Kind::LONG
                                         : WireSummary::Kind::SHORT;
    s.long_type = h->long_type;
    s.dcid = h->dcid;
    if (h->form == HeaderForm::LONG) s.scid = h->scid;
    s.packet_number = h->packet_number;
    return s;
  }
  if (decode_tunnel(bytes)) {
    s.kind = WireSummary::Kind::TUNNEL;
    return s;
  }
  if (decode_dns(bytes)) {
    s.kind = WireSummary::Kind::DNS;
    return s;
  }
  return s;
}

const char* to_string(WireSummary::Kind k) {
  switch (k) {
    case WireSummary::Kind::LONG: return "LONG";
    case WireSummary::Kind::SHORT: return "SHORT";
    case WireSummary::Kind::TUNNEL: return "TUNNEL";
    case WireSummary::Kind::DNS: return "DNS";
    case WireSummary::Kind::OTHER: return "OTHER";
  }
  return "?";
}

const char* to_string(LongType t) {
  return t == LongType::INITIAL ? "INITIAL" : "HANDSHAKE";
}

}  // namespace qsl
