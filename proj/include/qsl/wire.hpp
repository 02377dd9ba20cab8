// SPDX-License-Identifier: Apache-2.0
//
// On-wire formats of the miniature QUIC-like protocol.
//
// Byte layout, big-endian throughout:
//   LONG header  = form byte 0x80|type (0x00 INITIAL, 0x01 HANDSHAKE)
//                  || version(4) || dcid(8) || scid(8) || packet_number(8)
//                  || payload_len(2) || protected payload
//   SHORT header = form byte 0x40 || dcid(8) || packet_number(8)
//                  || payload_len(2) || protected payload
//   TunnelDatagram = magic 0x7454 || nonce(8) || length(2) || opaque
//
// Headers are never protected. INITIAL payloads are XORed with a keystream
// any observer can derive from the wire-visible dcid; HANDSHAKE and SHORT
// payloads use a keystream derived from the DH shared secret.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qsl/bytes.hpp"
#include "qsl/crypto.hpp"

namespace qsl {

inline constexpr size_t kCidLen = 8;
inline constexpr size_t kMaxEncodedPacket = 1250;
inline constexpr size_t kMaxStreamData = 1200;

struct ConnectionId {
  std::array<uint8_t, kCidLen> bytes{};

  bool operator==(const ConnectionId&) const = default;
  auto operator<=>(const ConnectionId&) const = default;
  std::string hex() const { return to_hex(bytes); }

  static ConnectionId from(ByteSpan s);
  static ConnectionId random(std::mt19937_64& rng);
};

struct CidHash {
  size_t operator()(const ConnectionId& c) const {
    uint64_t v;
    std::memcpy(&v, c.bytes.data(), 8);
    return std::hash<uint64_t>{}(v);
  }
};

enum class HeaderForm : uint8_t { LONG, SHORT };
enum class LongType : uint8_t { INITIAL = 0x00, HANDSHAKE = 0x01 };

// Frame type bytes are fixed; fixture tests depend on them.
inline constexpr uint8_t kFrameCrypto = 0x06;
inline constexpr uint8_t kFrameStream = 0x08;
inline constexpr uint8_t kFrameAck = 0x02;
inline constexpr uint8_t kFramePathChallenge = 0x1a;
inline constexpr uint8_t kFramePathResponse = 0x1b;
inline constexpr uint8_t kFrameHandshakeDone = 0x1e;
inline constexpr uint8_t kFrameNewConnectionId = 0x18;

struct CryptoFrame {
  uint64_t offset = 0;
  Bytes data;
  bool operator==(const CryptoFrame&) const = default;
};
struct StreamFrame {
  uint64_t stream_id = 0;
  uint64_t offset = 0;
  bool fin = false;
  Bytes data;
  bool operator==(const StreamFrame&) const = default;
};
struct AckFrame {
  uint64_t largest_acked = 0;
  std::vector<uint64_t> acked;
  bool operator==(const AckFrame&) const = default;
};
struct PathChallengeFrame {
  std::array<uint8_t, 8> data{};
  bool operator==(const PathChallengeFrame&) const = default;
};
struct PathResponseFrame {
  std::array<uint8_t, 8> data{};
  bool operator==(const PathResponseFrame&) const = default;
};
struct HandshakeDoneFrame {
  bool operator==(const HandshakeDoneFrame&) const = default;
};
struct NewConnectionIdFrame {
  uint64_t seq = 0;
  ConnectionId cid;
  bool operator==(const NewConnectionIdFrame&) const = default;
};

using Frame = std::variant<CryptoFrame, StreamFrame, AckFrame,
                           PathChallengeFrame, PathResponseFrame,
                           HandshakeDoneFrame, NewConnectionIdFrame>;

struct Packet {
  HeaderForm form = HeaderForm::SHORT;
  LongType long_type = LongType::INITIAL;  // long only
  uint32_t version = 1;                    // long only, fixed 1
  ConnectionId dcid;
  ConnectionId scid;  // long only
  uint64_t packet_number = 0;
  std::vector<Frame> frames;

  bool operator==(const Packet&) const = default;
};

struct PacketHeader {
  HeaderForm form = HeaderForm::SHORT;
  LongType long_type = LongType::INITIAL;
  uint32_t version = 1;
  ConnectionId dcid;
  ConnectionId scid;
  uint64_t packet_number = 0;
  uint16_t payload_len = 0;
  size_t header_len = 0;
};

// Frame payload as it sits under the keystream.
Bytes serialize_frames(const std::vector<Frame>& frames);

// Throws std::invalid_argument for invariant violations (empty payload,
// keystream shorter than the payload) and std::length_error when the
// encoding would exceed kMaxEncodedPacket.
Bytes encode_packet(const Packet& p, ByteSpan keystream);

// Header fields parse without any key; nullopt for malformed headers.
std::optional<PacketHeader> parse_packet_header(ByteSpan bytes);

struct DecodedPacket {
  PacketHeader header;
  // nullopt = undecodable under the given keystream (header-only view).
  std::optional<std::vector<Frame>> frames;

  Packet to_packet() const;  // requires frames
};

std::optional<DecodedPacket> decode_packet(ByteSpan bytes, ByteSpan keystream);

// ---- handshake messages (carried in CRYPTO frames) ----

struct ClientHello {
  std::string sni;  // nonempty ASCII, <= 253 chars
  std::array<uint8_t, 8> client_random{};
  uint64_t client_dh_pub = 0;
  bool disable_active_migration = false;
  bool operator==(const ClientHello&) const = default;
};
struct ServerHello {
  std::array<uint8_t, 8> server_random{};
  uint64_t server_dh_pub = 0;
  bool operator==(const ServerHello&) const = default;
};
struct Finished {
  std::array<uint8_t, 8> verify{};
  bool operator==(const Finished&) const = default;
};

using HandshakeMessage = std::variant<ClientHello, ServerHello, Finished>;

Bytes encode_handshake(const HandshakeMessage& m);
std::optional<HandshakeMessage> decode_handshake(ByteSpan bytes);

// ---- cleartext DNS query/response pair ----

enum class DnsKind : uint8_t { QUERY = 0x01, RESPONSE = 0x02 };

struct DnsMessage {
  DnsKind kind = DnsKind::QUERY;
  uint16_t txid = 0;
  std::string hostname;
  Addr answer_addr = 0;  // RESPONSE only

  bool operator==(const DnsMessage&) const = default;
};

Bytes encode_dns(const DnsMessage& m);
std::optional<DnsMessage> decode_dns(ByteSpan bytes);

// ---- encrypted tunnel ----

using TunnelKey = std::array<uint8_t, 32>;
inline constexpr uint16_t kTunnelMagic = 0x7454;

struct TunnelDatagram {
  Addr proxy_addr = 0;  // outer destination; not part of the byte layout
  uint64_t nonce = 0;
  Bytes opaque;
};

// The datagram carried inside a tunnel. Encoding is private to the tunnel
// endpoints: magic(2) || src(4) || dst(4) || payload.
struct InnerDatagram {
  Addr src = 0;
  Addr dst = 0;
  Bytes payload;
  bool operator==(const InnerDatagram&) const = default;
};

Bytes encode_inner(const InnerDatagram& d);
std::optional<InnerDatagram> decode_inner(ByteSpan bytes);

Bytes encode_tunnel(const TunnelDatagram& td);
std::optional<TunnelDatagram> decode_tunnel(ByteSpan bytes);

TunnelDatagram tunnel_encap(ByteSpan inner, const TunnelKey& key,
                            uint64_t nonce, Addr proxy_addr);
// Plain XOR inversion; whether the result parses is the caller's check.
Bytes tunnel_decap(const TunnelDatagram& td, const TunnelKey& key);

// ---- keystream derivations ----

enum class Direction : uint8_t { CLIENT_TO_SERVER = 0, SERVER_TO_CLIENT = 1 };

// block_i = SHA-256("quicstep-lab-initial-v1" || dcid || be32(i)).
// Derivable by any party that sees dcid on the wire.
Bytes initial_keystream(const ConnectionId& dcid, size_t len);

// block_i = SHA-256("qs-session-v1" || be64(shared) || client_random ||
//                   server_random || direction byte || be64(pn) || be32(i)).
Bytes session_keystream(uint64_t shared, const std::array<uint8_t, 8>& client_random,
                        const std::array<uint8_t, 8>& server_random,
                        Direction dir, uint64_t packet_number, size_t len);

Bytes tunnel_keystream(const TunnelKey& key, uint64_t nonce, size_t len);

// ---- keyless datagram summaries (tracing, censor bookkeeping) ----

struct WireSummary {
  enum class Kind { LONG, SHORT, TUNNEL, DNS, OTHER } kind = Kind::OTHER;
  LongType long_type = LongType::INITIAL;        // kind LONG
  std::optional<ConnectionId> dcid;              // kind LONG/SHORT
  std::optional<ConnectionId> scid;              // kind LONG
  std::optional<uint64_t> packet_number;         // kind LONG/SHORT
};

WireSummary summarize(ByteSpan bytes);

const char* to_string(WireSummary::Kind k);
const char* to_string(LongType t);

}  // namespace qsl
