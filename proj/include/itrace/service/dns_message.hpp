#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace itrace::service::dns {

enum Type : std::uint16_t { A = 1, PTR = 12, TXT = 16, SRV = 33, ANY = 255 };
inline constexpr std::uint16_t kClassIn = 1;
inline constexpr std::uint16_t kFlagResponse = 0x8400;  // QR + AA

struct Question {
  std::string name;
  std::uint16_t type = PTR;
  bool unicast_response = false;
  bool operator==(const Question&) const = default;
};

/// One resource record. Which payload fields matter depends on `type`:
/// PTR uses target; SRV uses target, priority, weight, port; TXT uses txt;
/// A uses address. Unknown types keep their raw bytes.
struct Record {
  std::string name;
  std::uint16_t type = A;
  bool cache_flush = false;
  std::uint32_t ttl = 120;
  std::string target;
  std::uint16_t priority = 0;
  std::uint16_t weight = 0;
  std::uint16_t port = 0;
  std::vector<std::string> txt;
  std::array<std::uint8_t, 4> address{};
  std::vector<std::uint8_t> raw;
  bool operator==(const Record&) const = default;
};

struct Message {
  std::uint16_t id = 0;
  std::uint16_t flags = 0;
  std::vector<Question> questions;
  std::vector<Record> answers;
  std::vector<Record> authorities;
  std::vector<Record> additionals;

  bool is_response() const { return (flags & 0x8000) != 0; }
  bool operator==(const Message&) const = default;
};

/// Names are written uncompressed; decoding follows compression pointers.
std::vector<std::uint8_t> encode(const Message& m);
/// Throws ParseError on truncated or malformed packets.
Message decode(const std::vector<std::uint8_t>& bytes);

/// Case-insensitive DNS name comparison, ignoring a trailing dot.
bool same_name(const std::string& a, const std::string& b);

}  // namespace itrace::service::dns
