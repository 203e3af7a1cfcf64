#include "itrace/service/dns_message.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::service::dns {

namespace {

struct Writer {
  std::vector<std::uint8_t> out;
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v >> 16));
    u16(static_cast<std::uint16_t>(v));
  }
  void name(const std::string& n) {
    std::size_t start = 0;
    while (start < n.size()) {
      auto dot = n.find('.', start);
      if (dot == std::string::npos) dot = n.size();
      const std::size_t len = dot - start;
      if (len == 0 || len > 63) throw ValidationError(fmt::format("bad DNS label in '{}'", n));
      u8(static_cast<std::uint8_t>(len));
      out.insert(out.end(), n.begin() + static_cast<std::ptrdiff_t>(start),
                 n.begin() + static_cast<std::ptrdiff_t>(dot));
      start = dot + 1;
    }
    u8(0);
  }
};

void write_record(Writer& w, const Record& r) {
  w.name(r.name);
  w.u16(r.type);
  w.u16(static_cast<std::uint16_t>(kClassIn | (r.cache_flush ? 0x8000 : 0)));
  w.u32(r.ttl);
  Writer rd;
  switch (r.type) {
    case PTR: rd.name(r.target); break;
    case SRV:
      rd.u16(r.priority);
      rd.u16(r.weight);
      rd.u16(r.port);
      rd.name(r.target);
      break;
    case TXT:
      if (r.txt.empty()) rd.u8(0);
      for (const auto& s : r.txt) {
        if (s.size() > 255) throw ValidationError("TXT string longer than 255 bytes");
        rd.u8(static_cast<std::uint8_t>(s.size()));
        rd.out.insert(rd.out.end(), s.begin(), s.end());
      }
      break;
    case A: rd.out.assign(r.address.begin(), r.address.end()); break;
    default: rd.out = r.raw; break;
  }
  w.u16(static_cast<std::uint16_t>(rd.out.size()));
  w.out.insert(w.out.end(), rd.out.begin(), rd.out.end());
}

struct Reader {
  const std::vector<std::uint8_t>& in;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > in.size()) throw ParseError(fmt::format("DNS packet truncated at byte {}", pos));
  }
  std::uint8_t u8() {
    need(1);
    return in[pos++];
  }
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>((in[pos] << 8) | in[pos + 1]);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    const std::uint32_t hi = u16();
    return (hi << 16) | u16();
  }

  std::string name_at(std::size_t& at, int depth = 0) const {
    if (depth > 16) throw ParseError("DNS compression loop");
    std::string out;
    for (;;) {
      if (at >= in.size()) throw ParseError(fmt::format("DNS name runs past end at byte {}", at));
      const std::uint8_t len = in[at];
      if (len == 0) {
        ++at;
        break;
      }
      if ((len & 0xC0) == 0xC0) {
        if (at + 1 >= in.size()) throw ParseError("DNS pointer truncated");
        std::size_t target = static_cast<std::size_t>(((len & 0x3F) << 8) | in[at + 1]);
        at += 2;
        if (target >= in.size()) throw ParseError("DNS pointer out of range");
        const std::string rest = name_at(target, depth + 1);
        if (!out.empty() && !rest.empty()) out.push_back('.');
        out += rest;
        return out;
      }
      if ((len & 0xC0) != 0) throw ParseError(fmt::format("bad DNS label type at byte {}", at));
      if (at + 1 + len > in.size()) throw ParseError("DNS label truncated");
      if (!out.empty()) out.push_back('.');
      out.append(reinterpret_cast<const char*>(&in[at + 1]), len);
      at += 1 + static_cast<std::size_t>(len);
    }
    return out;
  }
  std::string name() { return name_at(pos); }

  Record record() {
    Record r;
    r.name = name();
    r.type = u16();
    const std::uint16_t cls = u16();
    r.cache_flush = (cls & 0x8000) != 0;
    r.ttl = u32();
    const std::uint16_t len = u16();
    need(len);
    const std::size_t end = pos + len;
    std::size_t at = pos;
    switch (r.type) {
      case PTR: r.target = name_at(at); break;
      case SRV: {
        Reader sub{in, pos};
        r.priority = sub.u16();
        r.weight = sub.u16();
        r.port = sub.u16();
        r.target = sub.name();
        break;
      }
      case TXT: {
        std::size_t p = pos;
        while (p < end) {
          const std::size_t n = in[p];
          if (p + 1 + n > end) throw ParseError("TXT string overruns record");
          if (n > 0) r.txt.emplace_back(reinterpret_cast<const char*>(&in[p + 1]), n);
          p += 1 + n;
        }
        break;
      }
      case A:
        if (len != 4) throw ParseError("A record with length != 4");
        std::copy_n(in.begin() + static_cast<std::ptrdiff_t>(pos), 4, r.address.begin());
        break;
      default:
        r.raw.assign(in.begin() + static_cast<std::ptrdiff_t>(pos),
                     in.begin() + static_cast<std::ptrdiff_t>(end));
        break;
    }
    pos = end;
    return r;
  }
};

}  // namespace

std::vector<std::uint8_t> encode(const Message& m) {
  Writer w;
  w.u16(m.id);
  w.u16(m.flags);
  w.u16(static_cast<std::uint16_t>(m.questions.size()));
  w.u16(static_cast<std::uint16_t>(m.answers.size()));
  w.u16(static_cast<std::uint16_t>(m.authorities.size()));
  w.u16(static_cast<std::uint16_t>(m.additionals.size()));
  for (const auto& q : m.questions) {
    w.name(q.name);
    w.u16(q.type);
    w.u16(static_cast<std::uint16_t>(kClassIn | (q.unicast_response ? 0x8000 : 0)));
  }
  for (const auto& r : m.answers) write_record(w, r);
  for (const auto& r : m.authorities) write_record(w, r);
  for (const auto& r : m.additionals) write_record(w, r);
  return w.out;
}

Message decode(const std::vector<std::uint8_t>& bytes) {
  Reader rd{bytes};
  Message m;
  m.id = rd.u16();
  m.flags = rd.u16();
  const int qd = rd.u16();
  const int an = rd.u16();
  const int ns = rd.u16();
  const int ar = rd.u16();
  for (int i = 0; i < qd; ++i) {
    Question q;
    q.name = rd.name();
    q.type = rd.u16();
    q.unicast_response = (rd.u16() & 0x8000) != 0;
    m.questions.push_back(std::move(q));
  }
  for (int i = 0; i < an; ++i) m.answers.push_back(rd.record());
  for (int i = 0; i < ns; ++i) m.authorities.push_back(rd.record());
  for (int i = 0; i < ar; ++i) m.additionals.push_back(rd.record());
  return m;
}

bool same_name(const std::string& a, const std::string& b) {
  auto trim = [](const std::string& s) {
    return (!s.empty() && s.back() == '.') ? std::string_view(s).substr(0, s.size() - 1) : std::string_view(s);
  };
  const auto x = trim(a);
  const auto y = trim(b);
  return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(), [](char c, char d) {
           return std::tolower(static_cast<unsigned char>(c)) == std::tolower(static_cast<unsigned char>(d));
         });
}

}  // namespace itrace::service::dns
