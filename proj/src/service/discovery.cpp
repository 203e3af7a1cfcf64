#include "itrace/service/discovery.hpp"

#include <algorithm>
#include <cstring>

#include <arpa/inet.h>
#include <ifaddrs.h>
#include <net/if.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <fmt/format.h>

#include "itrace/errors.hpp"

namespace itrace::service {

// ---- InMemoryBus ----------------------------------------------------------

class InMemoryBus::Endpoint : public Transport {
 public:
  explicit Endpoint(InMemoryBus& bus) : bus_(bus) {}
  ~Endpoint() override { bus_.detach(this); }

  void send(const std::vector<std::uint8_t>& packet) override { bus_.post(this, packet); }
  void set_receiver(Receiver receiver) override {
    std::lock_guard lock(mu_);
    receiver_ = std::move(receiver);
  }
  void deliver(const std::vector<std::uint8_t>& packet) {
    std::lock_guard lock(mu_);
    if (receiver_) receiver_(packet);
  }

 private:
  InMemoryBus& bus_;
  std::mutex mu_;
  Receiver receiver_;
};

InMemoryBus::InMemoryBus() : dispatcher_([this] { run(); }) {}

InMemoryBus::~InMemoryBus() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  dispatcher_.join();
}

std::unique_ptr<Transport> InMemoryBus::endpoint() {
  auto ep = std::make_unique<Endpoint>(*this);
  std::lock_guard lock(mu_);
  endpoints_.push_back(ep.get());
  return ep;
}

void InMemoryBus::post(Endpoint* from, std::vector<std::uint8_t> packet) {
  {
    std::lock_guard lock(mu_);
    queue_.emplace_back(from, std::move(packet));
  }
  cv_.notify_all();
}

void InMemoryBus::detach(Endpoint* ep) {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !busy_; });
  endpoints_.erase(std::remove(endpoints_.begin(), endpoints_.end(), ep), endpoints_.end());
  for (auto& item : queue_) {
    if (item.first == ep) item.first = nullptr;
  }
}

void InMemoryBus::drain() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void InMemoryBus::run() {
  std::unique_lock lock(mu_);
  for (;;) {
    cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
    if (queue_.empty()) return;
    auto [from, packet] = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    const auto targets = endpoints_;
    lock.unlock();
    for (Endpoint* ep : targets) {
      if (ep != from) ep->deliver(packet);
    }
    lock.lock();
    busy_ = false;
    cv_.notify_all();
  }
}

// ---- UDP multicast --------------------------------------------------------

namespace {

constexpr const char* kMdnsGroup = "224.0.0.251";
constexpr int kMdnsPort = 5353;

}  // namespace

UdpMulticastTransport::UdpMulticastTransport() {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) throw Error(fmt::format("mDNS socket: {}", std::strerror(errno)));
  auto fail = [&](const char* what) {
    const std::string msg = fmt::format("mDNS {}: {}", what, std::strerror(errno));
    ::close(fd_);
    fd_ = -1;
    throw Error(msg);
  };
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
#ifdef SO_REUSEPORT
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEPORT, &one, sizeof one);
#endif
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(kMdnsPort);
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) fail("bind");
  ip_mreq mreq{};
  ::inet_pton(AF_INET, kMdnsGroup, &mreq.imr_multiaddr);
  mreq.imr_interface.s_addr = htonl(INADDR_ANY);
  if (::setsockopt(fd_, IPPROTO_IP, IP_ADD_MEMBERSHIP, &mreq, sizeof mreq) < 0) fail("join group");
  unsigned char ttl = 255;
  ::setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_TTL, &ttl, sizeof ttl);
  unsigned char loop = 1;
  ::setsockopt(fd_, IPPROTO_IP, IP_MULTICAST_LOOP, &loop, sizeof loop);
  thread_ = std::thread([this] { receive_loop(); });
}

UdpMulticastTransport::~UdpMulticastTransport() {
  stopping_ = true;
  if (thread_.joinable()) thread_.join();
  if (fd_ >= 0) ::close(fd_);
}

void UdpMulticastTransport::send(const std::vector<std::uint8_t>& packet) {
  sockaddr_in to{};
  to.sin_family = AF_INET;
  to.sin_port = htons(kMdnsPort);
  ::inet_pton(AF_INET, kMdnsGroup, &to.sin_addr);
  ::sendto(fd_, packet.data(), packet.size(), 0, reinterpret_cast<sockaddr*>(&to), sizeof to);
}

void UdpMulticastTransport::set_receiver(Receiver receiver) {
  std::lock_guard lock(mu_);
  receiver_ = std::move(receiver);
}

void UdpMulticastTransport::receive_loop() {
  std::vector<std::uint8_t> buf(9000);
  while (!stopping_) {
    pollfd p{fd_, POLLIN, 0};
    if (::poll(&p, 1, 200) <= 0) continue;
    const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
    if (n <= 0) continue;
    std::vector<std::uint8_t> packet(buf.begin(), buf.begin() + n);
    std::lock_guard lock(mu_);
    if (receiver_) receiver_(packet);
  }
}

ServiceInfo local_service_info(const std::string& instance, std::uint16_t port) {
  ServiceInfo info;
  info.instance = instance;
  info.port = port;
  char name[256] = {0};
  if (::gethostname(name, sizeof name - 1) == 0 && name[0] != '\0') {
    std::string host = name;
    if (auto dot = host.find('.'); dot != std::string::npos) host.resize(dot);
    info.host = host + ".local";
  }
  ifaddrs* list = nullptr;
  if (::getifaddrs(&list) == 0) {
    for (ifaddrs* it = list; it != nullptr; it = it->ifa_next) {
      if (it->ifa_addr == nullptr || it->ifa_addr->sa_family != AF_INET) continue;
      if ((it->ifa_flags & IFF_LOOPBACK) != 0) continue;
      const auto* sin = reinterpret_cast<const sockaddr_in*>(it->ifa_addr);
      std::memcpy(info.address.data(), &sin->sin_addr, 4);
      break;
    }
    ::freeifaddrs(list);
  }
  return info;
}

// ---- Advertiser -----------------------------------------------------------

ServiceAdvertiser::ServiceAdvertiser(Transport& transport, ServiceInfo info, AdvertiserOptions options)
    : transport_(transport), options_(options), info_(std::move(info)), base_instance_(info_.instance) {
  transport_.set_receiver([this](const std::vector<std::uint8_t>& p) { on_packet(p); });
}

ServiceAdvertiser::~ServiceAdvertiser() {
  stop();
  transport_.set_receiver({});
}

std::string ServiceAdvertiser::instance() const {
  std::lock_guard lock(mu_);
  return info_.instance;
}

std::string ServiceAdvertiser::full_name() const {
  std::lock_guard lock(mu_);
  return info_.instance + "." + kServiceType;
}

std::vector<dns::Record> ServiceAdvertiser::records(std::uint32_t ttl) const {
  const std::string full = info_.instance + "." + kServiceType;
  dns::Record ptr;
  ptr.name = kServiceType;
  ptr.type = dns::PTR;
  ptr.ttl = ttl;
  ptr.target = full;
  dns::Record srv;
  srv.name = full;
  srv.type = dns::SRV;
  srv.cache_flush = true;
  srv.ttl = ttl;
  srv.target = info_.host;
  srv.port = info_.port;
  dns::Record txt;
  txt.name = full;
  txt.type = dns::TXT;
  txt.cache_flush = true;
  txt.ttl = ttl;
  txt.txt = info_.txt;
  dns::Record a;
  a.name = info_.host;
  a.type = dns::A;
  a.cache_flush = true;
  a.ttl = ttl;
  a.address = info_.address;
  return {ptr, srv, txt, a};
}

bool ServiceAdvertiser::conflicts(const dns::Record& r) const {
  if (!dns::same_name(r.name, info_.instance + "." + kServiceType)) return false;
  // Identical data is our own echo (or a cache), not a rival.
  if (r.type == dns::SRV) return r.port != info_.port || !dns::same_name(r.target, info_.host);
  if (r.type == dns::TXT) return r.txt != info_.txt;
  return false;
}

void ServiceAdvertiser::start() {
  std::unique_lock lock(mu_);
  if (announced_) return;
  probing_ = true;
  for (;;) {
    conflict_ = false;
    const auto recs = records(options_.ttl);
    dns::Message probe;
    probe.questions.push_back({info_.instance + "." + kServiceType, dns::ANY, true});
    probe.authorities = {recs[1], recs[2]};
    for (int i = 0; i < options_.probes && !conflict_; ++i) {
      transport_.send(dns::encode(probe));
      cv_.wait_for(lock, options_.probe_interval, [&] { return conflict_; });
    }
    if (!conflict_) break;
    info_.instance = fmt::format("{}-{}", base_instance_, ++suffix_);
  }
  probing_ = false;
  announced_ = true;
  dns::Message announce;
  announce.flags = dns::kFlagResponse;
  announce.answers = records(options_.ttl);
  transport_.send(dns::encode(announce));
}

void ServiceAdvertiser::stop() {
  std::lock_guard lock(mu_);
  if (!announced_) return;
  announced_ = false;
  dns::Message goodbye;
  goodbye.flags = dns::kFlagResponse;
  goodbye.answers = records(0);
  transport_.send(dns::encode(goodbye));
}

void ServiceAdvertiser::on_packet(const std::vector<std::uint8_t>& packet) {
  dns::Message msg;
  try {
    msg = dns::decode(packet);
  } catch (const ParseError&) {
    return;
  }
  std::lock_guard lock(mu_);
  if (probing_ && msg.is_response()) {
    for (const auto* section : {&msg.answers, &msg.additionals}) {
      for (const auto& r : *section) {
        if (conflicts(r)) conflict_ = true;
      }
    }
    if (conflict_) cv_.notify_all();
    return;
  }
  if (!announced_ || msg.is_response()) return;

  const auto recs = records(options_.ttl);
  const std::string full = info_.instance + "." + kServiceType;
  dns::Message reply;
  reply.flags = dns::kFlagResponse;
  auto add = [](std::vector<dns::Record>& to, const dns::Record& r) {
    if (std::find(to.begin(), to.end(), r) == to.end()) to.push_back(r);
  };
  for (const auto& q : msg.questions) {
    const bool any = q.type == dns::ANY;
    if (dns::same_name(q.name, kServiceType) && (any || q.type == dns::PTR)) {
      add(reply.answers, recs[0]);
      add(reply.additionals, recs[1]);
      add(reply.additionals, recs[2]);
      add(reply.additionals, recs[3]);
    }
    if (dns::same_name(q.name, full)) {
      if (any || q.type == dns::SRV) add(reply.answers, recs[1]);
      if (any || q.type == dns::TXT) add(reply.answers, recs[2]);
      add(reply.additionals, recs[3]);
    }
    if (dns::same_name(q.name, info_.host) && (any || q.type == dns::A)) add(reply.answers, recs[3]);
  }
  if (reply.answers.empty()) return;
  // Additionals already present as answers are redundant.
  std::erase_if(reply.additionals, [&](const dns::Record& r) {
    return std::find(reply.answers.begin(), reply.answers.end(), r) != reply.answers.end();
  });
  transport_.send(dns::encode(reply));
}

// ---- Browser --------------------------------------------------------------

ServiceBrowser::ServiceBrowser(Transport& transport) : transport_(transport) {
  transport_.set_receiver([this](const std::vector<std::uint8_t>& p) { on_packet(p); });
}

ServiceBrowser::~ServiceBrowser() { transport_.set_receiver({}); }

void ServiceBrowser::query() {
  dns::Message q;
  q.questions.push_back({kServiceType, dns::PTR, false});
  transport_.send(dns::encode(q));
}

std::vector<DiscoveredService> ServiceBrowser::services_locked() const {
  std::vector<DiscoveredService> out;
  for (const auto& [_, s] : by_name_) {
    DiscoveredService copy = s;
    if (auto it = hosts_.find(s.host); it != hosts_.end()) copy.address = it->second;
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<DiscoveredService> ServiceBrowser::services() const {
  std::lock_guard lock(mu_);
  return services_locked();
}

bool ServiceBrowser::wait_until(const std::function<bool(const std::vector<DiscoveredService>&)>& pred,
                                std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] { return pred(services_locked()); });
}

void ServiceBrowser::on_packet(const std::vector<std::uint8_t>& packet) {
  dns::Message msg;
  try {
    msg = dns::decode(packet);
  } catch (const ParseError&) {
    return;
  }
  if (!msg.is_response()) return;
  std::vector<dns::Record> all = msg.answers;
  all.insert(all.end(), msg.additionals.begin(), msg.additionals.end());
  std::lock_guard lock(mu_);
  for (const auto& r : all) {
    if (r.type != dns::PTR || !dns::same_name(r.name, kServiceType)) continue;
    if (r.ttl == 0) {
      by_name_.erase(r.target);
      continue;
    }
    auto& s = by_name_[r.target];
    s.instance = r.target.substr(0, r.target.find('.'));
  }
  for (const auto& r : all) {
    if (r.type == dns::A) {
      if (r.ttl == 0) {
        hosts_.erase(r.name);
      } else {
        hosts_[r.name] = r.address;
      }
      continue;
    }
    auto it = by_name_.find(r.name);
    if (it == by_name_.end()) continue;
    if (r.type == dns::SRV) {
      if (r.ttl == 0) {
        by_name_.erase(it);
        continue;
      }
      it->second.host = r.target;
      it->second.port = r.port;
    } else if (r.type == dns::TXT && r.ttl != 0) {
      it->second.txt = r.txt;
    }
  }
  cv_.notify_all();
}

}  // namespace itrace::service
