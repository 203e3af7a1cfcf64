#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "itrace/service/dns_message.hpp"

namespace itrace::service {

inline constexpr const char* kServiceType = "_itrace._tcp.local";

/// Datagram link carrying mDNS packets.
class Transport {
 public:
  using Receiver = std::function<void(const std::vector<std::uint8_t>&)>;
  virtual ~Transport() = default;
  virtual void send(const std::vector<std::uint8_t>& packet) = 0;
  virtual void set_receiver(Receiver receiver) = 0;
};

/// In-process broadcast domain for tests. Delivery is asynchronous on a
/// dispatcher thread and never loops back to the sender.
class InMemoryBus {
 public:
  InMemoryBus();
  ~InMemoryBus();
  std::unique_ptr<Transport> endpoint();
  /// Blocks until every packet sent so far has been delivered.
  void drain();

 private:
  class Endpoint;
  void post(Endpoint* from, std::vector<std::uint8_t> packet);
  void detach(Endpoint* ep);
  void run();

  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<Endpoint*> endpoints_;
  std::deque<std::pair<Endpoint*, std::vector<std::uint8_t>>> queue_;
  bool busy_ = false;
  bool stopping_ = false;
  std::thread dispatcher_;
};

/// 224.0.0.251:5353. Throws Error when the socket cannot be set up.
class UdpMulticastTransport : public Transport {
 public:
  UdpMulticastTransport();
  ~UdpMulticastTransport() override;
  void send(const std::vector<std::uint8_t>& packet) override;
  void set_receiver(Receiver receiver) override;

 private:
  void receive_loop();

  int fd_ = -1;
  std::mutex mu_;
  Receiver receiver_;
  std::atomic<bool> stopping_{false};
  std::thread thread_;
};

struct ServiceInfo {
  std::string instance = "itrace";  // single DNS label
  std::string host = "itrace.local";
  std::array<std::uint8_t, 4> address{127, 0, 0, 1};
  std::uint16_t port = 0;
  std::vector<std::string> txt = {"api=1"};
};

/// Host name "<hostname>.local" and the first non-loopback IPv4 address.
ServiceInfo local_service_info(const std::string& instance, std::uint16_t port);

struct AdvertiserOptions {
  std::chrono::milliseconds probe_interval{250};
  int probes = 3;
  std::uint32_t ttl = 120;
};

/// DNS-SD responder for one service instance: probes for its name, renames
/// to "<base>-2", "<base>-3", ... while another host owns it, announces,
/// answers queries, and sends a goodbye on stop.
class ServiceAdvertiser {
 public:
  ServiceAdvertiser(Transport& transport, ServiceInfo info, AdvertiserOptions options = {});
  ~ServiceAdvertiser();

  /// Probes then announces. Blocks for the probe window.
  void start();
  void stop();

  std::string instance() const;
  std::string full_name() const;

 private:
  void on_packet(const std::vector<std::uint8_t>& packet);
  std::vector<dns::Record> records(std::uint32_t ttl) const;
  bool conflicts(const dns::Record& r) const;

  Transport& transport_;
  AdvertiserOptions options_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  ServiceInfo info_;
  std::string base_instance_;
  int suffix_ = 1;
  bool probing_ = false;
  bool announced_ = false;
  bool conflict_ = false;
};

struct DiscoveredService {
  std::string instance;
  std::string host;
  std::uint16_t port = 0;
  std::vector<std::string> txt;
  std::array<std::uint8_t, 4> address{};
};

/// Collects advertisements for kServiceType; goodbyes remove entries.
class ServiceBrowser {
 public:
  explicit ServiceBrowser(Transport& transport);
  ~ServiceBrowser();
  ServiceBrowser(const ServiceBrowser&) = delete;
  ServiceBrowser& operator=(const ServiceBrowser&) = delete;
  void query();
  std::vector<DiscoveredService> services() const;
  /// Waits until `pred(services())` holds or the timeout passes.
  bool wait_until(const std::function<bool(const std::vector<DiscoveredService>&)>& pred,
                  std::chrono::milliseconds timeout) const;

 private:
  void on_packet(const std::vector<std::uint8_t>& packet);
  std::vector<DiscoveredService> services_locked() const;

  Transport& transport_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<std::string, DiscoveredService> by_name_;  // keyed by full instance name
  std::map<std::string, std::array<std::uint8_t, 4>> hosts_;
};

}  // namespace itrace::service
