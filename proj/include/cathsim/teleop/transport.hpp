#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cathsim::teleop {

inline constexpr std::uint16_t kDefaultFollowerPort = 47001;

struct PeerAddress
{
    std::uint32_t ipv4 = 0x7F000001; // host byte order
    std::uint16_t port = 0;

    std::string str() const;
    auto operator<=>(const PeerAddress &) const = default;
};

// Parses "a.b.c.d:port" or a bare dotted address (port 0). Throws LinkError.
PeerAddress parse_peer(const std::string &text, std::uint16_t default_port = 0);

struct Datagram
{
    std::vector<std::uint8_t> bytes;
    PeerAddress from;
};

class DatagramChannel
{
public:
    virtual ~DatagramChannel() = default;

    virtual void send_to(std::span<const std::uint8_t> bytes, const PeerAddress &to) = 0;
    // Waits up to `timeout`; empty on timeout.
    virtual std::optional<Datagram> receive(std::chrono::microseconds timeout) = 0;
    virtual PeerAddress local_address() const = 0;
};

// Datagram socket. Port 0 binds an ephemeral port. Throws LinkError when
// the port is in use or the socket cannot be created.
class UdpChannel final : public DatagramChannel
{
public:
    UdpChannel(const std::string &host, std::uint16_t port);
    ~UdpChannel() override;
    UdpChannel(const UdpChannel &) = delete;
    UdpChannel &operator=(const UdpChannel &) = delete;

    void send_to(std::span<const std::uint8_t> bytes, const PeerAddress &to) override;
    std::optional<Datagram> receive(std::chrono::microseconds timeout) override;
    PeerAddress local_address() const override { return local_; }

private:
    int fd_ = -1;
    PeerAddress local_;
};

// Impairment applied to one direction of a simulated link.
struct LinkImpairment
{
    double delay_ms = 0.0;
    double jitter_ms = 0.0; // uniform in [-jitter, +jitter], delay floored at 0
    double loss = 0.0;      // drop probability per datagram
    std::uint64_t seed = 1;
};

// Two in-process endpoints joined by delay/jitter/loss queues. Loss and
// jitter draws come from per-direction seeded generators, so a fixed send
// sequence always sees the same drops. Endpoint addresses are
// 127.0.0.1:1 (first) and 127.0.0.1:2 (second).
std::pair<std::unique_ptr<DatagramChannel>, std::unique_ptr<DatagramChannel>>
make_simulated_link(const LinkImpairment &first_to_second = {}, const LinkImpairment &second_to_first = {});

} // namespace cathsim::teleop
