#include "cathsim/teleop/transport.hpp"

#include "cathsim/errors.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <netinet/in.h>
#include <poll.h>
#include <queue>
#include <random>
#include <sys/socket.h>
#include <unistd.h>

namespace cathsim::teleop {

std::string PeerAddress::str() const
{
    return std::to_string((ipv4 >> 24) & 0xFF) + "." + std::to_string((ipv4 >> 16) & 0xFF) + "." +
           std::to_string((ipv4 >> 8) & 0xFF) + "." + std::to_string(ipv4 & 0xFF) + ":" + std::to_string(port);
}

PeerAddress parse_peer(const std::string &text, std::uint16_t default_port)
{
    std::string host = text;
    PeerAddress out;
    out.port = default_port;
    if (const auto colon = text.rfind(':'); colon != std::string::npos) {
        host = text.substr(0, colon);
        try {
            const int p = std::stoi(text.substr(colon + 1));
            if (p < 0 || p > 65535) {
                throw LinkError("bad port in '" + text + "'");
            }
            out.port = static_cast<std::uint16_t>(p);
        } catch (const std::logic_error &) {
            throw LinkError("bad port in '" + text + "'");
        }
    }
    if (host == "localhost") {
        host = "127.0.0.1";
    }
    in_addr a{};
    if (inet_pton(AF_INET, host.c_str(), &a) != 1) {
        throw LinkError("bad IPv4 address '" + host + "'");
    }
    out.ipv4 = ntohl(a.s_addr);
    return out;
}

namespace {

sockaddr_in to_sockaddr(const PeerAddress &p)
{
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(p.port);
    sa.sin_addr.s_addr = htonl(p.ipv4);
    return sa;
}

} // namespace

UdpChannel::UdpChannel(const std::string &host, std::uint16_t port)
{
    PeerAddress bind_to = parse_peer(host, port);
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
        throw LinkError(std::string("socket: ") + std::strerror(errno));
    }
    sockaddr_in sa = to_sockaddr(bind_to);
    if (::bind(fd_, reinterpret_cast<sockaddr *>(&sa), sizeof sa) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        throw LinkError("bind " + bind_to.str() + ": " + std::strerror(err));
    }
    socklen_t len = sizeof sa;
    ::getsockname(fd_, reinterpret_cast<sockaddr *>(&sa), &len);
    local_.ipv4 = ntohl(sa.sin_addr.s_addr);
    local_.port = ntohs(sa.sin_port);
}

UdpChannel::~UdpChannel()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void UdpChannel::send_to(std::span<const std::uint8_t> bytes, const PeerAddress &to)
{
    sockaddr_in sa = to_sockaddr(to);
    const ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<sockaddr *>(&sa), sizeof sa);
    if (n < 0 && errno != ECONNREFUSED) {
        throw LinkError(std::string("sendto: ") + std::strerror(errno));
    }
}

std::optional<Datagram> UdpChannel::receive(std::chrono::microseconds timeout)
{
    pollfd p{fd_, POLLIN, 0};
    const int ms = static_cast<int>((timeout.count() + 999) / 1000);
    const int ready = ::poll(&p, 1, ms);
    if (ready <= 0) {
        return std::nullopt;
    }
    std::uint8_t buf[2048];
    sockaddr_in sa{};
    socklen_t len = sizeof sa;
    const ssize_t n = ::recvfrom(fd_, buf, sizeof buf, 0, reinterpret_cast<sockaddr *>(&sa), &len);
    if (n < 0) {
        return std::nullopt;
    }
    Datagram d;
    d.bytes.assign(buf, buf + n);
    d.from.ipv4 = ntohl(sa.sin_addr.s_addr);
    d.from.port = ntohs(sa.sin_port);
    return d;
}

// ---- simulated link ----

namespace {

using Clock = std::chrono::steady_clock;

struct Pending
{
    Clock::time_point due;
    std::uint64_t order;
    Datagram datagram;

    bool operator>(const Pending &o) const { return due != o.due ? due > o.due : order > o.order; }
};

struct Direction
{
    LinkImpairment impairment;
    std::mt19937_64 rng;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::uint64_t order = 0;
};

struct SharedLink
{
    std::mutex mu;
    std::condition_variable cv;
    Direction dir[2]; // dir[i] delivers to endpoint i
};

class SimEndpoint final : public DatagramChannel
{
public:
    SimEndpoint(std::shared_ptr<SharedLink> link, int self) : link_(std::move(link)), self_(self) {}

    void send_to(std::span<const std::uint8_t> bytes, const PeerAddress &) override
    {
        std::lock_guard lock(link_->mu);
        Direction &d = link_->dir[1 - self_];
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double drop = unit(d.rng);
        const double jitter = (2.0 * unit(d.rng) - 1.0) * d.impairment.jitter_ms;
        if (drop < d.impairment.loss) {
            return;
        }
        const double delay_ms = std::max(0.0, d.impairment.delay_ms + jitter);
        Pending p;
        p.due = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double, std::milli>(delay_ms));
        p.order = d.order++;
        p.datagram.bytes.assign(bytes.begin(), bytes.end());
        p.datagram.from = local_address();
        d.queue.push(std::move(p));
        link_->cv.notify_all();
    }

    std::optional<Datagram> receive(std::chrono::microseconds timeout) override
    {
        const auto deadline = Clock::now() + timeout;
        std::unique_lock lock(link_->mu);
        Direction &d = link_->dir[self_];
        while (true) {
            const auto now = Clock::now();
            if (!d.queue.empty() && d.queue.top().due <= now) {
                Datagram out = std::move(const_cast<Pending &>(d.queue.top()).datagram);
                d.queue.pop();
                return out;
            }
            if (now >= deadline) {
                return std::nullopt;
            }
            auto wake = deadline;
            if (!d.queue.empty()) {
                wake = std::min(wake, d.queue.top().due);
            }
            link_->cv.wait_until(lock, wake);
        }
    }

    PeerAddress local_address() const override { return {0x7F000001, static_cast<std::uint16_t>(self_ + 1)}; }

private:
    std::shared_ptr<SharedLink> link_;
    int self_;
};

} // namespace

std::pair<std::unique_ptr<DatagramChannel>, std::unique_ptr<DatagramChannel>>
make_simulated_link(const LinkImpairment &first_to_second, const LinkImpairment &second_to_first)
{
    for (const auto *imp : {&first_to_second, &second_to_first}) {
        if (imp->delay_ms < 0.0 || imp->jitter_ms < 0.0 || imp->loss < 0.0 || imp->loss > 1.0) {
            throw ParameterError("simulated link: delay and jitter must be >= 0, loss within [0, 1]");
        }
    }
    auto link = std::make_shared<SharedLink>();
    link->dir[1].impairment = first_to_second;
    link->dir[1].rng.seed(first_to_second.seed);
    link->dir[0].impairment = second_to_first;
    link->dir[0].rng.seed(second_to_first.seed);
    return {std::make_unique<SimEndpoint>(link, 0), std::make_unique<SimEndpoint>(link, 1)};
}

} // namespace cathsim::teleop
