#include "cathsim/teleop/wire.hpp"

#include "cathsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cathsim::teleop {

namespace {

template <typename T>
void put_le(std::uint8_t *dst, T value)
{
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        dst[i] = static_cast<std::uint8_t>(u >> (8 * i));
    }
}

template <typename T>
T get_le(const std::uint8_t *src)
{
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        u |= static_cast<U>(static_cast<U>(src[i]) << (8 * i));
    }
    return static_cast<T>(u);
}

} // namespace

std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes)
{
    std::uint16_t crc = 0xFFFF;
    for (std::uint8_t b : bytes) {
        crc ^= static_cast<std::uint16_t>(b) << 8;
        for (int i = 0; i < 8; ++i) {
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021) : static_cast<std::uint16_t>(crc << 1);
        }
    }
    return crc;
}

Frame encode(const WireMessage &msg)
{
    if (static_cast<std::uint8_t>(msg.type) > 3) {
        throw ProtocolError("encode: invalid message type");
    }
    Frame f{};
    put_le<std::uint16_t>(&f[0], kMagic);
    f[2] = kVersion;
    f[3] = static_cast<std::uint8_t>(msg.type);
    put_le<std::uint32_t>(&f[4], msg.seq);
    put_le<std::uint64_t>(&f[8], msg.timestamp_us);
    put_le<std::int32_t>(&f[16], msg.translation_um);
    put_le<std::int32_t>(&f[20], msg.rotation_mdeg);
    put_le<std::int32_t>(&f[24], msg.knob_mdeg);
    f[28] = msg.flags;
    put_le<std::uint16_t>(&f[29], crc16_ccitt_false(std::span(f).first(29)));
    return f;
}

WireMessage decode(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() != kFrameSize) {
        throw FramingError("decode: expected 31 bytes, got " + std::to_string(bytes.size()));
    }
    // CRC before anything else, so any corrupted byte reports as corruption.
    if (crc16_ccitt_false(bytes.first(29)) != get_le<std::uint16_t>(&bytes[29])) {
        throw CorruptionError("decode: CRC mismatch");
    }
    if (get_le<std::uint16_t>(&bytes[0]) != kMagic) {
        throw ProtocolError("decode: bad magic");
    }
    if (bytes[2] != kVersion) {
        throw ProtocolError("decode: unsupported version " + std::to_string(bytes[2]));
    }
    if (bytes[3] > 3) {
        throw ProtocolError("decode: unknown message type " + std::to_string(bytes[3]));
    }
    WireMessage m;
    m.type = static_cast<MsgType>(bytes[3]);
    m.seq = get_le<std::uint32_t>(&bytes[4]);
    m.timestamp_us = get_le<std::uint64_t>(&bytes[8]);
    m.translation_um = get_le<std::int32_t>(&bytes[16]);
    m.rotation_mdeg = get_le<std::int32_t>(&bytes[20]);
    m.knob_mdeg = get_le<std::int32_t>(&bytes[24]);
    m.flags = bytes[28];
    return m;
}

std::int32_t to_fixed_milli(double value)
{
    const double scaled = std::round(value * 1000.0);
    if (!(scaled == scaled)) {
        return 0;
    }
    constexpr double lo = std::numeric_limits<std::int32_t>::min();
    constexpr double hi = std::numeric_limits<std::int32_t>::max();
    return static_cast<std::int32_t>(std::clamp(scaled, lo, hi));
}

double from_fixed_milli(std::int32_t value) { return value / 1000.0; }

WireMessage make_command(std::uint32_t seq, std::uint64_t timestamp_us, const catheter::ActuationTuple &t,
                         std::uint8_t flags)
{
    WireMessage m;
    m.type = MsgType::Command;
    m.seq = seq;
    m.timestamp_us = timestamp_us;
    m.translation_um = to_fixed_milli(t.translation_mm);
    m.rotation_mdeg = to_fixed_milli(t.rotation_deg);
    m.knob_mdeg = to_fixed_milli(t.knob_deg);
    m.flags = flags;
    return m;
}

catheter::ActuationTuple tuple_of(const WireMessage &msg)
{
    return {from_fixed_milli(msg.translation_um), from_fixed_milli(msg.rotation_mdeg), from_fixed_milli(msg.knob_mdeg)};
}

} // namespace cathsim::teleop
