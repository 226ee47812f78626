#pragma once

#include "cathsim/catheter/bending_map.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace cathsim::teleop {

inline constexpr std::uint16_t kMagic = 0xCA7E;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kFrameSize = 31;

enum class MsgType : std::uint8_t
{
    Command = 0,
    Status = 1,
    Ping = 2,
    Pong = 3,
};

namespace flag {
inline constexpr std::uint8_t kPedal = 1u << 0;
inline constexpr std::uint8_t kGripperCart = 1u << 1;   // gripper A
inline constexpr std::uint8_t kGripperStatic = 1u << 2; // gripper B
inline constexpr std::uint8_t kLimitClamped = 1u << 3;
} // namespace flag

struct WireMessage
{
    MsgType type = MsgType::Command;
    std::uint32_t seq = 0;
    std::uint64_t timestamp_us = 0;
    std::int32_t translation_um = 0;
    std::int32_t rotation_mdeg = 0;
    std::int32_t knob_mdeg = 0;
    std::uint8_t flags = 0;

    bool operator==(const WireMessage &) const = default;
};

using Frame = std::array<std::uint8_t, kFrameSize>;

// CRC-16/CCITT-FALSE: poly 0x1021, init 0xFFFF, no reflection, no xorout.
std::uint16_t crc16_ccitt_false(std::span<const std::uint8_t> bytes);

// Throws ProtocolError for an out-of-range message type.
Frame encode(const WireMessage &msg);

// Length first (FramingError), then CRC (CorruptionError), then magic,
// version and type (ProtocolError).
WireMessage decode(std::span<const std::uint8_t> bytes);

// Fixed-point conversions, rounded to nearest and saturated to int32.
std::int32_t to_fixed_milli(double value);
double from_fixed_milli(std::int32_t value);

WireMessage make_command(std::uint32_t seq, std::uint64_t timestamp_us, const catheter::ActuationTuple &t,
                         std::uint8_t flags = 0);
catheter::ActuationTuple tuple_of(const WireMessage &msg);

} // namespace cathsim::teleop
