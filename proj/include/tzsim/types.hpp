#pragma once

#include <cstdint>
#include <string_view>

namespace tzsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class Area : std::uint8_t { EC, I, II, III, IV };

enum class MobilityClass : std::uint8_t { STILL, LOW, MEDIUM, HIGH };

inline constexpr int kMobilityClassCount = 4;
inline constexpr int kAreaCount = 5;

enum class TrustStatus : std::uint8_t {
    Unauthenticated,
    CentrallyAuthenticated,
    TemporarilyTrusted,
    EmergencyOnly,
};

constexpr std::string_view to_string(Area a) noexcept {
    switch (a) {
        case Area::EC: return "EC";
        case Area::I: return "I";
        case Area::II: return "II";
        case Area::III: return "III";
        case Area::IV: return "IV";
    }
    return "?";
}

constexpr std::string_view to_string(MobilityClass c) noexcept {
    switch (c) {
        case MobilityClass::STILL: return "STILL";
        case MobilityClass::LOW: return "LOW";
        case MobilityClass::MEDIUM: return "MEDIUM";
        case MobilityClass::HIGH: return "HIGH";
    }
    return "?";
}

constexpr std::string_view to_string(TrustStatus s) noexcept {
    switch (s) {
        case TrustStatus::Unauthenticated: return "unauthenticated";
        case TrustStatus::CentrallyAuthenticated: return "central";
        case TrustStatus::TemporarilyTrusted: return "temporary";
        case TrustStatus::EmergencyOnly: return "emergency";
    }
    return "?";
}

}  // namespace tzsim
