#pragma once

namespace soiltag {

inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kPi = 3.14159265358979323846;

// 2.4 GHz OFDM layout: 13 channels, 5 MHz channel step, 64 subcarriers
// at 312.5 kHz spacing per 20 MHz channel.
inline constexpr int kNumChannels = 13;
inline constexpr int kSubcarriersPerChannel = 64;
inline constexpr double kChannel1CenterHz = 2412e6;
inline constexpr double kChannelStepHz = 5e6;
inline constexpr double kSubcarrierSpacingHz = 312.5e3;

// Reference carrier for array element spacing (wavelengths are quoted
// at this frequency).
inline constexpr double kArrayReferenceHz = 2.44e9;

}  // namespace soiltag
