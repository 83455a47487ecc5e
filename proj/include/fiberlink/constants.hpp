#pragma once

// Physical constants and instrument defaults used across the toolkit.
// Everything with a unit lives here so scenarios and tests agree on values.

namespace fiberlink::constants {

inline constexpr double c_light_m_s = 299792458.0;

// Default optical carrier (ITU C-band line used by the links we model).
inline constexpr double default_nu0_hz = 194.4e12;

// Group index of standard single-mode fiber, used for propagation delays.
inline constexpr double fiber_group_index = 1.468;

// Effective thermo-optic path coefficient of jacketed SMF, (1/L) d(nL)/dT.
inline constexpr double default_kappa_per_k = 1.1e-5;

// Dead-time-free counter defaults.
inline constexpr double default_gate_s = 1.0;
inline constexpr double counter_max_beat_hz = 55.0e6;

// Short-interconnect round-trip monitor: AOM at 37 MHz, detected beat at
// twice that, tracked and divided before counting.
inline constexpr double monitor_aom_hz = 37.0e6;
inline constexpr double monitor_carrier_rf_hz = 74.0e6;
inline constexpr int monitor_divide_by = 74;

inline constexpr double seconds_per_day = 86400.0;

}  // namespace fiberlink::constants
