#pragma once

#include <complex>
#include <vector>

namespace soiltag {

// FR4 substrate and microstrip defaults shared by every tag design.
inline constexpr double kSubstratePermittivity = 4.4;
inline constexpr double kDefaultSubstrateThicknessMm = 1.2;
inline constexpr double kDefaultLineWidthMm = 2.24;

// Geometry -> lumped element calibration. The slot behaves as a
// parallel-plate capacitor facing the soil half-space
// (C_C = kappa_c * eps0 * eps_eff * a/w) in series with the slot
// inductance (L_C = kappa_l * a). kappa values are fixed once so the
// a=10 mm / w=0.1 mm slot under dry loam resonates between 2.5 and
// 2.6 GHz; they are never re-fit per design.
inline constexpr double kSlotCapScaleM = 1.1085e-3;       // m
inline constexpr double kSlotInductancePerMm = 1.0e-10;   // H per mm of slot length
inline constexpr double kDefaultC1Farad = 0.4e-12;
inline constexpr double kDefaultLineImpedanceOhm = 50.0;
inline constexpr double kDefaultSourceImpedanceOhm = 50.0;
inline constexpr double kDefaultLossOhm = 0.2;

// Gain saturation keeping downstream CSI arithmetic finite.
inline constexpr double kGainFloorDb = -80.0;
inline constexpr double kGainCeilDb = 20.0;

// Slot etched in the ground plane of the microstrip tag.
struct DgsGeometry {
  double w_mm = 0.1;  // slot width
  double a_mm = 10.0; // slot length
  double substrate_thickness_mm = kDefaultSubstrateThicknessMm;
  double line_width_mm = kDefaultLineWidthMm;
};

// Lumped equivalent of the loaded resonator.
struct CircuitParams {
  double z_line = kDefaultLineImpedanceOhm;    // transmission line impedance, ohm
  double z_source = kDefaultSourceImpedanceOhm;
  double c1 = kDefaultC1Farad;                 // line-to-ground capacitance, F
  double cc = 0.0;                             // slot capacitance, F
  double lc = 0.0;                             // slot inductance, H
  double r_loss = kDefaultLossOhm;             // series loss in the LC branch, ohm

  void validate() const;
};

// Gain-in-dB curve over a strictly increasing frequency grid.
struct FrequencyResponse {
  std::vector<double> freqs_hz;
  std::vector<double> gain_db;

  // Linear-in-dB interpolation; frequencies outside the grid are an error.
  double gain_at(double freq_hz) const;
};

// Impedance of the slot branch: [r_loss + 1/(jwC_C + 1/(jwL_C))] + 1/(jwC_1).
// At the parallel-LC pole the branch impedance saturates to a large finite
// magnitude instead of dividing by zero.
std::complex<double> impedance(const CircuitParams& params, double omega);

// Through gain 20*log10(|Zo*Z_R| / |Z_L^2 + 2*Z_L*Z_R + Zo*Z_R + Zo*Z_L|)
// per frequency, clipped to [kGainFloorDb, kGainCeilDb].
FrequencyResponse frequency_response(const CircuitParams& params,
                                     const std::vector<double>& freqs_hz);
double gain_db_at(const CircuitParams& params, double freq_hz);

// Bandstop center 1 / (2*pi*sqrt(L_C*(C_1+C_C))).
double resonant_frequency(const CircuitParams& params);

// Lumped parameters for a slot geometry loaded by soil of the given
// relative permittivity.
CircuitParams lump_from_geometry(const DgsGeometry& geom, double epsilon_soil);

// Candidate grid for the geometry search. Defaults cover both reference
// designs (a=10/w=0.1 and a=6/w=1).
struct SearchSpace {
  double w_min_mm = 0.1;
  double w_max_mm = 2.0;
  double w_step_mm = 0.1;
  double a_min_mm = 4.0;
  double a_max_mm = 14.0;
  double a_step_mm = 0.5;
};

struct TuneResult {
  DgsGeometry geometry;
  std::vector<double> fc_per_level_hz;  // one per moisture level, ascending levels
  std::vector<double> delta_f_hz;       // adjacent offsets fc(k) - fc(k+1)
  double min_delta_f_hz = 0.0;
};

// Two-step design search. Step 1 keeps grid candidates whose resonance
// under the driest level falls inside [band_lo, band_hi]. Step 2 returns
// the candidate maximizing the minimum adjacent frequency offset across
// the level list; ties prefer the smaller slot (a, then w).
TuneResult tune_geometry(const std::vector<double>& moisture_levels,
                         double band_lo_hz, double band_hi_hz,
                         const SearchSpace& space = SearchSpace{});

}  // namespace soiltag
