#include "core/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/soil.hpp"

namespace soiltag {

namespace {

constexpr double kPoleSaturationOhm = 1e18;

void check_grid(const std::vector<double>& freqs) {
  check_domain(!freqs.empty(), "frequency grid must be non-empty");
  for (std::size_t i = 1; i < freqs.size(); ++i) {
    check_domain(freqs[i] > freqs[i - 1], "frequency grid must be strictly increasing");
  }
}

}  // namespace

void CircuitParams::validate() const {
  check_domain(z_line > 0.0 && z_source > 0.0, "impedances must be > 0");
  check_domain(c1 > 0.0 && cc > 0.0 && lc > 0.0, "C_1, C_C, L_C must be > 0");
  check_domain(r_loss >= 0.0, "loss resistance must be >= 0");
}

std::complex<double> impedance(const CircuitParams& params, double omega) {
  params.validate();
  check_domain(omega > 0.0, "angular frequency must be > 0");
  const std::complex<double> j(0.0, 1.0);
  // Branch admittance of the parallel slot LC.
  const std::complex<double> y = j * (omega * params.cc - 1.0 / (omega * params.lc));
  std::complex<double> branch;
  if (std::abs(y) == 0.0) {
    branch = {kPoleSaturationOhm, 0.0};  // parallel resonance pole
  } else {
    branch = 1.0 / y;
  }
  return params.r_loss + branch + 1.0 / (j * omega * params.c1);
}

double gain_db_at(const CircuitParams& params, double freq_hz) {
  const std::complex<double> zr = impedance(params, 2.0 * kPi * freq_hz);
  const double zl = params.z_line;
  const double zo = params.z_source;
  const std::complex<double> num = zo * zr;
  const std::complex<double> den = zl * zl + 2.0 * zl * zr + zo * zr + zo * zl;
  double db;
  if (std::abs(num) == 0.0) {
    db = kGainFloorDb;
  } else if (std::abs(den) == 0.0) {
    db = kGainCeilDb;
  } else {
    db = 20.0 * std::log10(std::abs(num) / std::abs(den));
  }
  return std::clamp(db, kGainFloorDb, kGainCeilDb);
}

FrequencyResponse frequency_response(const CircuitParams& params,
                                     const std::vector<double>& freqs_hz) {
  check_grid(freqs_hz);
  FrequencyResponse fr;
  fr.freqs_hz = freqs_hz;
  fr.gain_db.reserve(freqs_hz.size());
  for (double f : freqs_hz) {
    fr.gain_db.push_back(gain_db_at(params, f));
  }
  return fr;
}

double FrequencyResponse::gain_at(double freq_hz) const {
  check_domain(freqs_hz.size() >= 2, "response grid too small for interpolation");
  check_domain(freq_hz >= freqs_hz.front() && freq_hz <= freqs_hz.back(),
               "frequency " + std::to_string(freq_hz) + " Hz outside response grid [" +
                   std::to_string(freqs_hz.front()) + ", " + std::to_string(freqs_hz.back()) +
                   "]");
  const auto it = std::lower_bound(freqs_hz.begin(), freqs_hz.end(), freq_hz);
  if (it == freqs_hz.begin()) return gain_db.front();
  const std::size_t hi = static_cast<std::size_t>(it - freqs_hz.begin());
  const std::size_t lo = hi - 1;
  if (freqs_hz[hi] == freq_hz) return gain_db[hi];
  const double t = (freq_hz - freqs_hz[lo]) / (freqs_hz[hi] - freqs_hz[lo]);
  return gain_db[lo] + t * (gain_db[hi] - gain_db[lo]);
}

double resonant_frequency(const CircuitParams& params) {
  params.validate();
  return 1.0 / (2.0 * kPi * std::sqrt(params.lc * (params.c1 + params.cc)));
}

CircuitParams lump_from_geometry(const DgsGeometry& geom, double epsilon_soil) {
  check_domain(geom.w_mm > 0.0 && geom.a_mm > 0.0, "slot dimensions must be > 0");
  check_domain(epsilon_soil >= 1.0, "relative permittivity must be >= 1");
  // Quasi-static half-space load: the slot field splits between the FR4
  // substrate and the soil.
  const double eps_eff = 0.5 * (kSubstratePermittivity + epsilon_soil);
  CircuitParams p;
  p.cc = kSlotCapScaleM * kVacuumPermittivity * eps_eff * (geom.a_mm / geom.w_mm);
  p.lc = kSlotInductancePerMm * geom.a_mm;
  return p;
}

TuneResult tune_geometry(const std::vector<double>& moisture_levels, double band_lo_hz,
                         double band_hi_hz, const SearchSpace& space) {
  check_domain(moisture_levels.size() >= 2, "need at least two moisture levels");
  for (std::size_t i = 1; i < moisture_levels.size(); ++i) {
    check_domain(moisture_levels[i] > moisture_levels[i - 1],
                 "moisture levels must be sorted ascending");
  }
  check_domain(band_lo_hz < band_hi_hz, "band must be a non-empty interval");
  check_domain(band_lo_hz >= 2.4e9 && band_hi_hz <= 3.0e9,
               "design band must lie within [2.4, 3.0] GHz");
  check_domain(space.w_step_mm > 0.0 && space.a_step_mm > 0.0, "grid steps must be > 0");

  std::vector<double> eps_per_level;
  eps_per_level.reserve(moisture_levels.size());
  for (double theta : moisture_levels) {
    eps_per_level.push_back(topp_permittivity(theta));
  }

  const int n_w = static_cast<int>(std::floor((space.w_max_mm - space.w_min_mm) /
                                              space.w_step_mm + 0.5)) + 1;
  const int n_a = static_cast<int>(std::floor((space.a_max_mm - space.a_min_mm) /
                                              space.a_step_mm + 0.5)) + 1;

  bool found = false;
  TuneResult best;
  double nearest_fc = 0.0;
  double nearest_dist = std::numeric_limits<double>::infinity();

  // Candidates enumerated in (a asc, w asc) order; strict improvement on
  // the min offset makes the tie-break "smaller a, then smaller w".
  for (int ia = 0; ia < n_a; ++ia) {
    for (int iw = 0; iw < n_w; ++iw) {
      DgsGeometry geom;
      geom.a_mm = space.a_min_mm + ia * space.a_step_mm;
      geom.w_mm = space.w_min_mm + iw * space.w_step_mm;

      const double fc_dry = resonant_frequency(lump_from_geometry(geom, eps_per_level.front()));
      const double dist = fc_dry < band_lo_hz ? band_lo_hz - fc_dry
                          : fc_dry > band_hi_hz ? fc_dry - band_hi_hz
                                                : 0.0;
      if (dist < nearest_dist) {
        nearest_dist = dist;
        nearest_fc = fc_dry;
      }
      if (dist > 0.0) continue;  // step 1: resonance of the driest level in band

      TuneResult cand;
      cand.geometry = geom;
      cand.fc_per_level_hz.reserve(eps_per_level.size());
      for (double eps : eps_per_level) {
        cand.fc_per_level_hz.push_back(resonant_frequency(lump_from_geometry(geom, eps)));
      }
      cand.min_delta_f_hz = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < cand.fc_per_level_hz.size(); ++k) {
        const double df = cand.fc_per_level_hz[k] - cand.fc_per_level_hz[k + 1];
        cand.delta_f_hz.push_back(df);
        cand.min_delta_f_hz = std::min(cand.min_delta_f_hz, df);
      }
      if (!found || cand.min_delta_f_hz > best.min_delta_f_hz) {
        best = cand;
        found = true;
      }
    }
  }

  if (!found) {
    throw InfeasibleError("no slot geometry places the dry resonance inside [" +
                          std::to_string(band_lo_hz) + ", " + std::to_string(band_hi_hz) +
                          "] Hz; nearest achievable f_c is " + std::to_string(nearest_fc) +
                          " Hz");
  }
  return best;
}

}  // namespace soiltag
