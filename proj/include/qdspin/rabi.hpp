#pragma once

// Effective two-photon drive strength for a dot in a doubly resonant
// cavity, from physical device parameters. The drive connects a spin ground
// state to its trion through two virtual intermediate states; each path
// contributes the product of its two dipole matrix elements and overlap
// factors divided by its intermediate-state detuning, and the cavity enters
// through the photon number built up from the injected power.
//
// Everything in this header is in SI units except the final answer, which
// follows the library-wide nu = rate/2pi convention and comes back in GHz.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace qdspin::rabi {

// CODATA 2018 values, frozen so results do not drift with toolchains.
namespace constants {
inline constexpr double hbar_j_s = 1.054571817e-34;
inline constexpr double elementary_charge_c = 1.602176634e-19;
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double vacuum_permittivity_f_m = 8.8541878128e-12;
inline constexpr double joule_per_ev = 1.602176634e-19;
} // namespace constants

inline constexpr double cubed(double x) { return x * x * x; }

// Cavity and drive. Defaults describe the reference design: a weakly
// coupled input mirror, 50 uW of drive, Q = 5000, GaAs-like index and a
// mode volume of one cubic wavelength in the medium.
struct CavityParams {
    double eta = 0.02;                    // input coupling efficiency
    double power_w = 50e-6;               // injected drive power
    double quality_factor = 5000.0;
    double refractive_index = 3.4;
    double lambda_cavity_m = 1800e-9;     // cold-cavity resonance
    double lambda_laser_m = 1800e-9;      // drive wavelength
    double mode_volume_m3 = cubed(1800e-9 / 3.4);
};

// Dot parameters: the interband dipole length, the in-plane confinement of
// electron and hole (effective mass and confinement quantum), and the two
// transition energies fixing the intermediate-state detunings. The spin-up
// trion transition sits at lambda_trion_m; the hole-side intermediate state
// is set by its confinement energy hbar_omega_h_j.
struct DotParams {
    double r_cv_m = 0.6e-9;                                        // interband dipole length
    double m_e_eff_kg = 0.07 * constants::electron_mass_kg;
    double m_h_eff_kg = 0.34 * constants::electron_mass_kg;
    double hbar_omega_e_j = 50e-3 * constants::joule_per_ev;       // electron confinement, 50 meV
    double hbar_omega_h_j = 25e-3 * constants::joule_per_ev;       // hole confinement, 25 meV
    double lambda_trion_m = 930e-9;                                // trion transition wavelength
};

// Mode-dot overlap of one leg of a path: the field amplitude at the dot
// relative to the mode maximum, and the polarization alignment.
struct OverlapFactors {
    double field_ratio = 1.0;   // in [0, 1]
    double alignment = 1.0;     // in [-1, 1]
};

struct PathOverlaps {
    OverlapFactors ground_leg{};
    OverlapFactors excited_leg{};
};

// One leg pair per virtual path: electron-like (dipole e*r_cv then e*l_e)
// and hole-like (e*l_h then e*r_cv).
struct TwoPhotonOverlaps {
    PathOverlaps electron_path{};
    PathOverlaps hole_path{};
};

class ResonantIntermediateStateError : public std::runtime_error {
public:
    explicit ResonantIntermediateStateError(const std::string& what) : std::runtime_error(what) {}
};

// Lorentzian spectral mismatch between the drive at omega and a cavity
// resonance at omega_c with quality factor q. Equals 1 on resonance and
// 1/2 at omega = omega_c (1 + 1/(2q)).
inline double spectral_mismatch(double omega, double omega_c, double q) {
    if (!(omega > 0.0) || !(omega_c > 0.0) || !(q > 0.0)) {
        throw std::invalid_argument("spectral_mismatch: omega, omega_c and q must be positive");
    }
    const double r = omega / omega_c;
    const double d = r - 1.0;
    return r / (1.0 + 4.0 * q * q * d * d);
}

inline double spatial_mismatch(const OverlapFactors& f) {
    if (!(f.field_ratio >= 0.0) || !(f.field_ratio <= 1.0)) {
        throw std::invalid_argument("spatial_mismatch: field_ratio must lie in [0, 1]");
    }
    if (!(f.alignment >= -1.0) || !(f.alignment <= 1.0)) {
        throw std::invalid_argument("spatial_mismatch: alignment must lie in [-1, 1]");
    }
    return f.field_ratio * f.alignment;
}

// Harmonic oscillator length for a confined carrier,
// l = hbar / sqrt(2 m_eff hbar_omega).
inline double oscillator_length(double m_eff_kg, double hbar_omega_j) {
    if (!(m_eff_kg > 0.0) || !(hbar_omega_j > 0.0)) {
        throw std::invalid_argument("oscillator_length: mass and confinement energy must be positive");
    }
    return constants::hbar_j_s / std::sqrt(2.0 * m_eff_kg * hbar_omega_j);
}

// Signed detuning of a transition at lambda_transition from the laser, in
// rad/s: 2 pi c (1/lambda_transition - 1/lambda_laser).
inline double intermediate_detuning(double lambda_transition_m, double lambda_laser_m) {
    if (!(lambda_transition_m > 0.0) || !(lambda_laser_m > 0.0)) {
        throw std::invalid_argument("intermediate_detuning: wavelengths must be positive");
    }
    return 2.0 * std::numbers::pi * constants::speed_of_light_m_s *
           (1.0 / lambda_transition_m - 1.0 / lambda_laser_m);
}

// Signed detuning of a transition specified by its energy, in rad/s.
inline double detuning_from_energy(double transition_energy_j, double lambda_laser_m) {
    if (!(lambda_laser_m > 0.0)) {
        throw std::invalid_argument("detuning_from_energy: wavelength must be positive");
    }
    return transition_energy_j / constants::hbar_j_s -
           2.0 * std::numbers::pi * constants::speed_of_light_m_s / lambda_laser_m;
}

// One virtual path: the two dipole moments (C m), the two leg overlaps
// (dimensionless, already multiplied out) and the intermediate detuning.
struct TwoPhotonPath {
    double dipole_ground_cm = 0.0;
    double dipole_excited_cm = 0.0;
    double psi_ground = 1.0;
    double psi_excited = 1.0;
    double detuning_rad_s = 0.0;
};

// Core expression: Omega/2pi in GHz for an explicit set of paths,
//   Omega = eta P Q phi / (4 hbar^2 omega n^2 eps0 V)
//           * sum_k d_gk d_ke psi_gk psi_ke / Delta_k.
// Raises ResonantIntermediateStateError if any path detuning is zero.
inline double two_photon_rabi_paths(double eta, double power_w, double quality_factor, double phi,
                                    double omega_laser_rad_s, double refractive_index,
                                    double mode_volume_m3, std::span<const TwoPhotonPath> paths) {
    if (!(eta > 0.0) || !(eta <= 1.0)) {
        throw std::invalid_argument("two_photon_rabi: eta must lie in (0, 1]");
    }
    if (!(power_w >= 0.0)) {
        throw std::invalid_argument("two_photon_rabi: power must be non-negative");
    }
    if (!(quality_factor > 0.0) || !(phi >= 0.0) || !(omega_laser_rad_s > 0.0) ||
        !(refractive_index > 0.0) || !(mode_volume_m3 > 0.0)) {
        throw std::invalid_argument("two_photon_rabi: cavity parameters must be positive");
    }

    double path_sum = 0.0;
    for (const TwoPhotonPath& p : paths) {
        if (p.detuning_rad_s == 0.0) {
            throw ResonantIntermediateStateError(
                "two_photon_rabi: intermediate state is resonant with the laser "
                "(zero detuning), the adiabatic path sum diverges");
        }
        path_sum += p.dipole_ground_cm * p.dipole_excited_cm * p.psi_ground * p.psi_excited /
                    p.detuning_rad_s;
    }

    const double hbar = constants::hbar_j_s;
    const double eps0 = constants::vacuum_permittivity_f_m;
    const double n2 = refractive_index * refractive_index;
    const double omega_rad_s = eta * power_w * quality_factor * phi /
                               (4.0 * hbar * hbar * omega_laser_rad_s * n2 * eps0 * mode_volume_m3) *
                               path_sum;
    return omega_rad_s / (2.0 * std::numbers::pi) / 1e9;
}

// Omega/2pi in GHz for a cavity-dot configuration. Builds the two virtual
// paths from the dot parameters: the electron-like path detuned by the
// trion transition against the laser, the hole-like path by the hole
// confinement quantum against the laser photon energy.
inline double two_photon_rabi(const CavityParams& cavity, const DotParams& dot,
                              const TwoPhotonOverlaps& overlaps = {}) {
    if (!(cavity.lambda_cavity_m > 0.0) || !(cavity.lambda_laser_m > 0.0)) {
        throw std::invalid_argument("two_photon_rabi: wavelengths must be positive");
    }
    if (!(dot.r_cv_m >= 0.0)) {
        throw std::invalid_argument("two_photon_rabi: dipole length must be non-negative");
    }

    const double c = constants::speed_of_light_m_s;
    const double omega_laser = 2.0 * std::numbers::pi * c / cavity.lambda_laser_m;
    const double omega_cavity = 2.0 * std::numbers::pi * c / cavity.lambda_cavity_m;
    const double phi = spectral_mismatch(omega_laser, omega_cavity, cavity.quality_factor);

    const double e = constants::elementary_charge_c;
    const double l_e = oscillator_length(dot.m_e_eff_kg, dot.hbar_omega_e_j);
    const double l_h = oscillator_length(dot.m_h_eff_kg, dot.hbar_omega_h_j);

    const TwoPhotonPath paths[2] = {
        {e * dot.r_cv_m, e * l_e,
         spatial_mismatch(overlaps.electron_path.ground_leg),
         spatial_mismatch(overlaps.electron_path.excited_leg),
         intermediate_detuning(dot.lambda_trion_m, cavity.lambda_laser_m)},
        {e * l_h, e * dot.r_cv_m,
         spatial_mismatch(overlaps.hole_path.ground_leg),
         spatial_mismatch(overlaps.hole_path.excited_leg),
         detuning_from_energy(dot.hbar_omega_h_j, cavity.lambda_laser_m)},
    };
    return two_photon_rabi_paths(cavity.eta, cavity.power_w, cavity.quality_factor, phi,
                                 omega_laser, cavity.refractive_index, cavity.mode_volume_m3,
                                 paths);
}

} // namespace qdspin::rabi
