#pragma once

// Physical constants (SI).
namespace irmen::consts {

inline constexpr double mu0     = 1.25663706212e-6;   // vacuum permeability, T*m/A
inline constexpr double kB      = 1.380649e-23;       // Boltzmann, J/K
inline constexpr double c_light = 2.99792458e8;       // m/s
inline constexpr double gamma_e = 1.76085963023e11;   // electron gyromagnetic ratio, rad/(s*T)

}  // namespace irmen::consts
