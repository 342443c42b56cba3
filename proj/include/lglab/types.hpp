#ifndef LGLAB_TYPES_HPP
#define LGLAB_TYPES_HPP

#include <complex>
#include <numbers>

namespace lglab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Quasi-harmonic prefactor constant 2*pi^3 of the layer densities.
inline constexpr double c_p_quasi_harmonic = 2.0 * pi * pi * pi;

} // namespace lglab

#endif
