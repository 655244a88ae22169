"""Reference values for the unit tests, computed by routes independent of the C++ code.

Filter values come from the Fourier integral of the toggling sign, classical chi from
time-domain double integrals of the autocorrelation, quantum chi from mpmath quadrature.
Writes tests/unit/oracle_values.hpp.
"""

import math
import pathlib

import mpmath as mp
from scipy import integrate

mp.mp.dps = 30
HBAR = mp.mpf("1.054571817e-34")
KB = mp.mpf("1.380649e-23")


def instants(n, tau):
    return [(m - 0.5) * tau / n for m in range(1, n + 1)]


def sign(t, n, tau):
    return -1 if sum(1 for d in instants(n, tau) if d <= t) % 2 else 1


def segments(n, tau):
    edges = [0.0] + instants(n, tau) + [tau]
    return [(edges[i], edges[i + 1], (-1) ** i) for i in range(len(edges) - 1)]


def filter_fourier(z, n):
    """F_n(z) = z^2 |int_0^1 s(t) e^{izt} dt|^2 / 2 with tau = 1."""
    re = im = mp.mpf(0)
    for a, b, s in segments(n, 1.0):
        re += s * mp.quad(lambda t: mp.cos(z * t), [a, b])
        im += s * mp.quad(lambda t: mp.sin(z * t), [a, b])
    return z * z * (re * re + im * im) / 2


def chi_time_domain(g, n, tau):
    """Var(Phi)/4 with Var = 2 int_0^tau dt int_0^t du s(t) s(t-u) g(u)."""
    kinks = instants(n, tau)

    def inner(t):
        pts = sorted(t - d for d in kinks if 0 < t - d < t)
        edges = [0.0] + pts + [t]
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            mid = t - 0.5 * (a + b)
            s2 = sign(t, n, tau) * sign(mid, n, tau)
            total += s2 * integrate.quad(g, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        return total

    edges = [0.0] + kinks + [tau]
    var = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        var += integrate.quad(inner, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
    return 2.0 * var / 4.0


def y_sum(z, n):
    if n == 0:
        return 1 - mp.exp(1j * z)
    v = 1 + (-1) ** (n + 1) * mp.exp(1j * z)
    for j, d in enumerate(instants(n, 1.0), start=1):
        v += 2 * (-1) ** j * mp.exp(1j * z * d)
    return v


def chi_quantum_ohmic(alpha, omega_d, temperature, n, tau):
    def f(w):
        if w == 0:
            return mp.mpf(0)
        filt = abs(y_sum(w * tau, n)) ** 2 / 2
        kernel = 1 if temperature == 0 else mp.coth(HBAR * w / (2 * KB * temperature))
        return filt * 2 * alpha * w / (4 * w * w) * kernel

    pieces = max(4, int(omega_d * tau / (mp.pi / 2)) + 1)
    pts = [omega_d * mp.mpf(i) / pieces for i in range(pieces + 1)]
    return mp.quad(f, pts)


def main():
    out = ["#pragma once", "", "// Generated by tools/oracles/generate_oracles.py; do not edit.", "",
           "namespace oracle {", "",
           "struct FilterCase { int n; double z; double value; };",
           "struct ClassicalCase { int gaussian; double sigma; double tau_c; int n; double tau; double chi; };",
           "struct QuantumCase { double alpha; double omega_d; double temperature; int n; double tau; double chi; };",
           "struct KernelCase { double temperature; double omega; double value; };", ""]

    out.append("inline constexpr FilterCase kFilter[] = {")
    for n in (1, 2, 3, 5, 8, 16):
        for z in (0.37, 2.5, math.pi, 7.1, 40.0, 123.4):
            out.append(f"    {{{n}, {z!r}, {mp.nstr(filter_fourier(mp.mpf(z), n), 17)}}},")
    out.append("};")
    out.append("")

    out.append("inline constexpr ClassicalCase kClassical[] = {")
    lor = (1.3, 0.7)
    gau = (0.8, 1.1)
    for gaussian, (sigma, tc) in ((0, lor), (1, gau)):
        if gaussian:
            g = lambda u, s=sigma, c=tc: s * s * math.exp(-u * u / (2 * c * c))
        else:
            g = lambda u, s=sigma, c=tc: s * s * math.exp(-abs(u) / c)
        for n in (0, 1, 2, 4):
            for tau in (0.05, 0.6, 2.5):
                chi = chi_time_domain(g, n, tau)
                out.append(f"    {{{gaussian}, {sigma!r}, {tc!r}, {n}, {tau!r}, {chi!r}}},")
    out.append("};")
    out.append("")

    out.append("inline constexpr QuantumCase kQuantum[] = {")
    for temperature in (0.0, 1e-11):
        for n in (0, 1, 2, 3):
            for tau in (0.05, 1.0, 10.0):
                chi = chi_quantum_ohmic(mp.mpf("0.1"), mp.mpf(1), mp.mpf(temperature), n, mp.mpf(tau))
                out.append(f"    {{0.1, 1.0, {temperature!r}, {n}, {tau!r}, {mp.nstr(chi, 17)}}},")
    out.append("};")
    out.append("")

    out.append("inline constexpr KernelCase kKernel[] = {")
    for temperature, omega in ((1e-3, 1e6), (1e-3, 1e9), (1.0, 1e9), (1.0, 1e12), (300.0, 1e14)):
        v = mp.coth(HBAR * omega / (2 * KB * temperature))
        out.append(f"    {{{temperature!r}, {omega!r}, {mp.nstr(v, 17)}}},")
    out.append("};")
    out += ["", "}  // namespace oracle", ""]

    target = pathlib.Path(__file__).resolve().parents[2] / "tests" / "unit" / "oracle_values.hpp"
    target.write_text("\n".join(out))
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
