"""High-precision reference for the four-wave small divisor.

Evaluates Omega(2) + Omega(3) - Omega(4) - Omega(5) at kappa = 0.1, h = 2,
g = 1, gamma = 0 with 50-digit mpmath arithmetic, where
Omega(j) = sqrt(j tanh(j h) (g + kappa j^2)). The printed 30-digit value
is frozen into the test suite and compared against the double-precision
implementation at 1e-13 relative tolerance.

Also confirms the exact three-wave resonance (1,1,-2) in deep water at
kappa = 1/2: 2 sqrt(1 + kappa) = sqrt(2 + 8 kappa) has the root 1/2.
"""

import mpmath as mp

mp.mp.dps = 50


def omega(j, kappa, h, g=1):
    j = mp.mpf(j)
    return mp.sqrt(j * mp.tanh(j * h) * (g + kappa * j * j))


if __name__ == "__main__":
    kappa = mp.mpf(1) / 10
    h = mp.mpf(2)
    d = omega(2, kappa, h) + omega(3, kappa, h) - omega(4, kappa, h) - omega(5, kappa, h)
    print("small divisor (+,+,-,-) j=(2,3,4,5) kappa=0.1 h=2:")
    print(mp.nstr(d, 30))

    # Wilton: kappa solving 2 Omega(1) = Omega(2) in deep water
    kap = mp.findroot(lambda k: 2 * mp.sqrt(1 + k) - mp.sqrt(2 * (1 + 4 * k)), mp.mpf("0.4"))
    print("Wilton kappa (deep, (1,1,-2)):", mp.nstr(kap, 30))
