"""
Sign Conventions
================
The fixed memo of sign and normalization conventions every number in a report depends on.
Reports carry its SHA-256 so that results computed under different conventions never compare equal.
"""

import hashlib

CONVENTION_MEMO = """\
chernloc sign conventions, memo version 1

1. Wirtinger calculus is exact: fields are expressions in independent symbols z_i and
   zbar_i; conj swaps them and conjugates constants.
2. Connections: nabla e = e theta. For a frame change e_b = e_a g_ab,
   theta_b = g^-1 theta_a g + g^-1 dg. Curvature K = d theta + theta ^ theta.
   Total Chern form c = det(I + (i / 2 pi) K); c^q is its degree-2q part.
   The connection trivial in the frame s = e G is theta = -dG G^-1 in e.
3. Cech difference: delta(w0, w1)_01 = w1 - w0. D = delta + (-1)^q d, so
   D(w0, w1, w01) = (d w0, d w1, w1 - w0 - d w01).
4. Honeycomb: integral over R0 of w0 + integral over R1 of w1 - integral over R01 of w01,
   with R01 the counterclockwise boundary circle of each singular cell.
5. Bochner-Martinelli: beta_m as displayed, integrating to -1 over an outward sphere.
   Indices integrate over the sphere as the boundary of the regular cell, so the index
   of the identity is +1.
6. Bott forms: the Chern form of the family connection (1 - s) nabla0 + s nabla1 is
   ds ^ alpha + beta; bott(nabla0, nabla1) is the integral of alpha over s in [0, 1],
   so d bott = c(nabla1) - c(nabla0).
"""


def convention_memo_sha256() -> str:
    return hashlib.sha256(CONVENTION_MEMO.encode("utf-8")).hexdigest()
