"""Walk the three-variable cubic example through every stage of the pipeline."""
import math
from pathlib import Path

import numpy as np

from orthocert.certificate import canonical_form, certify, passing_signflips
from orthocert.polyalg import format_polynomial, homogenize, parse_polynomial
from orthocert.pwcov import pw_covariance
from orthocert.spectra import pw_pca

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    np.set_printoptions(precision=6, suppress=True)
    f = parse_polynomial((DATA / "cubic_f.poly").read_text(), 3)
    g = parse_polynomial((DATA / "cubic_g.poly").read_text(), 3)
    print("f =", format_polynomial(f))
    print("g =", format_polynomial(g))
    fbar = homogenize(f)
    print("homogenized f =", format_polynomial(fbar))

    C = pw_covariance(fbar)
    print("Cov(fbar) * 960/pi^2 =")
    print(np.round(C * 960 / math.pi**2, 6))

    pf, pg = pw_pca(f), pw_pca(g)
    print("lambda_f =", pf.lam)
    print("lambda_g =", pg.lam)
    print("V_f =")
    print(pf.V)

    fhat = canonical_form(f, pf).fhat
    ghat = canonical_form(g, pg).fhat
    print("fhat =", format_polynomial(fhat))
    print("passing signflips:", passing_signflips(fhat, ghat))

    cert = certify(f, g)
    print("sigma =", cert.sigma)
    print("R =")
    print(cert.R)
    print(f"residual = {cert.residual_rel:.3e}")


if __name__ == "__main__":
    main()
