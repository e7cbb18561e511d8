"""How the Jacobi operator separates fiber and base directions as tau moves.

At tau = 1 every unit vector sees the round spectrum {0, 1}.  Squashing the
fibers (tau < 1) or stretching them (tau > 1) splits it: a vertical vector
sees 1/tau along the other fiber directions and tau across, a horizontal one
sees 4 - 3 tau along its J-images, which turns negative past tau = 4/3.
"""

from hopfberger.curvature import CurvatureModel
from hopfberger.liealg import build_presentation


def show(family, n, tau):
    pres = build_presentation(family, n, tau)
    model = CurvatureModel(pres)
    vert = model.jacobi_spectrum(pres.unit(0))
    hor = model.jacobi_spectrum(pres.y(1))
    fmt = lambda pairs: ", ".join(f"{lam:.4g} (x{m})" for lam, m in pairs)
    print(f"{family} n={pres.n} tau={tau:<5}  vertical: {fmt(vert)}")
    print(f"{'':20}horizontal: {fmt(hor)}")


if __name__ == "__main__":
    for tau in (1.0, 0.5, 0.25, 1.2, 1.4):
        show("H", 1, tau)
    print()
    show("O", None, 0.25)
