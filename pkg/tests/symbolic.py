"""Independent symbolic differential-geometry oracle built on sympy.

Everything here is derived from first principles with sympy matrices and
lambdified to numpy, so agreement with the package is evidence, not
circularity: no package code is imported.
"""

import numpy as np
import sympy as sp


class SymbolicGeometry:
    """Curvature and derivative oracles for one symbolic metric.

    `gexprs` is an n x n sympy Matrix in the coordinate symbols `syms`.
    Index conventions match the package's frozen ones:
      Gamma^k_ij, R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj + GG - GG,
      Ric_jl = R^k_jkl, derivative axes leading in d1/d2 layouts.
    """

    def __init__(self, gexprs: sp.Matrix, syms):
        self.syms = list(syms)
        n = len(self.syms)
        self.n = n
        g = sp.Matrix(gexprs)
        # adjugate inverse keeps polynomial metrics as clean p/det ratios;
        # nothing is simplified, lambdify just walks the trees
        ginv = g.inv(method="ADJ")

        gamma = [[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    s = sum(ginv[k, m] * (sp.diff(g[m, j], self.syms[i])
                                          + sp.diff(g[m, i], self.syms[j])
                                          - sp.diff(g[i, j], self.syms[m]))
                            for m in range(n))
                    gamma[k][i][j] = s / 2

        riem = [[[[sp.S.Zero] * n for _ in range(n)] for _ in range(n)]
                for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for l in range(n):
                        term = (sp.diff(gamma[i][l][j], self.syms[k])
                                - sp.diff(gamma[i][k][j], self.syms[l]))
                        term += sum(gamma[i][k][m] * gamma[m][l][j]
                                    - gamma[i][l][m] * gamma[m][k][j]
                                    for m in range(n))
                        riem[i][j][k][l] = term

        ric = sp.zeros(n, n)
        for j in range(n):
            for l in range(n):
                ric[j, l] = sum(riem[k][j][k][l] for k in range(n))
        scal = sum(ginv[j, l] * ric[j, l] for j in range(n) for l in range(n))
        ein = ric - sp.Rational(1, 2) * scal * g

        self._g = g
        self._ginv = ginv
        self._gamma = gamma
        self._ric = ric
        self._scal = scal
        self._ein = ein

        self.g = self._lam_mat(g)
        self.ginv = self._lam_mat(ginv)
        self.d1 = self._lam_rank3(
            [[[sp.diff(g[i, j], self.syms[k]) for j in range(n)]
              for i in range(n)] for k in range(n)])
        self.d2 = self._lam_rank4(
            [[[[sp.diff(g[i, j], self.syms[k], self.syms[l])
                for j in range(n)] for i in range(n)]
              for l in range(n)] for k in range(n)])
        self.gamma = self._lam_rank3(gamma)
        self.ricci = self._lam_mat(ric)
        self.scalar = self._lam_scalar(scal)
        self.einstein = self._lam_mat(ein)

    # ---- lambdify helpers, all batched over (N, n) points ------------------

    def _lam_scalar(self, expr):
        f = sp.lambdify(self.syms, expr, "numpy")

        def ev(pts):
            pts = np.asarray(pts, dtype=float)
            out = f(*[pts[:, i] for i in range(self.n)])
            return np.broadcast_to(np.asarray(out, dtype=float),
                                   (pts.shape[0],)).copy()
        return ev

    def _lam_mat(self, mat):
        n = self.n
        fs = [[sp.lambdify(self.syms, mat[i, j], "numpy") for j in range(n)]
              for i in range(n)]

        def ev(pts):
            pts = np.asarray(pts, dtype=float)
            args = [pts[:, i] for i in range(n)]
            out = np.empty((pts.shape[0], n, n))
            for i in range(n):
                for j in range(n):
                    out[:, i, j] = np.broadcast_to(fs[i][j](*args),
                                                   (pts.shape[0],))
            return out
        return ev

    def _lam_rank3(self, arr):
        n = self.n
        fs = [[[sp.lambdify(self.syms, arr[a][b][c], "numpy")
                for c in range(n)] for b in range(n)] for a in range(n)]

        def ev(pts):
            pts = np.asarray(pts, dtype=float)
            args = [pts[:, i] for i in range(n)]
            out = np.empty((pts.shape[0], n, n, n))
            for a in range(n):
                for b in range(n):
                    for c in range(n):
                        out[:, a, b, c] = np.broadcast_to(
                            fs[a][b][c](*args), (pts.shape[0],))
            return out
        return ev

    def _lam_rank4(self, arr):
        n = self.n
        fs = [[[[sp.lambdify(self.syms, arr[a][b][c][d], "numpy")
                 for d in range(n)] for c in range(n)]
               for b in range(n)] for a in range(n)]

        def ev(pts):
            pts = np.asarray(pts, dtype=float)
            args = [pts[:, i] for i in range(n)]
            out = np.empty((pts.shape[0], n, n, n, n))
            for a in range(n):
                for b in range(n):
                    for c in range(n):
                        for d in range(n):
                            out[:, a, b, c, d] = np.broadcast_to(
                                fs[a][b][c][d](*args), (pts.shape[0],))
            return out
        return ev

    # ---- derived oracles ----------------------------------------------------

    def covariant_derivative_sym2(self, kexprs: sp.Matrix):
        """nabla_k K_ij as a batched (N, n, n, n) evaluator, deriv axis first."""
        n = self.n
        k = sp.Matrix(kexprs)
        nab = [[[sp.diff(k[i, j], self.syms[c])
                 - sum(self._gamma[m][c][i] * k[m, j] for m in range(n))
                 - sum(self._gamma[m][c][j] * k[i, m] for m in range(n))
                 for j in range(n)] for i in range(n)] for c in range(n)]
        return self._lam_rank3(nab)

    def killing_deformation(self, yexprs):
        """(1/2) Lie_Y g lowered: sym nabla Y_flat, as (N, n, n) evaluator."""
        n = self.n
        ylow = [sum(self._g[i, j] * yexprs[j] for j in range(n))
                for i in range(n)]
        nab = sp.zeros(n, n)
        for i in range(n):
            for j in range(n):
                nab[i, j] = (sp.diff(ylow[j], self.syms[i])
                             - sum(self._gamma[m][i][j] * ylow[m]
                                   for m in range(n)))
        sym = (nab + nab.T) / 2
        return self._lam_mat(sym)


def polynomial_perturbation_metric(n: int = 3, amp: float = 0.02):
    """A fixed SPD analytic metric: delta + small quadratic sym2, plus syms.

    Quadratic polynomial entries keep every symbolic derivative tree tiny,
    so oracle construction stays fast; amp 0.02 keeps g SPD for |x| <~ 2.5.
    """
    syms = sp.symbols(f"x1:{n + 1}")
    g = sp.eye(n)
    coeffs = [[1, 2, -1], [2, -2, 3], [-1, 3, 1]]
    for i in range(n):
        for j in range(i, n):
            pert = amp * coeffs[i % 3][j % 3] * syms[i] * syms[j]
            if i == j:
                pert += amp * syms[(i + 1) % n]
            g[i, j] += pert
            if i != j:
                g[j, i] = g[i, j]
    return g, syms
