"""Reflect-beamforming optimization for a fixed detector matrix.

Two interchangeable updates for the phase vector: semidefinite relaxation
with Gaussian randomization, and a majorize-minimize step on a convex upper
bound. Both work on the same per-(k, j) rank-one quadratic forms, which turn
P_t |w_k^H h_eff,j|^2 into |a_{k,j}^H v + d_{k,j}|^2.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import conic
from .channel import PhaseVector
from .errors import SolverError

log = logging.getLogger(__name__)

BRACKET_OFFSET_S = 1e-9
RANK_ONE_RATIO = 1e-6
_EXP_CAP = 700.0


@dataclass(frozen=True)
class QuadraticForms:
    """a vectors and d scalars of the lifted SINR quadratics.

    a[k, j] (IN,) and d[k, j] satisfy
    P_t |w_k^H h_eff,j|^2 = |a[k,j]^H v + d[k,j]|^2 for unit-modulus v.
    """

    a: np.ndarray   # (K, K, IN) complex
    d: np.ndarray   # (K, K) complex

    @property
    def num_wds(self):
        return self.a.shape[0]

    @property
    def num_elements(self):
        return self.a.shape[2]

    def quad(self, v, k, j):
        """v^H C v + 2 Re{v^H u} + |d|^2, evaluated via the rank-one identity."""
        return float(abs(np.vdot(self.a[k, j], v) + self.d[k, j]) ** 2)

    def u(self, k, j):
        """Cross term of the quadratic expansion."""
        return self.a[k, j] * self.d[k, j]

    def c_matrix(self, k, j):
        a = self.a[k, j]
        return np.outer(a, a.conj())

    def lifted(self, k, j):
        """(IN+1)-square Hermitian R with [[C, u], [u^H, 0]] structure."""
        n = self.num_elements
        r = np.zeros((n + 1, n + 1), dtype=complex)
        r[:n, :n] = self.c_matrix(k, j)
        u = self.u(k, j)
        r[:n, n] = u
        r[n, :n] = u.conj()
        return r


def build_forms(channels, detectors, cfg):
    """Quadratic forms for every (detector k, interferer j) pair."""
    K = cfg.num_wds
    inn = channels.num_elements
    sqrt_p = math.sqrt(cfg.transmit_power_mw)
    a = np.zeros((K, K, inn), dtype=complex)
    d = np.zeros((K, K), dtype=complex)
    gh = channels.cascade.conj().T  # (IN, MB)
    for k in range(K):
        gw = gh @ detectors[k]
        for j in range(K):
            a[k, j] = sqrt_p * channels.reflect[j].conj() * gw
            d[k, j] = sqrt_p * np.vdot(detectors[k], channels.direct[j])
    return QuadraticForms(a, d)


def sinr_target(ell_k, t, t_c_k, cfg):
    """alpha_k(t) = 2^{ell/(W(t - t_c))} - 1; inf when t does not exceed t_c."""
    if t <= t_c_k:
        return math.inf
    exponent = ell_k / (cfg.bandwidth_hz * (t - t_c_k)) * math.log(2.0)
    if exponent > _EXP_CAP:
        return math.inf
    return math.expm1(exponent)


def edge_latency_forms(v, forms, plan, cfg):
    """max_k D_k^e evaluated through the quadratic forms at unit-modulus v."""
    worst = 0.0
    t_c = plan.edge_compute_times(cfg)
    for k in range(forms.num_wds):
        if plan.ell[k] == 0:
            continue
        interference = sum(forms.quad(v, k, j) for j in range(forms.num_wds) if j != k)
        gamma = forms.quad(v, k, k) / (interference + cfg.effective_noise_mw)
        rate_k = cfg.bandwidth_hz * math.log2(1.0 + gamma)
        if rate_k <= 0:
            return math.inf
        worst = max(worst, plan.ell[k] / rate_k + t_c[k])
    return worst


def f_value(v, forms, t, plan, cfg, k):
    """Feasibility slack of WD k's SINR constraint; non-positive means met."""
    alpha = sinr_target(plan.ell[k], t, plan.edge_compute_times(cfg)[k], cfg)
    interference = sum(forms.quad(v, k, j) for j in range(forms.num_wds) if j != k)
    return alpha * (interference + cfg.effective_noise_mw) - forms.quad(v, k, k)


def f_upper(v, v_prev, forms, t, plan, cfg, k):
    """Convex majorant of f_value: signal quadratic linearized at v_prev."""
    alpha = sinr_target(plan.ell[k], t, plan.edge_compute_times(cfg)[k], cfg)
    interference = sum(forms.quad(v, k, j) for j in range(forms.num_wds) if j != k)
    grad = forms.c_matrix(k, k) @ v_prev + forms.u(k, k)
    return (alpha * (interference + cfg.effective_noise_mw)
            - forms.quad(v_prev, k, k)
            - 2.0 * float(np.real(np.vdot(grad, v - v_prev))))


# -- SDR path ------------------------------------------------------------

@functools.lru_cache(maxsize=8)
def _lifted_layout(n):
    """Variable layout and PSD embedding map for an n x n Hermitian variable.

    Variables: n diagonal entries, then Re and Im of the strict upper
    triangle in column-major order. The PSD constraint acts on the 2n x 2n
    real embedding [[Re, -Im], [Im, Re]].
    """
    pairs = [(i, j) for j in range(n) for i in range(j)]
    p = len(pairs)
    num_vars = n + 2 * p
    side = 2 * n
    coeff = sp.lil_matrix((conic.tri_len(side), num_vars))
    for i in range(n):
        coeff[conic.tri_index(i, i), i] = 1.0
        coeff[conic.tri_index(n + i, n + i), i] = 1.0
    for idx, (i, j) in enumerate(pairs):
        re_var = n + idx
        im_var = n + p + idx
        coeff[conic.tri_index(i, j), re_var] = 1.0
        coeff[conic.tri_index(n + i, n + j), re_var] = 1.0
        coeff[conic.tri_index(i, n + j), im_var] = -1.0
        coeff[conic.tri_index(j, n + i), im_var] = 1.0
    return pairs, coeff.tocsc()


def _trace_row(r, pairs, n):
    """Real row vector with row . x == Tr(r @ V) for Hermitian r."""
    row = np.zeros(n + 2 * len(pairs))
    row[:n] = np.diag(r).real
    for idx, (i, j) in enumerate(pairs):
        row[n + idx] = 2.0 * r[i, j].real
        row[n + len(pairs) + idx] = 2.0 * r[i, j].imag
    return row


def sdr_feasible(t, forms, plan, cfg):
    """Relaxed lifted matrix V meeting edge-latency target t, or None."""
    n = forms.num_elements + 1
    pairs, psd_coeff = _lifted_layout(n)
    num_vars = n + 2 * len(pairs)
    t_c = plan.edge_compute_times(cfg)

    problem = conic.ConicProblem(num_vars)
    diag_rows = np.zeros((n, num_vars))
    diag_rows[:, :n] = np.eye(n)
    problem.add(conic.LinearEq(diag_rows, np.ones(n)))

    active = [k for k in range(cfg.num_wds) if plan.ell[k] > 0]
    for k in active:
        alpha = sinr_target(plan.ell[k], t, t_c[k], cfg)
        if math.isinf(alpha):
            return None
        row = _trace_row(forms.lifted(k, k), pairs, n)
        rhs = -abs(forms.d[k, k]) ** 2
        for j in range(cfg.num_wds):
            if j == k:
                continue
            row -= alpha * _trace_row(forms.lifted(k, j), pairs, n)
            rhs += alpha * abs(forms.d[k, j]) ** 2
        rhs += alpha * cfg.effective_noise_mw
        scale = 1.0 / (cfg.effective_noise_mw * max(1.0, alpha))
        problem.add(conic.LinearIneq(-scale * row, np.array([-scale * rhs])))

    problem.add(conic.PSDConstraint(2 * n, np.zeros((2 * n, 2 * n)), psd_coeff))
    # near-boundary probes often stall; a short iteration budget keeps the
    # bisection fast and only errs on the conservative (infeasible) side
    out = conic.solve(problem, cfg.feas_tol, max_iter=60)
    if out.status is conic.Status.FAILURE:
        raise SolverError(f"SDR feasibility solve failed at t={t}")
    if not out.feasible:
        return None
    return _reconstruct(out.x, pairs, n)


def _reconstruct(x, pairs, n):
    v_mat = np.zeros((n, n), dtype=complex)
    np.fill_diagonal(v_mat, x[:n])
    for idx, (i, j) in enumerate(pairs):
        val = x[n + idx] + 1j * x[n + len(pairs) + idx]
        v_mat[i, j] = val
        v_mat[j, i] = val.conjugate()
    return v_mat


def randomize(v_mat, forms, plan, cfg, num_draws, rng):
    """Best unit-modulus phase vector from Gaussian draws with covariance V.

    Rank-one inputs short-circuit to the principal eigenvector's phases.
    """
    n = v_mat.shape[0]
    inn = n - 1
    eigvals, eigvecs = np.linalg.eigh(v_mat)

    def dehomogenize(vbar):
        phases = np.exp(1j * np.angle(np.where(vbar == 0, 1.0, vbar)))
        return phases[:inn] * phases[inn].conjugate()

    if eigvals[-1] <= 0:
        return np.ones(inn, dtype=complex)
    if eigvals[-2] / eigvals[-1] <= RANK_ONE_RATIO:
        return dehomogenize(eigvecs[:, -1])

    root = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
    best_v, best_t = None, math.inf
    for _ in range(num_draws):
        z = root @ ((rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2))
        cand = dehomogenize(z)
        t_cand = edge_latency_forms(cand, forms, plan, cfg)
        if t_cand < best_t:
            best_v, best_t = cand, t_cand
    return best_v if best_v is not None else np.ones(inn, dtype=complex)


def optimize_reflect_sdr(channels, detectors, plan, cfg, theta, rng):
    """Bisection on sdr_feasible, then randomization at the accepted target.

    Never worsens the incumbent: if the randomized vector loses to the
    current phases (relaxation gap), the incumbent is kept and flagged.
    Returns (t, PhaseVector, info).
    """
    forms = build_forms(channels, detectors, cfg)
    v0 = theta.coefficients
    t0 = edge_latency_forms(v0, forms, plan, cfg)
    info = {"relaxed_t": t0, "improved": False, "probes": 0}
    active = [k for k in range(cfg.num_wds) if plan.ell[k] > 0]
    if not active or not math.isfinite(t0):
        return t0, theta, info

    t_c = plan.edge_compute_times(cfg)
    lo = max(t_c[k] for k in active) + BRACKET_OFFSET_S
    hi, v_best = t0, None
    for _ in range(cfg.max_bisect_iters):
        if hi - lo <= cfg.eps_reflect * hi:
            break
        mid = 0.5 * (lo + hi)
        try:
            candidate = sdr_feasible(mid, forms, plan, cfg)
        except SolverError:
            log.debug("SDR numerical failure at t=%g; treated as infeasible", mid)
            candidate = None
        info["probes"] += 1
        if candidate is not None:
            hi, v_best = mid, candidate
        else:
            lo = mid
    info["relaxed_t"] = hi
    if v_best is None:
        return t0, theta, info

    v_cand = randomize(v_best, forms, plan, cfg, cfg.num_randomizations, rng)
    t_cand = edge_latency_forms(v_cand, forms, plan, cfg)
    if t_cand <= t0:
        info["improved"] = True
        return t_cand, PhaseVector.from_coefficients(v_cand), info
    log.debug("randomization gap: %g > incumbent %g; keeping phases", t_cand, t0)
    return t0, theta, info


# -- SCA path ------------------------------------------------------------

def _re_im_rows(vec):
    """Rows r, q with r.x = Re(vec^H v), q.x = Im(vec^H v) for x = [Re v; Im v]."""
    return np.concatenate([vec.real, vec.imag]), np.concatenate([-vec.imag, vec.real])


def sca_step(theta_prev, forms, plan, cfg, t):
    """One majorize-minimize update of the phase vector at latency level t.

    Solves the convex surrogate with |v_n| <= 1, projects back to unit
    modulus, and accepts only if the true edge latency does not increase.
    Returns (PhaseVector, z_star, accepted).
    """
    v_prev = theta_prev.coefficients
    inn = forms.num_elements
    nv = 2 * inn + 1  # [Re v; Im v; z]
    z_idx = nv - 1
    t_c = plan.edge_compute_times(cfg)
    noise = cfg.effective_noise_mw
    active = [k for k in range(cfg.num_wds) if plan.ell[k] > 0]
    if not active:
        return theta_prev, 0.0, False

    problem = conic.ConicProblem(nv, objective=np.eye(nv)[z_idx])
    for k in active:
        alpha = sinr_target(plan.ell[k], t, t_c[k], cfg)
        if math.isinf(alpha):
            return theta_prev, 0.0, False
        f_rows = []
        lin = np.zeros(nv)
        const = alpha * noise
        for j in range(cfg.num_wds):
            if j == k:
                continue
            r_row, q_row = _re_im_rows(forms.a[k, j])
            f_rows.append(math.sqrt(alpha) * r_row)
            f_rows.append(math.sqrt(alpha) * q_row)
            u_re, _ = _re_im_rows(forms.u(k, j))
            lin[:2 * inn] += 2.0 * alpha * u_re
            const += alpha * abs(forms.d[k, j]) ** 2
        grad = forms.c_matrix(k, k) @ v_prev + forms.u(k, k)
        g_re, _ = _re_im_rows(grad)
        lin[:2 * inn] -= 2.0 * g_re
        const += (-forms.quad(v_prev, k, k)
                  + 2.0 * float(np.real(np.vdot(grad, v_prev))))
        # work in noise-power units so all rows are O(1)
        const /= noise
        lin = lin / noise
        f_mat = np.vstack(f_rows) / math.sqrt(noise) if f_rows else np.zeros((0, 2 * inn))
        f_mat = np.hstack([2.0 * f_mat, np.zeros((f_mat.shape[0], 1))])
        tau_row = -lin
        tau_row[z_idx] = 1.0
        f_full = np.vstack([f_mat, -tau_row])
        g_full = np.zeros(f_full.shape[0])
        g_full[-1] = 1.0 + const
        problem.add(conic.SecondOrderCone(f_full, g_full, tau_row, 1.0 - const))

    for n_el in range(inn):
        sel = np.zeros((2, nv))
        sel[0, n_el] = 1.0
        sel[1, inn + n_el] = 1.0
        problem.add(conic.SecondOrderCone(sel, np.zeros(2), np.zeros(nv), 1.0))

    out = conic.solve(problem, cfg.feas_tol)
    if out.status is not conic.Status.FEASIBLE:
        log.warning("SCA surrogate solve %s; keeping previous phases", out.status.value)
        return theta_prev, 0.0, False

    raw = out.x[:inn] + 1j * out.x[inn:2 * inn]
    v_new = np.where(np.abs(raw) > 1e-12, raw / np.where(np.abs(raw) == 0, 1.0, np.abs(raw)),
                     np.exp(1j * theta_prev.angles))
    z_star = float(out.x[z_idx])
    t_prev_val = edge_latency_forms(v_prev, forms, plan, cfg)
    t_new_val = edge_latency_forms(v_new, forms, plan, cfg)
    if t_new_val <= t_prev_val:
        return PhaseVector.from_coefficients(v_new), z_star, True
    return theta_prev, z_star, False
