"""Interface numerical fluxes for ideal MHD.

All solvers use the Davis outer-wavespeed estimates built from the fast
magnetosonic speeds of the two trace states.  Inputs broadcast over any
leading axes; ``uL`` is the state on the -n side of the face and the
returned flux is the common flux projected along n.
"""

import logging

import numpy as np

from . import physics as ph

log = logging.getLogger(__name__)

_DEGEN_RTOL = 1e-10


def davis_wavespeeds(uL, uR, n, g):
    """Davis estimates (SL, SR) of the outermost wave speeds."""
    uL, uR, n = (np.asarray(a, dtype=float) for a in (uL, uR, n))
    cfL = ph.fast_magnetosonic_speed(uL, n, g)
    cfR = ph.fast_magnetosonic_speed(uR, n, g)
    vnL = np.einsum("...i,...i->...", uL[..., ph.MOM], n) / uL[..., ph.RHO]
    vnR = np.einsum("...i,...i->...", uR[..., ph.MOM], n) / uR[..., ph.RHO]
    SL = np.minimum(vnL - cfL, vnR - cfR)
    SR = np.maximum(vnL + cfL, vnR + cfR)
    return SL, SR


def interface_B_average(uL, uR):
    """Centered average of the interface magnetic field."""
    return 0.5 * (np.asarray(uL, dtype=float)[..., ph.MAG]
                  + np.asarray(uR, dtype=float)[..., ph.MAG])


def rusanov_flux(uL, uR, n, g):
    SL, SR = davis_wavespeeds(uL, uR, n, g)
    lam = np.maximum(np.abs(SL), np.abs(SR))
    fL = ph.flux_normal(uL, g, n)
    fR = ph.flux_normal(uR, g, n)
    return 0.5 * (fL + fR) - 0.5 * lam[..., None] * (np.asarray(uR, float)
                                                     - np.asarray(uL, float))


def _hll_from(fL, fR, uL, uR, SL, SR):
    SLm = np.minimum(SL, 0.0)[..., None]
    SRp = np.maximum(SR, 0.0)[..., None]
    return (SRp * fL - SLm * fR + SLm * SRp * (uR - uL)) / (SRp - SLm)


def hll_flux(uL, uR, n, g):
    uL = np.asarray(uL, dtype=float)
    uR = np.asarray(uR, dtype=float)
    SL, SR = davis_wavespeeds(uL, uR, n, g)
    fL = ph.flux_normal(uL, g, n)
    fR = ph.flux_normal(uR, g, n)
    return _hll_from(fL, fR, uL, uR, SL, SR)


def hllc_flux(uL, uR, n, g):
    """HLLC for MHD with the interface magnetic field taken from the HLL
    average state.  Degenerate configurations (vanishing wave fan, contact
    speed collapsing onto an outer wave, inadmissible star density) fall
    back to the HLL flux for those faces."""
    uL = np.asarray(uL, dtype=float)
    uR = np.asarray(uR, dtype=float)
    n = np.asarray(n, dtype=float)
    SL, SR = davis_wavespeeds(uL, uR, n, g)
    fL = ph.flux_normal(uL, g, n)
    fR = ph.flux_normal(uR, g, n)

    rhoL, rhoR = uL[..., ph.RHO], uR[..., ph.RHO]
    vL = uL[..., ph.MOM] / rhoL[..., None]
    vR = uR[..., ph.MOM] / rhoR[..., None]
    BL, BR = uL[..., ph.MAG], uR[..., ph.MAG]
    vnL = np.einsum("...i,...i->...", vL, n)
    vnR = np.einsum("...i,...i->...", vR, n)
    bnL = np.einsum("...i,...i->...", BL, n)
    bnR = np.einsum("...i,...i->...", BR, n)
    ptL = ph.pressure(uL, g) + 0.5 * np.einsum("...i,...i->...", BL, BL)
    ptR = ph.pressure(uR, g) + 0.5 * np.einsum("...i,...i->...", BR, BR)

    scale = np.maximum(np.abs(SL), np.abs(SR))
    dS = SR - SL
    degen = dS <= _DEGEN_RTOL * scale
    dS_safe = np.where(degen, 1.0, dS)

    # Interface magnetic field from the HLL average state.
    fBL = fL[..., ph.MAG]
    fBR = fR[..., ph.MAG]
    Bs = (SR[..., None] * BR - SL[..., None] * BL + fBL - fBR) / dS_safe[..., None]
    bns = np.einsum("...i,...i->...", Bs, n)

    mL = rhoL * (SL - vnL)
    mR = rhoR * (SR - vnR)
    den = mR - mL
    degen |= np.abs(den) <= _DEGEN_RTOL * np.maximum(np.abs(mL), np.abs(mR))
    den_safe = np.where(degen, 1.0, den)
    Ss = (mR * vnR - mL * vnL + ptL - ptR - bnL**2 + bnR**2) / den_safe

    degen |= (np.abs(SL - Ss) <= _DEGEN_RTOL * scale)
    degen |= (np.abs(SR - Ss) <= _DEGEN_RTOL * scale)

    # Star total pressure, averaged over the two (equivalent when the
    # normal field is continuous) single-sided expressions.
    pts_L = ptL + mL * (Ss - vnL) - bnL**2 + bns**2
    pts_R = ptR + mR * (Ss - vnR) - bnR**2 + bns**2
    pts = 0.5 * (pts_L + pts_R)

    def star(uK, vK, BK, vnK, bnK, ptK, mK, SK):
        dinv = np.where(degen | (np.abs(SK - Ss) < 1e-300), 1.0, 1.0 / (SK - Ss))
        rho_s = uK[..., ph.RHO] * (SK - vnK) * dinv
        mom_s = (uK[..., ph.MOM] * (SK - vnK)[..., None]
                 + (pts - ptK)[..., None] * n
                 - (bns[..., None] * Bs - bnK[..., None] * BK)) * dinv[..., None]
        vdBK = np.einsum("...i,...i->...", vK, BK)
        rho_safe = np.where(rho_s > 0, rho_s, 1.0)
        vdBs = np.einsum("...i,...i->...", mom_s / rho_safe[..., None], Bs)
        E_s = (uK[..., ph.ENE] * (SK - vnK) + pts * Ss - ptK * vnK
               - (bns * vdBs - bnK * vdBK)) * dinv
        us = np.empty_like(uK)
        us[..., ph.RHO] = rho_s
        us[..., ph.MOM] = mom_s
        us[..., ph.MAG] = Bs
        us[..., ph.ENE] = E_s
        return us, rho_s

    usL, rsL = star(uL, vL, BL, vnL, bnL, ptL, mL, SL)
    usR, rsR = star(uR, vR, BR, vnR, bnR, ptR, mR, SR)
    degen |= (rsL <= 0.0) | (rsR <= 0.0)

    flux = np.where(
        (SL >= 0.0)[..., None], fL,
        np.where(
            (SR <= 0.0)[..., None], fR,
            np.where((Ss >= 0.0)[..., None],
                     fL + SL[..., None] * (usL - uL),
                     fR + SR[..., None] * (usR - uR))))

    if np.any(degen):
        nfall = int(np.count_nonzero(degen))
        log.debug("hllc: falling back to HLL on %d face node(s)", nfall)
        hll = _hll_from(fL, fR, uL, uR, SL, SR)
        flux = np.where(degen[..., None], hll, flux)
    return flux


SOLVERS = {"rusanov": rusanov_flux, "hll": hll_flux, "hllc": hllc_flux}


def get_solver(name):
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown riemann solver {name!r}; "
                         f"choose from {sorted(SOLVERS)}") from None
