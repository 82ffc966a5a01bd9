"""Shared model construction: basis, Grams, raw and snapped spectra, operator families."""

from dataclasses import dataclass, field
from functools import cached_property

from .config import DEFAULT_TOLERANCES
from .fourier_basis import build_basis
from .operators import OperatorFamily
from .quasistatic import assemble_gram, snapped_spectrum, solve_structural


@dataclass(frozen=True, eq=False)
class Model:
    shape: object
    alpha: tuple
    cutoff: int
    delta_snap: float
    tol: object = field(default=DEFAULT_TOLERANCES, repr=False)

    @cached_property
    def basis(self):
        return build_basis(self.alpha, self.cutoff)

    @cached_property
    def gram(self):
        return assemble_gram(self.basis, self.shape)

    @cached_property
    def raw(self):
        return solve_structural(self.gram, self.tol)

    @cached_property
    def snapped(self):
        return snapped_spectrum(self.raw, self.delta_snap)

    @cached_property
    def family(self):
        return OperatorFamily.from_spectrum(self.snapped, self.gram, self.tol)

    @cached_property
    def raw_family(self):
        return OperatorFamily.from_spectrum(self.raw, self.gram, self.tol)


def build_model(shape, alpha, cutoff, delta_snap, tol=None):
    return Model(shape, tuple(float(a) for a in alpha), int(cutoff), float(delta_snap),
                 tol or DEFAULT_TOLERANCES)
