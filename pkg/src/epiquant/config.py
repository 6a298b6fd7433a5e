"""Numeric tolerances used by the structural checks.

``structural`` guards identities that hold exactly up to rounding
(unitarity, orthonormality, eigenrelations); ``word`` guards agreement
between alternative word decompositions, where products of up to |G|
unitaries may accumulate error.  Matrix deviations are measured with the
max-absolute-entry norm.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-10
    word: float = 1e-8
    probability: float = 1e-12
    psd_floor: float = 1e-10

    def as_dict(self):
        return {
            "structural": self.structural,
            "word": self.word,
            "probability": self.probability,
            "psd_floor": self.psd_floor,
        }


DEFAULT_TOLERANCES = Tolerances()
