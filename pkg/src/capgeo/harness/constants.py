"""The three capacity-versus-sqrt-area constants for convex bodies in R^3.

cap_2 >= c * sqrt(area) holds with c = 4/sqrt(pi) (the long-standing
symmetrization bound) and with the stronger c = 3 sqrt(pi)/2; the constant
4 sqrt(2/pi) is conjectured sharp with the flat disk as the extremal body.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ConstantRecord:
    conjectured: float      # 4 sqrt(2/pi), open conjecture
    improved: float         # 3 sqrt(pi)/2, proven bound
    classical: float        # 4/sqrt(pi), proven bound
    gap_conjectured_improved: float
    gap_improved_classical: float
    ordering_holds: bool

    def to_dict(self):
        return {
            "conjectured_4_sqrt_2_over_pi": self.conjectured,
            "improved_3_sqrt_pi_over_2": self.improved,
            "classical_4_over_sqrt_pi": self.classical,
            "gap_conjectured_minus_improved": self.gap_conjectured_improved,
            "gap_improved_minus_classical": self.gap_improved_classical,
            "ordering_holds": self.ordering_holds,
        }


def polya_szego_constants() -> ConstantRecord:
    c_conj = 4.0 * math.sqrt(2.0 / math.pi)
    c_new = 1.5 * math.sqrt(math.pi)
    c_old = 4.0 / math.sqrt(math.pi)
    return ConstantRecord(
        conjectured=c_conj,
        improved=c_new,
        classical=c_old,
        gap_conjectured_improved=c_conj - c_new,
        gap_improved_classical=c_new - c_old,
        ordering_holds=c_conj > c_new > c_old,
    )
