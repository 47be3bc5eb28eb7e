"""Magic-state resource estimate for an optimized circuit."""
from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Protocol:
    """A distillation protocol whose output error is ``constant * p**exponent``."""

    suppression_constant: float = 41.25
    suppression_exponent: int = 4
    tiles: int = 11
    code_distance: int = 5
    target_error: float = 1e-2

    def __post_init__(self):
        if self.suppression_constant <= 0:
            raise ValueError(f"suppression constant must be positive, got {self.suppression_constant}")
        if self.suppression_exponent < 1:
            raise ValueError(f"suppression exponent must be at least 1, got {self.suppression_exponent}")
        if self.tiles < 1 or self.code_distance < 1:
            raise ValueError("tiles and code distance must be positive")
        if self.target_error <= 0:
            raise ValueError(f"target error must be positive, got {self.target_error}")


@dataclass(frozen=True)
class ResourceEstimate:
    protocol: Protocol
    t_count: int
    t_depth: int
    p_max: float
    factory_qubits: int

    @property
    def formulas(self) -> dict[str, str]:
        p = self.protocol
        return {
            "p_max": f"({p.target_error:g} / {p.suppression_constant:g}) ** (1/{p.suppression_exponent})",
            "factory_qubits": f"{p.tiles} * (2*{p.code_distance}^2 - 1)",
        }

    def as_dict(self) -> dict:
        return {
            "protocol": asdict(self.protocol),
            "t_count": self.t_count,
            "t_depth": self.t_depth,
            "p_max": self.p_max,
            "factory_qubits": self.factory_qubits,
            "formulas": self.formulas,
        }


def required_injection_error(target_error: float, constant: float, exponent: int) -> float:
    """Largest raw error ``p`` with ``constant * p**exponent <= target_error``."""
    if target_error <= 0:
        raise ValueError(f"target error must be positive, got {target_error}")
    if constant <= 0 or exponent < 1:
        raise ValueError("constant must be positive and exponent at least 1")
    return (target_error / constant) ** (1.0 / exponent)


def factory_qubits(tiles: int, code_distance: int) -> int:
    """Physical qubits of ``tiles`` surface-code tiles, each ``2d^2 - 1`` qubits."""
    return tiles * (2 * code_distance * code_distance - 1)


def estimate(t_count: int, t_depth: int, protocol: Protocol = Protocol()) -> ResourceEstimate:
    if t_count < 0 or t_depth < 0:
        raise ValueError("t_count and t_depth must be non-negative")
    p = required_injection_error(protocol.target_error, protocol.suppression_constant, protocol.suppression_exponent)
    return ResourceEstimate(protocol, t_count, t_depth, p, factory_qubits(protocol.tiles, protocol.code_distance))
